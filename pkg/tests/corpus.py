"""States and channels shared by the property and acceptance suites."""
import math

import numpy as np

from optoswap import gaussian as gs
from optoswap.params import TABLE1_4K, TABLE1_50MK, derive_quantities, epsilon_from_ratio, plan_for
from optoswap.phasespace import Cat, Fock, Gaussian, thermal, vacuum


def squeezed_vacuum(r):
    return Gaussian(np.zeros(2), np.diag([math.exp(-2 * r), math.exp(2 * r)]))


def displaced(x, p, n=0.0):
    return Gaussian(np.array([x, p]), (2 * n + 1) * np.eye(2))


# single-mode states well contained in the default +-6 extent
STATES = [
    vacuum(),
    thermal(0.5),
    thermal(0.8),
    squeezed_vacuum(0.3),
    displaced(1.0, -0.5),
    Fock(0),
    Fock(1),
    Fock(2),
    Fock(4),
    Cat(0.5, -1),
    Cat(1.0, -1),
    Cat(1.0, 1),
    Cat(1.0 + 0.5j, -1),
    Cat(1.1j, 1),
]


def is_pure(spec):
    return not (isinstance(spec, Gaussian) and np.linalg.det(spec.cov) > 1 + 1e-12)


PURE_STATES = [s for s in STATES if is_pure(s)]


def _table1(p):
    d = derive_quantities(p)
    return gs.protocol_map(plan_for(p, d), d, p.eta_l)


def channels():
    """(label, ProtocolMap) pairs covering lossless, thermal and lossy regimes."""
    return [
        ("ideal-swap", gs.swap_channel((1.0, 1.0, 1.0), 0.0)),
        ("squeezed-swap+", gs.swap_channel((1.0, math.exp(0.2), 1.0), 0.0)),
        ("squeezed-swap-", gs.swap_channel((1.0, math.exp(-0.2), 1.0), 0.0)),
        ("table1-4K", _table1(TABLE1_4K)),
        ("table1-50mK", _table1(TABLE1_50MK)),
        ("thin-lines", gs.swap_channel((1.0, 1.0, 1.0), epsilon_from_ratio(2.24e-7), 1.0, 5e3)),
        ("qm-1e6", gs.swap_channel((1.0, 1.0, 1.0), epsilon_from_ratio(1e-6), 1.0, 5e4)),
        ("lossy-detuned", gs.swap_channel((0.95, 1.05, 0.98), 1e-5, 0.5, 1e3)),
        ("lossy-weak-bath", gs.swap_channel((1.0, 1.0, 1.0), 1e-6, 0.8, 1.0)),
    ]


GAUSSIAN_INPUTS = [
    gs.GaussianState.vacuum(2),
    gs.GaussianState.thermal(10).tensor(gs.GaussianState.vacuum()),
    gs.GaussianState(np.array([1.0, -2.0, 0.5, 0.0]), np.diag([0.3, 1 / 0.3, 2.0, 0.5])),
    gs.GaussianState.thermal(derive_quantities(TABLE1_4K).n_bath).tensor(gs.GaussianState.vacuum()),
]
