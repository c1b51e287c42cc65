"""Phase-space transfer matrix of the three-pulse swap, Gaussian propagation
and cooling analytics.

Quadrature ordering is (X_M, P_M, X_L, P_L) with [X, P] = 2i, so the vacuum
covariance is the identity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from .params import DerivedQuantities, PulsePlan, chi_for_mu

PHYSICALITY_TOL = 1e-9


class PhysicalityError(ValueError):
    """A covariance matrix violates the uncertainty principle."""


class ConvergenceError(RuntimeError):
    pass


def symplectic_form(n_modes: int = 2) -> np.ndarray:
    """Block-diagonal Omega with blocks [[0, 1], [-1, 0]]."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


OMEGA = symplectic_form(2)
SWAP = np.array(
    [[0.0, 0.0, 0.0, -1.0], [0.0, 0.0, 1.0, 0.0], [0.0, -1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0]]
)


def squeeze_matrix(xi: float) -> np.ndarray:
    """Equal local squeezing of both modes, X -> e^{-xi} X, P -> e^{xi} P."""
    s = math.exp(-xi)
    return np.diag([s, 1 / s, s, 1 / s])


def is_symplectic(m: np.ndarray, atol: float = 1e-12) -> bool:
    omega = symplectic_form(m.shape[0] // 2)
    return bool(np.allclose(m.T @ omega @ m, omega, rtol=0, atol=atol))


@dataclass(frozen=True)
class ProtocolMap:
    """X' = m X + F with Cov(F) = v_ff."""

    m: np.ndarray
    v_ff: np.ndarray = field(default_factory=lambda: np.zeros((4, 4)))

    @classmethod
    def identity(cls) -> "ProtocolMap":
        return cls(np.eye(4), np.zeros((4, 4)))


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float))
        object.__setattr__(self, "cov", np.asarray(self.cov, dtype=float))
        n = self.mean.shape[0]
        if n % 2 or self.cov.shape != (n, n):
            raise ValueError("mean must have even length and cov matching shape")
        if not np.allclose(self.cov, self.cov.T, rtol=0, atol=1e-12 * max(1.0, np.abs(self.cov).max())):
            raise ValueError("covariance must be symmetric")

    @property
    def n_modes(self) -> int:
        return self.mean.shape[0] // 2

    @classmethod
    def vacuum(cls, n_modes: int = 1) -> "GaussianState":
        return cls(np.zeros(2 * n_modes), np.eye(2 * n_modes))

    @classmethod
    def thermal(cls, n_mean: float) -> "GaussianState":
        return cls(np.zeros(2), (2 * n_mean + 1) * np.eye(2))

    @classmethod
    def coherent(cls, x: float, p: float = 0.0) -> "GaussianState":
        return cls(np.array([x, p], dtype=float), np.eye(2))

    def tensor(self, other: "GaussianState") -> "GaussianState":
        n, k = self.cov.shape[0], other.cov.shape[0]
        cov = np.zeros((n + k, n + k))
        cov[:n, :n] = self.cov
        cov[n:, n:] = other.cov
        return GaussianState(np.concatenate([self.mean, other.mean]), cov)

    def mode(self, index: int) -> "GaussianState":
        sl = slice(2 * index, 2 * index + 2)
        return GaussianState(self.mean[sl], self.cov[sl, sl])

    def physicality_margin(self) -> float:
        """Smallest eigenvalue of cov + i Omega (non-negative for physical states)."""
        omega = symplectic_form(self.n_modes)
        return float(np.linalg.eigvalsh(self.cov + 1j * omega).min())

    def is_physical(self, tol: float = PHYSICALITY_TOL) -> bool:
        return self.physicality_margin() >= -tol


# --- maps -----------------------------------------------------------------


def qnd_map(chi: float) -> np.ndarray:
    m = np.eye(4)
    m[1, 2] = chi
    m[3, 0] = chi
    return m


def mechanical_noise(epsilon: float, eta_m: float, sigma: float, n_bath: float) -> np.ndarray:
    """Covariance of the thermal increments sqrt(eta_m) (dX_M, dP_M) over a quarter cycle."""
    k = 2 * n_bath + 1
    var = k * (1.0 / eta_m - 1.0 - 2 * epsilon**2)
    cross = 2 * k * epsilon / sigma
    return eta_m * np.array([[var, cross], [cross, var]])


def cycle_map(chi, eta_l, eta_m, sigma, epsilon, n_bath: float = 0.0):
    """QND pulse, optical displacement and quarter-period delay.

    Returns the 4x4 transfer matrix and the covariance of the noise added
    during the cycle.
    """
    for name, eta in (("eta_l", eta_l), ("eta_m", eta_m)):
        if not 0 < eta <= 1:
            raise ValueError(f"{name} must lie in (0, 1], got {eta}")
    rm, rl = math.sqrt(eta_m), math.sqrt(eta_l)
    m = np.array(
        [
            [epsilon * rm, rm / sigma, rm * chi / sigma, 0.0],
            [-rm / sigma, -epsilon * rm, -epsilon * chi * rm, 0.0],
            [rl * chi, 0.0, 0.0, rl],
            [0.0, 0.0, -rl, 0.0],
        ]
    )
    v = np.zeros((4, 4))
    v[:2, :2] = mechanical_noise(epsilon, eta_m, sigma, n_bath)
    # vacuum admixed with amplitude sqrt(1 - eta_l)
    v[2:, 2:] = (1.0 - eta_l) * np.eye(2)
    return m, v


def protocol_map(
    plan: PulsePlan, d: DerivedQuantities, eta_l: float, n_bath: Optional[float] = None
) -> ProtocolMap:
    n_bath = d.n_bath if n_bath is None else n_bath
    chi1, chi2, chi3 = plan.chi
    m1, v1 = cycle_map(chi1, eta_l, d.eta_m, d.sigma, d.epsilon, n_bath)
    m2, v2 = cycle_map(chi2, eta_l, d.eta_m, d.sigma, d.epsilon, n_bath)
    q3 = qnd_map(chi3)
    m = q3 @ m2 @ m1
    v = q3 @ (m2 @ v1 @ m2.T + v2) @ q3.T
    return ProtocolMap(m, 0.5 * (v + v.T))


def swap_channel(mu: Sequence[float], epsilon: float, eta_l: float = 1.0, n_bath: float = 0.0) -> ProtocolMap:
    """Protocol map in the reduced (mu, epsilon, eta_l, n_bath) parametrisation."""
    d = DerivedQuantities.from_epsilon(epsilon, n_bath)
    return protocol_map(chi_for_mu(mu, eta_l, d.eta_m, d.sigma), d, eta_l)


def closed_form_map(mu: Sequence[float], epsilon: float, eta_l: float, eta_m: float) -> np.ndarray:
    """Transfer matrix written directly in terms of the pulse strengths."""
    mu1, mu2, mu3 = mu
    sigma = 1.0 / math.sqrt(1.0 + epsilon**2)
    es = epsilon * sigma
    m23 = (eta_l * mu3 + mu1 * (eta_m - mu3)) / mu2
    m31 = (eta_m * mu3 + mu1 * (eta_l - mu3)) / mu2
    return np.array(
        [
            [mu1 - eta_m, 0.0, 0.0, -mu2],
            [es * (mu3 - mu1), mu3 - eta_m, m23, mu2 * es],
            [-mu2 * es, -mu2, mu1 - eta_l, 0.0],
            [m31, 0.0, 0.0, mu3 - eta_l],
        ]
    )


def propagate(state: GaussianState, pm: ProtocolMap, check: bool = True) -> GaussianState:
    """Push a two-mode Gaussian state through the channel.

    Raises PhysicalityError when the output violates the uncertainty
    principle beyond ``PHYSICALITY_TOL``; this signals an invalid noise
    covariance rather than a numerical artefact.
    """
    cov = pm.m @ state.cov @ pm.m.T + pm.v_ff
    out = GaussianState(pm.m @ state.mean, 0.5 * (cov + cov.T))
    if check:
        margin = out.physicality_margin()
        if margin < -PHYSICALITY_TOL:
            raise PhysicalityError(f"output covariance unphysical (min eigenvalue {margin:.3e})")
    return out


def mech_occupancy(state: GaussianState) -> float:
    """Mean phonon number of mode 0, (<X^2> + <P^2> - 2) / 4 including the means."""
    second = state.cov[0, 0] + state.cov[1, 1] + state.mean[0] ** 2 + state.mean[1] ** 2
    return (second - 2.0) / 4.0


def initial_state(n_mech: float) -> GaussianState:
    """Thermal mechanics with occupancy ``n_mech`` and a coherent (vacuum-noise) pulse."""
    return GaussianState.thermal(n_mech).tensor(GaussianState.vacuum())


def final_occupancy(mu, epsilon, eta_l, n_bath, n_initial: Optional[float] = None) -> float:
    """Occupancy after the protocol from the full covariance pipeline.

    The mechanics starts in equilibrium with its bath unless ``n_initial``
    is given.
    """
    pm = swap_channel(mu, epsilon, eta_l, n_bath)
    n0 = n_bath if n_initial is None else n_initial
    return mech_occupancy(propagate(initial_state(n0), pm, check=False))


# --- cooling analytics -----------------------------------------------------


def analytic_occupancy(mu: Sequence[float], epsilon: float, eta_l: float, n_bath: float) -> float:
    """First-order-in-epsilon occupancy for a thermal mechanical input.

    Valid for epsilon << 1.
    """
    mu1, mu2, mu3 = mu
    pe = math.pi * epsilon
    thermal = (
        (mu1 - 1) * (mu1 + 2 * pe - 1)
        + (mu3 - 1) * (mu3 + 2 * pe - 1)
        + pe * (4 - mu3 * (2 - mu3))
    )
    optical = (
        mu3**2
        - 2 * eta_l * mu1 * mu3 * (mu3 + pe - 1)
        + mu1**2 * (mu3 - 1) * (mu3 + 2 * pe - 1)
    ) / mu2**2
    return ((2 * n_bath + 1) * thermal + optical + mu2**2 / eta_l - 2) / 4


def minimum_occupancy(epsilon: float, eta_l: float, n_bath: float) -> float:
    pe = math.pi * epsilon
    return pe / 4 * (3 * (2 * n_bath + 1) - 2 * eta_l) + (1 / eta_l - 1) / 4


@dataclass(frozen=True)
class OptimalPlan:
    mu_closed: tuple
    n_closed: float
    mu_numeric: tuple
    n_numeric: float
    iterations: int


def optimal_plan(epsilon: float, eta_l: float, eta_m: Optional[float] = None, n_bath: float = 1e3) -> OptimalPlan:
    """Closed-form near-optimal pulse strengths, cross-checked by a bounded
    Nelder-Mead search over [0.5, 1.5]^3 seeded at (1, 1, 1)."""
    if eta_m is None:
        eta_m = math.exp(-math.pi * epsilon)
    if not (0 < eta_l <= 1 and 0 < eta_m <= 1):
        raise ValueError("efficiencies must lie in (0, 1]")
    mu_closed = (eta_m, (1 + eta_m) / 2 * eta_l**0.25, eta_m)
    n_closed = minimum_occupancy(epsilon, eta_l, n_bath)

    def objective(mu):
        return analytic_occupancy(mu, epsilon, eta_l, n_bath)

    res = optimize.minimize(
        objective,
        x0=np.ones(3),
        method="Nelder-Mead",
        bounds=[(0.5, 1.5)] * 3,
        options={"xatol": 1e-9, "fatol": 1e-16, "maxiter": 20000, "maxfev": 40000,
                 "initial_simplex": np.vstack([np.ones(3), np.ones(3) + 0.05 * np.eye(3)])},
    )
    diameter = np.ptp(res.final_simplex[0], axis=0).max()
    if not res.success or diameter > 1e-6:
        raise ConvergenceError(
            f"simplex search did not converge: {res.message} "
            f"(nit={res.nit}, diameter={diameter:.2e}, x={res.x})"
        )
    return OptimalPlan(mu_closed, n_closed, tuple(res.x), float(res.fun), int(res.nit))


def cooperativity(mu: Sequence[float], epsilon: float, sigma: float, eta_l: float, eta_m: float) -> float:
    """Instantaneous cooperativity averaged over the three-pulse sequence."""
    if epsilon <= 0:
        raise ValueError("cooperativity is undefined for an undamped oscillator")
    mu1, mu2, mu3 = mu
    return ((mu1**2 + mu3**2) / mu2**2 + sigma**2 * mu2**2 / (eta_l * eta_m)) / (8 * math.pi * epsilon)


@dataclass(frozen=True)
class CoolingCriteria:
    coherent_oscillation: bool  # n_B < 4 omega_M / (3 pi Gamma)
    cooperativity: bool  # n_B < 16 C / (3 (2 + 1/eta_L))
    optical_efficiency: bool  # eta_L > 1/5
    n_bath_bound: float
    cooperativity_bound: float


def cooling_criteria(epsilon: float, eta_l: float, n_bath: float, c: float) -> CoolingCriteria:
    bound = 2 / (3 * math.pi * epsilon) if epsilon > 0 else math.inf
    c_bound = 16 * c / (3 * (2 + 1 / eta_l))
    return CoolingCriteria(n_bath < bound, n_bath < c_bound, eta_l > 0.2, bound, c_bound)


@dataclass(frozen=True)
class CoolingReport:
    n_final: float
    n_min_analytic: float
    criteria: CoolingCriteria
    cooperativity: float
    mu_optimal: tuple
    n_bath: float
    epsilon: float

    def to_dict(self) -> dict:
        return {
            "n_final": self.n_final,
            "n_min_analytic": self.n_min_analytic,
            "cooperativity": self.cooperativity,
            "mu_optimal": list(self.mu_optimal),
            "n_bath": self.n_bath,
            "epsilon": self.epsilon,
            "criteria": {
                "n_bath_below_coherent_oscillation_bound": self.criteria.coherent_oscillation,
                "n_bath_below_cooperativity_bound": self.criteria.cooperativity,
                "eta_l_above_one_fifth": self.criteria.optical_efficiency,
                "n_bath_bound": self.criteria.n_bath_bound,
                "cooperativity_bound": self.criteria.cooperativity_bound,
            },
        }


def cooling_report(mu, d: DerivedQuantities, eta_l: float) -> CoolingReport:
    """Occupancy after the protocol for a mechanics initially at the bath temperature."""
    pm = protocol_map(chi_for_mu(mu, eta_l, d.eta_m, d.sigma), d, eta_l)
    n_final = mech_occupancy(propagate(initial_state(d.n_bath), pm))
    c = cooperativity(mu, d.epsilon, d.sigma, eta_l, d.eta_m)
    mu_opt = (d.eta_m, (1 + d.eta_m) / 2 * eta_l**0.25, d.eta_m)
    return CoolingReport(
        n_final=n_final,
        n_min_analytic=minimum_occupancy(d.epsilon, eta_l, d.n_bath),
        criteria=cooling_criteria(d.epsilon, eta_l, d.n_bath, c),
        cooperativity=c,
        mu_optimal=mu_opt,
        n_bath=d.n_bath,
        epsilon=d.epsilon,
    )


@dataclass(frozen=True)
class ToleranceWidth:
    width_numeric: float
    width_analytic: float
    dn_over_n: float
    mu_min: float
    n_min: float
    roots: tuple


def _bisect(f, lo, hi, tol=1e-10):
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise ConvergenceError(f"root not bracketed in [{lo}, {hi}]: f = {flo:.3e}, {fhi:.3e}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def tolerance_width(epsilon: float, eta_l: float, n_bath: float) -> ToleranceWidth:
    """Width of the cooling dip along mu^(j) = mu, measured where the
    occupancy doubles relative to its minimum."""
    if epsilon <= 0:
        raise ValueError("tolerance width requires epsilon > 0")

    def occupancy(mu):
        return final_occupancy((mu, mu, mu), epsilon, eta_l, n_bath)

    res = optimize.minimize_scalar(occupancy, bounds=(0.5, 1.5), method="bounded",
                                   options={"xatol": 1e-12})
    mu_min, n_min = float(res.x), float(res.fun)

    def excess(mu):
        return occupancy(mu) - 2 * n_min

    lo = _bisect(excess, mu_min - 0.5, mu_min)
    hi = _bisect(excess, mu_min, mu_min + 0.5)
    analytic = math.sqrt(6 * math.pi * epsilon)
    return ToleranceWidth(hi - lo, analytic, 2 * analytic, mu_min, n_min, (lo, hi))


def cooling_surface(gamma_range, n_bath_range, resolution=64, eta_l: float = 1.0, mu=(1.0, 1.0, 1.0), executor=None):
    """Final occupancy on a log-spaced grid of Gamma/omega_M and n_B.

    Returns a dict of flat arrays (row-major over gamma, then n_bath):
    ``gamma`` (Gamma/omega_M), ``n_bath``, ``n_final`` and ``n_bath_bound``,
    the largest n_B allowing ground-state cooling, 4 omega_M / (3 pi Gamma).
    """
    if min(*gamma_range, *n_bath_range) <= 0:
        raise ValueError("ranges must be positive")
    gammas = np.geomspace(gamma_range[0], gamma_range[1], resolution)
    baths = np.geomspace(n_bath_range[0], n_bath_range[1], resolution)

    def row(g):
        sigma = math.sqrt(1 - g**2 / 4)
        eps = g / (2 * sigma)
        return [final_occupancy(mu, eps, eta_l, nb) for nb in baths]

    rows = list(executor.map(row, gammas)) if executor is not None else [row(g) for g in gammas]
    gg, nn = np.meshgrid(gammas, baths, indexing="ij")
    return {
        "gamma": gg.ravel(),
        "n_bath": nn.ravel(),
        "n_final": np.asarray(rows).ravel(),
        "n_bath_bound": (4 / (3 * math.pi * gg)).ravel(),
    }


def squeeze_decompose(pm: ProtocolMap, tol: float = 1e-10) -> float:
    """Recover xi with m = S(xi) . SWAP from a lossless squeezed-swap map."""
    mu2 = -pm.m[0, 3]
    if mu2 <= 0:
        raise ValueError("map is not a squeezed swap")
    xi = -math.log(mu2)
    expected = squeeze_matrix(xi) @ SWAP
    if np.abs(pm.m - expected).max() > tol * max(1.0, mu2, 1 / mu2):
        raise ValueError("map does not factor into squeezing and a state swap")
    return xi
