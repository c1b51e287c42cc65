"""Physical parameters and the protocol-level quantities derived from them.

All angular frequencies are stored in rad/s. Configuration files quote
frequencies in Hz (``*_hz`` keys) and are converted on load.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.constants import hbar, k as k_B

Triple = Tuple[float, float, float]

CONFIG_KEYS = (
    "omega_m_hz",
    "gamma_hz",
    "kappa_hz",
    "g0_hz",
    "temperature_k",
    "eta_l",
    "n_photons",
    "mu",
)


class ConfigError(ValueError):
    """Malformed or out-of-range parameter configuration."""


@dataclass(frozen=True)
class PhysicalParams:
    """Raw experimental parameters of the optomechanical system.

    Attributes:
        omega_m: mechanical angular frequency (rad/s).
        gamma: mechanical damping rate (rad/s).
        kappa: optical linewidth (rad/s).
        g0: zero-point optomechanical coupling (rad/s).
        temperature: bath temperature (K).
        eta_l: optical efficiency per cycle, in (0, 1].
        photon_numbers: optional mean photon number of each of the three pulses.
        mu: optional pulse strengths; these take precedence over photon numbers.
    """

    omega_m: float
    gamma: float
    kappa: float
    g0: float
    temperature: float
    eta_l: float = 1.0
    photon_numbers: Optional[Triple] = None
    mu: Optional[Triple] = None

    def __post_init__(self):
        if not self.omega_m > 0:
            raise ValueError(f"omega_m must be positive, got {self.omega_m}")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.g0 < 0 or self.gamma < 0 or self.temperature < 0:
            raise ValueError("g0, gamma and temperature must be non-negative")
        if not 0 < self.eta_l <= 1:
            raise ValueError(f"eta_l must lie in (0, 1], got {self.eta_l}")
        if self.gamma >= 2 * self.omega_m:
            raise ValueError("overdamped oscillator: gamma must be below 2*omega_m")
        for name in ("photon_numbers", "mu"):
            value = getattr(self, name)
            if value is not None:
                if len(value) != 3:
                    raise ValueError(f"{name} needs exactly three entries")
                object.__setattr__(self, name, tuple(float(v) for v in value))
        if self.photon_numbers is not None and min(self.photon_numbers) < 0:
            raise ValueError("photon numbers must be non-negative")

    @classmethod
    def from_mapping(cls, cfg: Mapping) -> "PhysicalParams":
        """Build from a ``*_hz``-keyed mapping (see ``CONFIG_KEYS``)."""
        unknown = set(cfg) - set(CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown parameter key(s): {sorted(unknown)}")
        required = ("omega_m_hz", "gamma_hz", "kappa_hz", "g0_hz", "temperature_k")
        missing = [key for key in required if key not in cfg]
        if missing:
            raise ConfigError(f"missing parameter key(s): {missing}")
        try:
            return cls(
                omega_m=2 * math.pi * float(cfg["omega_m_hz"]),
                gamma=2 * math.pi * float(cfg["gamma_hz"]),
                kappa=2 * math.pi * float(cfg["kappa_hz"]),
                g0=2 * math.pi * float(cfg["g0_hz"]),
                temperature=float(cfg["temperature_k"]),
                eta_l=float(cfg.get("eta_l", 1.0)),
                photon_numbers=cfg.get("n_photons"),
                mu=cfg.get("mu"),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def to_mapping(self) -> dict:
        out = {
            "omega_m_hz": self.omega_m / (2 * math.pi),
            "gamma_hz": self.gamma / (2 * math.pi),
            "kappa_hz": self.kappa / (2 * math.pi),
            "g0_hz": self.g0 / (2 * math.pi),
            "temperature_k": self.temperature,
            "eta_l": self.eta_l,
        }
        if self.photon_numbers is not None:
            out["n_photons"] = list(self.photon_numbers)
        if self.mu is not None:
            out["mu"] = list(self.mu)
        return out

    def replace(self, **changes) -> "PhysicalParams":
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return PhysicalParams(**values)


def load_params(path) -> PhysicalParams:
    """Read a JSON parameter file."""
    text = Path(path).read_text()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    return PhysicalParams.from_mapping(cfg)


@dataclass(frozen=True)
class DerivedQuantities:
    """Dimensionless quantities controlling the decoherence of one cycle.

    ``q_m`` is None for an undamped oscillator.
    """

    sigma: float
    epsilon: float
    eta_m: float
    n_bath: float
    q_m: Optional[float] = None

    @classmethod
    def from_epsilon(cls, epsilon: float, n_bath: float = 0.0) -> "DerivedQuantities":
        """Reduced parametrisation used by sweeps: everything follows from epsilon."""
        if epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        sigma = 1.0 / math.sqrt(1.0 + epsilon**2)
        # Gamma/omega_m = 2 sigma epsilon
        q_m = 1.0 / (2 * sigma * epsilon) if epsilon > 0 else None
        return cls(sigma, epsilon, math.exp(-math.pi * epsilon), float(n_bath), q_m)


def bose_einstein(omega: float, temperature: float) -> float:
    """Thermal occupancy 1/(exp(hbar omega / k_B T) - 1); zero at T = 0."""
    if temperature == 0:
        return 0.0
    return 1.0 / math.expm1(hbar * omega / (k_B * temperature))


def derive_quantities(p: PhysicalParams) -> DerivedQuantities:
    ratio = p.gamma / (2 * p.omega_m)
    sigma = math.sqrt(1.0 - ratio**2)
    epsilon = ratio / sigma
    return DerivedQuantities(
        sigma=sigma,
        epsilon=epsilon,
        eta_m=math.exp(-math.pi * epsilon),
        n_bath=bose_einstein(p.omega_m, p.temperature),
        q_m=p.omega_m / p.gamma if p.gamma > 0 else None,
    )


@dataclass(frozen=True)
class PulsePlan:
    """Interaction strengths chi (each <= 0 by convention) and pulse strengths mu."""

    chi: Triple
    mu: Triple = field(default=(1.0, 1.0, 1.0))


def pulse_strengths(chi: Sequence[float], eta_l: float, eta_m: float, sigma: float) -> PulsePlan:
    _check_efficiencies(eta_l, eta_m)
    chi = tuple(float(c) for c in chi)
    if not all(np.isfinite(chi)):
        raise ValueError("chi must be finite")
    mu2 = -math.sqrt(eta_l * eta_m) * chi[1] / sigma
    return PulsePlan(chi=chi, mu=(-chi[0] * mu2, mu2, -chi[2] * mu2))


def chi_for_mu(mu: Sequence[float], eta_l: float, eta_m: float, sigma: float) -> PulsePlan:
    """Inverse of :func:`pulse_strengths`."""
    _check_efficiencies(eta_l, eta_m)
    mu = tuple(float(m) for m in mu)
    if mu[1] == 0:
        raise ValueError("mu[1] = 0 leaves the outer interaction strengths undefined")
    chi2 = -mu[1] * sigma / math.sqrt(eta_l * eta_m)
    return PulsePlan(chi=(-mu[0] / mu[1], chi2, -mu[2] / mu[1]), mu=mu)


def photon_number(chi: float, g0: float, kappa: float, coefficient: float = 8.0) -> float:
    """Pulse photon number giving interaction strength chi = -coefficient g0 sqrt(N) / kappa.

    The default coefficient 8 is the one the interaction strength is defined
    with; ``coefficient=4`` reproduces the tabulated experimental photon number.
    """
    if g0 == 0:
        return math.inf if chi != 0 else 0.0
    return (chi * kappa / (coefficient * g0)) ** 2


def chi_for_photon_number(n: float, g0: float, kappa: float, coefficient: float = 8.0) -> float:
    return -coefficient * g0 * math.sqrt(n) / kappa


def plan_for(p: PhysicalParams, d: Optional[DerivedQuantities] = None) -> PulsePlan:
    """Pulse plan implied by a parameter set: explicit mu, else photon numbers, else mu = 1."""
    d = d or derive_quantities(p)
    if p.mu is not None:
        return chi_for_mu(p.mu, p.eta_l, d.eta_m, d.sigma)
    if p.photon_numbers is not None:
        chi = [chi_for_photon_number(n, p.g0, p.kappa) for n in p.photon_numbers]
        return pulse_strengths(chi, p.eta_l, d.eta_m, d.sigma)
    return chi_for_mu((1.0, 1.0, 1.0), p.eta_l, d.eta_m, d.sigma)


def _check_efficiencies(eta_l, eta_m):
    for name, eta in (("eta_l", eta_l), ("eta_m", eta_m)):
        if not 0 < eta <= 1:
            raise ValueError(f"{name} must lie in (0, 1], got {eta}")


# Silicon nitride microstring coupled to a microsphere; tabulated photon
# number N = 7.28e9 kept for reporting only.
TABLE1_4K = PhysicalParams(
    omega_m=2 * math.pi * 100.2e3,
    gamma=2 * math.pi * 31e-3,
    kappa=2 * math.pi * 25.6e6,
    g0=2 * math.pi * 75.0,
    temperature=4.0,
    eta_l=1.0,
    photon_numbers=(7.28e9, 7.28e9, 7.28e9),
    mu=(1.0, 1.0, 1.0),
)
TABLE1_50MK = TABLE1_4K.replace(temperature=0.05)


def epsilon_from_ratio(gamma_over_omega: float) -> float:
    """epsilon for a given Gamma/omega_M."""
    sigma = math.sqrt(1.0 - gamma_over_omega**2 / 4)
    return gamma_over_omega / (2 * sigma)
