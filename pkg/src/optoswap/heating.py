"""Worst-case bath heating from optical absorption during the three pulses."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from importlib import resources

from scipy.constants import c as c_light, hbar, k as k_B


@dataclass(frozen=True)
class HeatingParams:
    thickness: float
    width: float
    length: float
    density: float
    specific_heat: float
    conductivity: float
    absorbed_fraction: float
    finesse: float
    wavelength: float
    n_photons: float
    omega_m: float

    def __post_init__(self):
        for name, value in asdict(self).items():
            if name == "n_photons":
                if value < 0:
                    raise ValueError("n_photons must be non-negative")
            elif not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")

    def replace(self, **changes) -> "HeatingParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class HeatingReport:
    absorbed_energy: float  # J, per pulse
    thermal_rate: float  # rad/s
    diffusion_length: float  # m
    heated_volume: float  # m^3
    delta_t: float  # K
    delta_n_bath: float

    def to_dict(self) -> dict:
        return asdict(self)


def load_preset(name: str = "sin_microstring", finesse: float = 100.0, n_photons: float = 7.28e9) -> HeatingParams:
    table = json.loads(resources.files("optoswap.data").joinpath("materials.json").read_text())
    entry = table[name]
    return HeatingParams(
        thickness=entry["thickness_m"],
        width=entry["width_m"],
        length=entry["length_m"],
        density=entry["density_kg_m3"],
        specific_heat=entry["specific_heat_j_kg_k"],
        conductivity=entry["conductivity_w_m_k"],
        absorbed_fraction=entry["absorbed_fraction"],
        finesse=finesse,
        wavelength=entry["wavelength_m"],
        n_photons=n_photons,
        omega_m=2 * math.pi * entry["omega_m_hz"],
    )


def absorption_heating(p: HeatingParams) -> HeatingReport:
    """Temperature rise of the region heated during one protocol run
    (half a mechanical period) and the matching bath-occupancy change.

    The thermal relaxation rate uses the centre-to-end distance l/2.
    """
    omega_p = 2 * math.pi * c_light / p.wavelength
    rho_c = p.density * p.specific_heat
    energy = hbar * omega_p * p.absorbed_fraction * p.n_photons * 2 * p.finesse / math.pi
    thermal_rate = p.conductivity / (rho_c * (p.length / 2) ** 2)
    diffusion = math.sqrt(2 * math.pi * p.conductivity / (rho_c * p.omega_m))
    volume = p.thickness * p.width * diffusion
    delta_t = energy / (math.pi * rho_c * volume)
    # three pulses
    delta_n = 3 * k_B * delta_t / (hbar * p.omega_m)
    return HeatingReport(energy, thermal_rate, diffusion, volume, delta_t, delta_n)
