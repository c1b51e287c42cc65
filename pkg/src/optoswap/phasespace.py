"""Characteristic functions, their pushforward through the swap channel, and
Wigner functions sampled on grids.

Conventions: r = (x, p) with vacuum W(r) = exp(-r.r/2) / 2 pi, and
chi(beta) = integral W(r) exp(i r . Omega beta) d^2r, so the vacuum has
chi(beta) = exp(-|beta|^2 / 2). A coherent state |alpha> sits at r = 2 alpha.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.special import eval_laguerre

from .gaussian import OMEGA, GaussianState, ProtocolMap, symplectic_form

ALIASING_THRESHOLD = 1e-6


class AliasingWarning(UserWarning):
    """The characteristic function has not decayed at the edge of the beta grid."""


# --- state specifications ---------------------------------------------------


@dataclass(frozen=True)
class Gaussian:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        state = GaussianState(self.mean, self.cov)
        if not state.is_physical():
            raise ValueError("covariance violates the uncertainty principle")
        object.__setattr__(self, "mean", state.mean)
        object.__setattr__(self, "cov", state.cov)

    @property
    def n_modes(self) -> int:
        return self.mean.shape[0] // 2

    @classmethod
    def from_state(cls, state: GaussianState) -> "Gaussian":
        return cls(state.mean, state.cov)


@dataclass(frozen=True)
class Fock:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"Fock index must be a non-negative integer, got {self.n}")

    n_modes = 1


@dataclass(frozen=True)
class Cat:
    """(|alpha> + parity |-alpha>) normalised; parity is +1 (even) or -1 (odd)."""

    alpha: complex
    parity: int = -1

    def __post_init__(self):
        if self.parity not in (1, -1):
            raise ValueError("parity must be +1 or -1")
        if not np.isfinite(complex(self.alpha)):
            raise ValueError("alpha must be finite")
        if self.parity == -1 and self.alpha == 0:
            raise ValueError("the odd cat state is undefined at alpha = 0")

    n_modes = 1


StateSpec = Union[Gaussian, Fock, Cat]


def vacuum() -> Gaussian:
    return Gaussian(np.zeros(2), np.eye(2))


def thermal(n_mean: float) -> Gaussian:
    return Gaussian(np.zeros(2), (2 * n_mean + 1) * np.eye(2))


# --- characteristic functions ---------------------------------------------


@dataclass(frozen=True)
class CharacteristicFunction:
    """Callable chi(beta) over arrays of shape (..., 2 n_modes)."""

    func: Callable[[np.ndarray], np.ndarray]
    n_modes: int
    label: str = ""

    def __call__(self, beta) -> np.ndarray:
        beta = np.asarray(beta, dtype=float)
        if beta.shape[-1] != 2 * self.n_modes:
            raise ValueError(f"expected trailing dimension {2 * self.n_modes}, got {beta.shape}")
        return np.asarray(self.func(beta), dtype=complex)


def _gaussian_cf(mean, cov):
    n = mean.shape[0] // 2
    omega = symplectic_form(n)
    quad = omega.T @ cov @ omega
    shift = mean @ omega

    def func(beta):
        q = np.einsum("...i,ij,...j->...", beta, quad, beta)
        return np.exp(-0.5 * q + 1j * (beta @ shift))

    return func


def _fock_cf(n):
    def func(beta):
        b2 = np.sum(beta**2, axis=-1)
        return np.exp(-0.5 * b2) * eval_laguerre(n, b2)

    return func


def _cat_cf(alpha, parity):
    a = np.array([alpha.real, alpha.imag])
    overlap = math.exp(-2 * abs(alpha) ** 2)
    norm = 1.0 / (1.0 + parity * overlap)

    def func(beta):
        b2 = np.sum(beta**2, axis=-1)
        re = beta @ a  # Re(alpha* beta)
        im = beta[..., 1] * a[0] - beta[..., 0] * a[1]  # Im(alpha* beta)
        return norm * np.exp(-0.5 * b2) * (np.cos(2 * im) + parity * overlap * np.cosh(2 * re))

    return func


def make_cf(spec: StateSpec) -> CharacteristicFunction:
    if isinstance(spec, Gaussian):
        return CharacteristicFunction(_gaussian_cf(spec.mean, spec.cov), spec.n_modes, "gaussian")
    if isinstance(spec, Fock):
        return CharacteristicFunction(_fock_cf(spec.n), 1, f"fock({spec.n})")
    if isinstance(spec, Cat):
        alpha = complex(spec.alpha)
        return CharacteristicFunction(_cat_cf(alpha, spec.parity), 1, f"cat({alpha}, {spec.parity:+d})")
    raise TypeError(f"unknown state specification {spec!r}")


def evolve_joint_cf(cf_m: CharacteristicFunction, cf_l: CharacteristicFunction, pm: ProtocolMap) -> CharacteristicFunction:
    """Two-mode output characteristic function of a separable input.

    chi'(beta) = chi_M(E_M g) chi_L(E_L g) exp(-beta^T Omega^T V_FF Omega beta / 2)
    with g = Omega^T M^T Omega beta.
    """
    if cf_m.n_modes != 1 or cf_l.n_modes != 1:
        raise ValueError("inputs must be single-mode")
    pull = OMEGA.T @ pm.m.T @ OMEGA
    kernel = OMEGA.T @ pm.v_ff @ OMEGA

    def func(beta):
        g = beta @ pull.T
        noise = np.exp(-0.5 * np.einsum("...i,ij,...j->...", beta, kernel, beta))
        return cf_m(g[..., :2]) * cf_l(g[..., 2:]) * noise

    return CharacteristicFunction(func, 2, f"channel[{cf_m.label} x {cf_l.label}]")


def reduce_to_mechanics(cf2: CharacteristicFunction) -> CharacteristicFunction:
    if cf2.n_modes != 2:
        raise ValueError("expected a two-mode characteristic function")

    def func(beta):
        full = np.concatenate([beta, np.zeros_like(beta)], axis=-1)
        return cf2(full)

    return CharacteristicFunction(func, 1, f"mech[{cf2.label}]")


def transfer(mech: StateSpec, light: StateSpec, pm: ProtocolMap) -> CharacteristicFunction:
    """Mechanical characteristic function after the protocol."""
    return reduce_to_mechanics(evolve_joint_cf(make_cf(mech), make_cf(light), pm))


# --- grids ------------------------------------------------------------------


@dataclass(frozen=True)
class Grid:
    """Square grid x_j = -r_max + j dx, j = 0..n_points-1, dx = 2 r_max / n_points.

    The origin is the sample j = n_points / 2.
    """

    r_max: float = 6.0
    n_points: int = 256

    def __post_init__(self):
        n = self.n_points
        if n < 4 or n & (n - 1):
            raise ValueError("n_points must be a power of two >= 4")
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")

    @property
    def dx(self) -> float:
        return 2 * self.r_max / self.n_points

    @property
    def axis(self) -> np.ndarray:
        return -self.r_max + self.dx * np.arange(self.n_points)

    @property
    def cell_area(self) -> float:
        return self.dx**2

    @property
    def dk(self) -> float:
        return math.pi / self.r_max

    @property
    def k_axis(self) -> np.ndarray:
        n = self.n_points
        return (np.arange(n) - n // 2) * self.dk

    def mesh(self):
        return np.meshgrid(self.axis, self.axis, indexing="ij")

    def coarsen(self) -> "Grid":
        return Grid(self.r_max, self.n_points // 2)


@dataclass
class WignerGrid:
    """Samples values[j, l] = W(x_j, p_l)."""

    grid: Grid
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def norm(self) -> float:
        return float(self.values.sum() * self.grid.cell_area)

    def at_origin(self) -> float:
        c = self.grid.n_points // 2
        return float(self.values[c, c])

    def coarsened(self) -> "WignerGrid":
        return WignerGrid(self.grid.coarsen(), self.values[::2, ::2], dict(self.metadata))


def wigner_grid(cf: CharacteristicFunction, grid: Grid = Grid(), warn: bool = True, padding: int = 2) -> WignerGrid:
    """Fourier-invert a single-mode characteristic function on ``grid``.

    W(x, p) = (1/4pi^2) int chi(b_x, b_p) exp(-i (x b_p - p b_x)) db; with
    k = (b_p, -b_x) this is a plain 2D transform, evaluated by FFT on the
    conjugate k-grid. The alternating signs absorb the offset of the
    symmetric extent. The transform runs over ``padding`` times the requested
    extent at the same spacing and is cropped, which pushes the periodic
    images of W far outside the grid.
    """
    if cf.n_modes != 1:
        raise ValueError("wigner_grid needs a single-mode characteristic function")
    if padding < 1 or padding & (padding - 1):
        raise ValueError("padding must be a power of two")
    work = Grid(grid.r_max * padding, grid.n_points * padding)
    n = work.n_points
    k = work.k_axis
    kx, kp = np.meshgrid(k, k, indexing="ij")
    samples = cf(np.stack([-kp, kx], axis=-1))
    edge = max(
        np.abs(samples[0, :]).max(), np.abs(samples[:, 0]).max(),
        np.abs(samples[-1, :]).max(), np.abs(samples[:, -1]).max(),
    )
    if warn and edge > ALIASING_THRESHOLD:
        warnings.warn(
            f"|chi| = {edge:.2e} at the edge of the beta grid; use a finer grid spacing",
            AliasingWarning,
            stacklevel=2,
        )
    sign = 1 - 2 * ((np.arange(n)[:, None] + np.arange(n)[None, :]) % 2)
    transformed = np.fft.fft2(sign * samples)
    values = (work.dk**2 / (4 * math.pi**2)) * (sign * transformed).real
    lo = (n - grid.n_points) // 2
    crop = values[lo:lo + grid.n_points, lo:lo + grid.n_points]
    return WignerGrid(grid, np.ascontiguousarray(crop), {"source": cf.label, "method": "fft"})


def _fock_wigner(n, x, p):
    r2 = x**2 + p**2
    return (-1) ** n * np.exp(-0.5 * r2) * eval_laguerre(n, r2) / (2 * math.pi)


def _cat_wigner(alpha, parity, x, p):
    a = np.array([alpha.real, alpha.imag])
    overlap = math.exp(-2 * abs(alpha) ** 2)
    r_dot_a = x * a[0] + p * a[1]
    r_dot_wa = x * a[1] - p * a[0]  # r . (varpi alpha)
    # e^{-r.r/2} e^{-2|a|^2} cosh(2 r.a) written as two Gaussians to avoid overflow
    lobes = 0.5 * (
        np.exp(-0.5 * ((x - 2 * a[0]) ** 2 + (p - 2 * a[1]) ** 2))
        + np.exp(-0.5 * ((x + 2 * a[0]) ** 2 + (p + 2 * a[1]) ** 2))
    )
    fringe = np.exp(-0.5 * (x**2 + p**2)) * np.cos(2 * r_dot_wa)
    return (lobes + parity * fringe) / (2 * math.pi * (1 + parity * overlap))


def _gaussian_wigner(mean, cov, x, p):
    dr = np.stack([x - mean[0], p - mean[1]], axis=-1)
    inv = np.linalg.inv(cov)
    q = np.einsum("...i,ij,...j->...", dr, inv, dr)
    return np.exp(-0.5 * q) / (2 * math.pi * math.sqrt(np.linalg.det(cov)))


def analytic_wigner(spec: StateSpec, grid: Grid = Grid()) -> WignerGrid:
    """Closed-form Wigner function sampled on ``grid`` (single-mode specs)."""
    x, p = grid.mesh()
    if isinstance(spec, Gaussian):
        if spec.n_modes != 1:
            raise ValueError("analytic_wigner samples single-mode states only")
        values = _gaussian_wigner(spec.mean, spec.cov, x, p)
    elif isinstance(spec, Fock):
        values = _fock_wigner(spec.n, x, p)
    elif isinstance(spec, Cat):
        values = _cat_wigner(complex(spec.alpha), spec.parity, x, p)
    else:
        raise TypeError(f"unknown state specification {spec!r}")
    return WignerGrid(grid, values, {"source": repr(spec), "method": "analytic"})


# --- metrics ----------------------------------------------------------------


@dataclass(frozen=True)
class FidelityResult:
    fidelity: float
    quadrature_error_estimate: float

    @property
    def infidelity(self) -> float:
        return 1.0 - self.fidelity


def _overlap(w1: WignerGrid, w2: WignerGrid) -> float:
    return float(4 * math.pi * np.sum(w1.values * w2.values) * w1.grid.cell_area)


def fidelity(w1: WignerGrid, w2: WignerGrid) -> FidelityResult:
    """4 pi times the phase-space overlap; exact for a pure target state.

    The error estimate compares against the same sum at half resolution.
    """
    if w1.grid != w2.grid or w1.values.shape != w2.values.shape:
        raise ValueError("fidelity requires identical grids")
    f = _overlap(w1, w2)
    f_half = _overlap(w1.coarsened(), w2.coarsened())
    return FidelityResult(f, abs(f - f_half))


def negativity(w: WignerGrid):
    """(minimum value, integrated negative volume)."""
    return float(w.values.min()), float(np.clip(-w.values, 0, None).sum() * w.grid.cell_area)
