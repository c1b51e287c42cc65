"""Brute-force cross-checks that share no code path with the phase-space
calculus: Monte-Carlo sampling of the Gaussian channel, and the lossless
protocol simulated as unitaries in a truncated number basis.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.special import eval_genlaguerre, gammaln

from .gaussian import ProtocolMap
from .phasespace import Grid, WignerGrid

# Philox is counter-based; streams are reproducible across platforms for a
# given numpy bit-generator version.
BIT_GENERATOR = "Philox"
LEAKAGE_THRESHOLD = 1e-8


class TruncationError(RuntimeError):
    """Population reached the top of the truncated number basis."""


# --- Monte-Carlo covariance -------------------------------------------------


@dataclass(frozen=True)
class McConfig:
    n_samples: int = 1_000_000
    seed: int = 0
    batch: int = 50_000

    def __post_init__(self):
        if self.batch <= 0 or self.n_samples < 2 * self.batch:
            raise ValueError("need at least two batches of samples")


@dataclass(frozen=True)
class McResult:
    cov: np.ndarray
    stderr: np.ndarray
    n_samples: int


def _sqrt_psd(v: np.ndarray, name: str) -> np.ndarray:
    v = 0.5 * (v + v.T)
    w, q = np.linalg.eigh(v)
    scale = max(1.0, np.abs(w).max())
    if w.min() < -1e-12 * scale:
        raise ValueError(f"{name} is not positive semidefinite (min eigenvalue {w.min():.3e})")
    return q * np.sqrt(np.clip(w, 0, None))


def _batch_sums(m, a_in, a_ff, seed_seq, size):
    rng = np.random.Generator(getattr(np.random, BIT_GENERATOR)(seed_seq))
    n = m.shape[0]
    x = rng.standard_normal((size, n)) @ a_in.T
    f = rng.standard_normal((size, n)) @ a_ff.T
    y = x @ m.T + f
    return y.sum(axis=0), y.T @ y


def mc_covariance(pm: ProtocolMap, v_in: np.ndarray, cfg: McConfig = McConfig(), threads: int = 1) -> McResult:
    """Sample covariance of m x + f with x ~ N(0, v_in), f ~ N(0, v_ff).

    Standard errors are delete-one-batch jackknife estimates. Each batch
    draws from its own spawned seed and partial sums are merged in batch
    order, so the result does not depend on ``threads``.
    """
    a_in = _sqrt_psd(np.asarray(v_in, float), "input covariance")
    a_ff = _sqrt_psd(pm.v_ff, "noise covariance")
    sizes = [cfg.batch] * (cfg.n_samples // cfg.batch)
    if cfg.n_samples % cfg.batch:
        sizes.append(cfg.n_samples % cfg.batch)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))
    jobs = [(pm.m, a_in, a_ff, s, k) for s, k in zip(seeds, sizes)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda job: _batch_sums(*job), jobs))
    else:
        parts = [_batch_sums(*job) for job in jobs]

    def cov_from(s1, s2, n):
        mean = s1 / n
        return (s2 - n * np.outer(mean, mean)) / (n - 1)

    total1 = sum(p[0] for p in parts)
    total2 = sum(p[1] for p in parts)
    n = sum(sizes)
    cov = cov_from(total1, total2, n)
    loo = np.array([cov_from(total1 - p[0], total2 - p[1], n - k) for p, k in zip(parts, sizes)])
    g = len(parts)
    stderr = np.sqrt((g - 1) / g * ((loo - loo.mean(axis=0)) ** 2).sum(axis=0))
    return McResult(cov, stderr, n)


# --- truncated number basis ---------------------------------------------------


@dataclass(frozen=True)
class FockSimConfig:
    chi: Sequence[float] = (-1.0, -1.0, -1.0)
    dim_m: int = 32
    dim_l: int = 32

    def __post_init__(self):
        if min(self.dim_m, self.dim_l) < 8:
            raise ValueError("truncation dimensions must be at least 8")


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


def fock_ket(n: int, dim: int) -> np.ndarray:
    ket = np.zeros(dim, complex)
    ket[n] = 1.0
    return ket


def coherent_ket(alpha: complex, dim: int) -> np.ndarray:
    n = np.arange(dim)
    log_amp = -0.5 * abs(alpha) ** 2 - 0.5 * gammaln(n + 1)
    with np.errstate(divide="ignore"):
        ket = np.exp(log_amp) * np.power(complex(alpha), n)
    return ket


def cat_ket(alpha: complex, dim: int, parity: int = -1) -> np.ndarray:
    ket = coherent_ket(alpha, dim) + parity * coherent_ket(-alpha, dim)
    return ket / np.linalg.norm(ket)


def squeezed_ket(xi: complex, n: int, dim: int, work_dim: Optional[int] = None) -> np.ndarray:
    """S(xi)|n> with S = exp((xi* a^2 - xi a^dag^2) / 2), built in a larger space then cut."""
    work = work_dim or 3 * dim
    a = annihilation(work)
    gen = 0.5 * (np.conj(xi) * a @ a - xi * a.T @ a.T)
    ket = expm(gen) @ fock_ket(n, work)
    return ket[:dim]


def _qnd(psi, chi, xm, vm, xl, vl):
    """exp(i chi X_M X_L / 2) applied to psi[m, l]; generates P_M -> P_M + chi X_L."""
    phase = np.exp(0.5j * chi * np.outer(xm, xl))
    return vm @ (phase * (vm.T @ psi @ vl)) @ vl.T


def _rotate(psi):
    """Quarter-period rotation exp(-i pi n / 2) on both modes: X -> P, P -> -X."""
    n_m = np.arange(psi.shape[0])[:, None]
    n_l = np.arange(psi.shape[1])[None, :]
    return psi * np.exp(-0.5j * math.pi * (n_m + n_l))


def _leakage(psi, margin=4):
    p = np.abs(psi) ** 2
    return float(1.0 - p[: psi.shape[0] - margin, : psi.shape[1] - margin].sum())


@dataclass(frozen=True)
class FockSimResult:
    rho_m: np.ndarray
    rho_l: np.ndarray
    leakage: float


def fock_protocol_oracle(cfg: FockSimConfig, mech_ket: np.ndarray, light_ket: np.ndarray) -> FockSimResult:
    """Run QND / rotations / QND / rotations / QND on a pure product input."""
    dm, dl = cfg.dim_m, cfg.dim_l
    mech_ket = np.asarray(mech_ket, complex)[:dm]
    light_ket = np.asarray(light_ket, complex)[:dl]
    xm, vm = np.linalg.eigh(annihilation(dm) + annihilation(dm).T)
    xl, vl = np.linalg.eigh(annihilation(dl) + annihilation(dl).T)
    psi = np.outer(mech_ket, light_ket)
    leak = _leakage(psi)
    chi1, chi2, chi3 = cfg.chi
    for step in (
        lambda s: _qnd(s, chi1, xm, vm, xl, vl),
        _rotate,
        lambda s: _qnd(s, chi2, xm, vm, xl, vl),
        _rotate,
        lambda s: _qnd(s, chi3, xm, vm, xl, vl),
    ):
        psi = step(psi)
        leak = max(leak, _leakage(psi))
    if leak > LEAKAGE_THRESHOLD:
        raise TruncationError(f"truncation leakage {leak:.2e} exceeds {LEAKAGE_THRESHOLD:.0e}; increase dims")
    return FockSimResult(psi @ psi.conj().T, psi.T @ psi.conj(), leak)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    d = max(rho.shape[0], sigma.shape[0])
    a = np.zeros((d, d), complex)
    b = np.zeros((d, d), complex)
    a[: rho.shape[0], : rho.shape[0]] = rho
    b[: sigma.shape[0], : sigma.shape[0]] = sigma
    return float(0.5 * np.abs(np.linalg.eigvalsh(a - b)).sum())


def density_wigner(rho: np.ndarray, grid: Grid = Grid(), cutoff: float = 1e-14) -> WignerGrid:
    """Wigner function of a number-basis density matrix, summed element by
    element with the Laguerre forms of |m><n|."""
    x, p = grid.mesh()
    r2 = x**2 + p**2
    z = x - 1j * p
    gauss = np.exp(-0.5 * r2) / (2 * math.pi)
    w = np.zeros_like(r2)
    dim = rho.shape[0]
    for n in range(dim):
        for m in range(n, dim):
            if abs(rho[m, n]) < cutoff:
                continue
            k = m - n
            coeff = (-1) ** n * math.exp(0.5 * (gammaln(n + 1) - gammaln(m + 1)))
            term = coeff * z**k * gauss * eval_genlaguerre(n, k, r2)
            if k == 0:
                w += (rho[n, n] * term).real
            else:
                w += 2 * (rho[m, n] * term).real
    return WignerGrid(grid, w, {"method": "number-basis"})
