import math

import numpy as np
import pytest

from optoswap import gaussian as gs
from optoswap import oracle
from optoswap.params import TABLE1_4K, derive_quantities, plan_for
from optoswap.phasespace import Cat, Fock, Grid, analytic_wigner, transfer, vacuum, wigner_grid

DIM = 32


def exact_cov(pm, v_in):
    return pm.m @ v_in @ pm.m.T + pm.v_ff


def assert_within_se(mc, expected, k=5.0):
    assert (np.abs(mc.cov - expected) <= k * mc.stderr).all()


# --- Monte-Carlo -----------------------------------------------------------


def test_identity_vacuum():
    mc = oracle.mc_covariance(gs.ProtocolMap.identity(), np.eye(4), oracle.McConfig(seed=1))
    assert mc.n_samples == 1_000_000
    assert_within_se(mc, np.eye(4))


def test_swap_of_thermal_mechanics():
    v_in = gs.initial_state(10).cov
    pm = gs.swap_channel((1, 1, 1), 0.0)
    mc = oracle.mc_covariance(pm, v_in, oracle.McConfig(seed=2))
    assert_within_se(mc, exact_cov(pm, v_in))
    assert (np.abs(mc.cov[:2, :2] - np.eye(2)) <= 5 * mc.stderr[:2, :2]).all()


@pytest.fixture(scope="module")
def table1_channel():
    d = derive_quantities(TABLE1_4K)
    return gs.protocol_map(plan_for(TABLE1_4K, d), d, 1.0), gs.initial_state(d.n_bath).cov


def test_table1_channel(table1_channel):
    pm, v_in = table1_channel
    mc = oracle.mc_covariance(pm, v_in, oracle.McConfig(seed=42))
    assert_within_se(mc, exact_cov(pm, v_in))
    occupancy = (mc.cov[0, 0] + mc.cov[1, 1] - 2) / 4
    assert occupancy == pytest.approx(0.606, abs=0.05)


def test_deterministic_across_runs_and_threads(table1_channel):
    pm, v_in = table1_channel
    cfg = oracle.McConfig(n_samples=200_000, seed=7, batch=20_000)
    a = oracle.mc_covariance(pm, v_in, cfg)
    b = oracle.mc_covariance(pm, v_in, cfg)
    c = oracle.mc_covariance(pm, v_in, cfg, threads=4)
    for other in (b, c):
        assert np.array_equal(a.cov, other.cov)
        assert np.array_equal(a.stderr, other.stderr)
    d = oracle.mc_covariance(pm, v_in, oracle.McConfig(n_samples=200_000, seed=8, batch=20_000))
    assert not np.array_equal(a.cov, d.cov)


def test_uneven_final_batch():
    mc = oracle.mc_covariance(gs.ProtocolMap.identity(), np.eye(4), oracle.McConfig(n_samples=105_000, batch=50_000))
    assert mc.n_samples == 105_000


def test_rejects_non_psd():
    with pytest.raises(ValueError, match="semidefinite"):
        oracle.mc_covariance(gs.ProtocolMap.identity(), -np.eye(4), oracle.McConfig(n_samples=20_000, batch=10_000))
    bad = gs.ProtocolMap(np.eye(4), -np.eye(4))
    with pytest.raises(ValueError, match="noise"):
        oracle.mc_covariance(bad, np.eye(4), oracle.McConfig(n_samples=20_000, batch=10_000))


def test_config_validation():
    with pytest.raises(ValueError):
        oracle.McConfig(n_samples=10, batch=50)
    with pytest.raises(ValueError):
        oracle.FockSimConfig(dim_m=4)


# --- number basis -----------------------------------------------------------------


def test_kets_normalised():
    assert np.linalg.norm(oracle.coherent_ket(1.0 + 0.5j, 40)) == pytest.approx(1.0, abs=1e-10)
    assert np.linalg.norm(oracle.cat_ket(1.0, 40)) == pytest.approx(1.0)
    assert np.linalg.norm(oracle.squeezed_ket(0.2, 1, 40)) == pytest.approx(1.0, abs=1e-10)


def test_coherent_wigner_matches_gaussian():
    rho = np.outer(oracle.coherent_ket(0.8 - 0.4j, 40), oracle.coherent_ket(0.8 - 0.4j, 40).conj())
    w = oracle.density_wigner(rho, Grid(6, 128))
    x, p = Grid(6, 128).mesh()
    expected = np.exp(-((x - 1.6) ** 2 + (p + 0.8) ** 2) / 2) / (2 * math.pi)
    np.testing.assert_allclose(w.values, expected, atol=1e-12)


def test_cat_wigner_matches_closed_form():
    alpha = 1.0 + 0.5j
    rho = np.outer(oracle.cat_ket(alpha, 40), oracle.cat_ket(alpha, 40).conj())
    grid = Grid(6, 128)
    np.testing.assert_allclose(oracle.density_wigner(rho, grid).values, analytic_wigner(Cat(alpha), grid).values, atol=1e-10)


def test_fock_swap_dims24():
    res = oracle.fock_protocol_oracle(oracle.FockSimConfig(dim_m=24, dim_l=24), oracle.fock_ket(0, 24), oracle.fock_ket(1, 24))
    one = np.outer(oracle.fock_ket(1, 24), oracle.fock_ket(1, 24))
    assert oracle.trace_distance(res.rho_m, one) < 1e-6
    assert res.leakage < oracle.LEAKAGE_THRESHOLD


def test_vacuum_swap():
    res = oracle.fock_protocol_oracle(oracle.FockSimConfig(), oracle.fock_ket(0, DIM), oracle.fock_ket(0, DIM))
    assert res.rho_m[0, 0].real >= 1 - 1e-8


def test_squeezed_swap():
    mu2 = math.exp(0.1)
    cfg = oracle.FockSimConfig(chi=(-1 / mu2, -mu2, -1 / mu2))
    res = oracle.fock_protocol_oracle(cfg, oracle.fock_ket(0, DIM), oracle.fock_ket(1, DIM))
    target = oracle.squeezed_ket(-0.1, 1, DIM)
    assert oracle.trace_distance(res.rho_m, np.outer(target, target.conj())) < 1e-4


def test_light_receives_mechanical_state():
    res = oracle.fock_protocol_oracle(oracle.FockSimConfig(), oracle.fock_ket(2, DIM), oracle.fock_ket(0, DIM))
    two = np.outer(oracle.fock_ket(2, DIM), oracle.fock_ket(2, DIM))
    assert oracle.trace_distance(res.rho_l, two) < 1e-6


@pytest.mark.parametrize("light", [Fock(1), Fock(2), Cat(1.0 + 0.5j)], ids=repr)
def test_oracle_agrees_with_phase_space(light):
    grid = Grid(6, 128)
    ket = {Fock: lambda s: oracle.fock_ket(s.n, DIM), Cat: lambda s: oracle.cat_ket(s.alpha, DIM)}[type(light)](light)
    res = oracle.fock_protocol_oracle(oracle.FockSimConfig(), oracle.fock_ket(0, DIM), ket)
    w_ps = wigner_grid(transfer(vacuum(), light, gs.swap_channel((1, 1, 1), 0.0)), grid)
    assert np.abs(oracle.density_wigner(res.rho_m, grid).values - w_ps.values).max() < 1e-4


def test_truncation_error():
    with pytest.raises(oracle.TruncationError):
        oracle.fock_protocol_oracle(oracle.FockSimConfig(dim_m=10, dim_l=10), oracle.fock_ket(0, 10), oracle.fock_ket(5, 10))


def test_trace_distance_padding():
    a = np.diag([1.0, 0.0])
    b = np.diag([0.0, 0.0, 1.0])
    assert oracle.trace_distance(a, b) == pytest.approx(1.0)
