import json
import subprocess
import sys

import numpy as np
import pytest

from optoswap import cli
from optoswap.io import CONVENTION, format_number, read_csv, write_csv
from optoswap.phasespace import Fock, Grid, analytic_wigner


def run(tmp_path, *args, config=None):
    argv = list(args) + ["--out", str(tmp_path)]
    if config is not None:
        tmp_path.mkdir(parents=True, exist_ok=True)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(config) if not isinstance(config, str) else config)
        argv += ["--config", str(path)]
    return cli.main(argv)


def load(path):
    return json.loads(path.read_text())


def test_table1(tmp_path):
    assert run(tmp_path, "table1", "--grid-points", "128") == 0
    out = load(tmp_path / "table1.json")
    hot, cold = out["rows"]
    assert hot["n_final"] == pytest.approx(0.606, abs=5e-3)
    assert cold["n_final"] == pytest.approx(0.008, abs=1e-3)
    assert hot["cooperativity"] == pytest.approx(7.72e5, rel=1e-2)
    assert out["fock_transfer"]["infidelity"] == pytest.approx(0.023, abs=5e-3)
    assert CONVENTION in out["metadata"]["convention"]
    assert "[X,P] = 2i, vacuum variance 1" in CONVENTION


def test_param_override(tmp_path):
    assert run(tmp_path, "table1", "--grid-points", "64", config={"params": {"temperature_k": 1.0}}) == 0
    assert load(tmp_path / "table1.json")["rows"][0]["temperature_k"] == 1.0


def test_kitten_small_alpha(tmp_path):
    cfg = {"sweep": {"alpha_sq": [1e-4], "xi_range": [-0.02, 0.02], "xi_steps": 5, "settings": ["ideal"]}}
    assert run(tmp_path, "kitten", "--grid-points", "128", config=cfg) == 0
    cols = read_csv(tmp_path / "kitten.csv")
    real = np.array(cols["alpha_kind"]) == "real"
    best = np.argmin(cols["infidelity"][real])
    assert cols["xi"][real][best] == pytest.approx(0.0, abs=1e-12)
    assert cols["infidelity"][real][best] < 1e-6
    assert set(cols["alpha_kind"]) == {"real", "imag"}
    assert cols["xi_marker"][real][0] == pytest.approx(-1e-4 / 3)


def test_fock_transfer_files(tmp_path):
    cfg = {"sweep": {"n": [1], "q_m": [1e7]}}
    assert run(tmp_path, "fock-transfer", "--grid-points", "64", config=cfg) == 0
    cols = read_csv(tmp_path / "fock_transfer_n1_q1e+07.csv")
    assert list(cols) == ["x", "p", "w"]
    assert len(cols["w"]) == 64 * 64
    side = load(tmp_path / "fock_transfer_n1_q1e+07.json")
    assert side["resolution"] == 64 and side["extent"] == 6.0
    assert side["convention"] == CONVENTION


def test_cool_surface_and_tolerance(tmp_path):
    assert run(tmp_path, "cool-surface", config={"sweep": {"resolution": 8}}) == 0
    cols = read_csv(tmp_path / "cool_surface.csv")
    assert len(cols["n_final"]) == 64 and cols["gamma"][0] == pytest.approx(1e-8)
    assert run(tmp_path, "tolerance", config={"sweep": {"epsilon": [5e-7]}}) == 0
    tol = read_csv(tmp_path / "tolerance.csv")
    assert tol["dn_over_n"][0] == pytest.approx(0.0061, abs=5e-4)


def test_heating(tmp_path):
    assert run(tmp_path, "heating") == 0
    out = load(tmp_path / "heating.json")
    assert 0.02 <= out["relative_heating"] <= 0.5


def test_verify_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["verify", "--seed", "42", "--grid-points", "64"]
    cfg = {"sweep": {"n_samples": 200000}}
    assert run(a, *args, config=cfg) == 0
    assert run(b, *args, "--threads", "3", config=cfg) == 0
    assert (a / "verify.json").read_bytes() == (b / "verify.json").read_bytes()


def test_verify_failure_exit_code(tmp_path, monkeypatch):
    from optoswap import experiments

    def failing(*args, **kwargs):
        return {"checks": [{"name": "x", "value": 1.0, "tolerance": 0.0, "passed": False}], "passed": False}

    monkeypatch.setattr(experiments, "verify", failing)
    assert run(tmp_path, "verify") == cli.EXIT_VERIFY


@pytest.mark.parametrize(
    "config,needle",
    [
        ({"bogus": 1}, "bogus"),
        ({"sweep": {"alpha": 1}}, "alpha"),
        ({"grid": {"size": 3}}, "grid.size"),
        ({"params": {"omega_hz": 3}}, "omega_hz"),
        ({"params": {"eta_l": 2.0}}, "eta_l"),
        ('{"seed": 1,\n "sweep": [}', "line 2"),
    ],
)
def test_config_errors(tmp_path, capsys, config, needle):
    assert run(tmp_path, "kitten", config=config) == cli.EXIT_CONFIG
    assert needle in capsys.readouterr().err


def test_bad_grid_and_seed(tmp_path):
    assert run(tmp_path, "table1", "--grid-points", "7") == cli.EXIT_CONFIG
    assert run(tmp_path, "table1", "--seed", "-1") == cli.EXIT_CONFIG


def test_missing_config(tmp_path):
    assert cli.main(["table1", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    assert cli.main(["heating"]) == 0
    assert (tmp_path / "env" / "heating.json").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "optoswap", "heating", "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "heating.json" in proc.stdout


def test_csv_format(tmp_path):
    path = write_csv(tmp_path / "a.csv", {"a": [0.1, 1e-20], "b": ["x", "y"], "c": [1, 2]})
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.splitlines()[1] == b"0.10000000000000001,x,1"
    assert format_number(1 / 3) == "0.33333333333333331"
    with pytest.raises(ValueError):
        write_csv(tmp_path / "b.csv", {"a": [1], "b": [1, 2]})


def test_csv_round_trip_exact(tmp_path):
    w = analytic_wigner(Fock(1), Grid(6, 32))
    path = write_csv(tmp_path / "w.csv", {"w": w.values.ravel()})
    assert np.array_equal(read_csv(path)["w"], w.values.ravel())


def test_rerun_byte_identical(tmp_path):
    cfg = {"sweep": {"resolution": 6}}
    run(tmp_path / "1", "cool-surface", config=cfg)
    run(tmp_path / "2", "cool-surface", config=cfg)
    assert (tmp_path / "1" / "cool_surface.csv").read_bytes() == (tmp_path / "2" / "cool_surface.csv").read_bytes()


def test_malformed_sweep_value(tmp_path, capsys):
    assert run(tmp_path, "tolerance", config={"sweep": {"n_bath": "lots"}}) == cli.EXIT_CONFIG
    assert "invalid value" in capsys.readouterr().err
