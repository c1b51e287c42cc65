"""Command line: ``optoswap <experiment> [flags]`` writes CSV/JSON files.

Exit codes: 0 success, 2 configuration error, 3 verification failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import experiments as ex
from . import gaussian as gs
from .io import metadata, write_csv, write_json, write_wigner
from .params import TABLE1_4K, TABLE1_50MK, ConfigError, PhysicalParams
from .phasespace import Grid

OUT_ENV = "OPTOSWAP_OUT"
EXPERIMENTS = ("table1", "cool-surface", "fock-transfer", "kitten", "tolerance", "heating", "verify")
TOP_KEYS = ("params", "grid", "sweep", "seed", "output_dir")
GRID_KEYS = ("n_points", "extent")
SWEEP_KEYS = {
    "table1": (),
    "cool-surface": ("gamma_range", "n_bath_range", "resolution", "mu", "eta_l"),
    "fock-transfer": ("n", "q_m", "n_bath", "n_initial"),
    "kitten": ("alpha_sq", "xi_range", "xi_steps", "settings"),
    "tolerance": ("epsilon", "n_bath", "eta_l"),
    "heating": ("preset", "finesse", "n_photons", "temperature_k"),
    "verify": ("n_samples",),
}

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY = 0, 2, 3


@dataclass
class ExperimentSpec:
    name: str
    params: dict = field(default_factory=dict)
    grid: Grid = field(default_factory=Grid)
    sweep: dict = field(default_factory=dict)
    seed: int = 42
    output_dir: Path = Path(".")
    threads: int = 1

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.name!r}")
        for key in self.sweep:
            if key not in SWEEP_KEYS[self.name]:
                raise ConfigError(f"unknown sweep key {key!r} for {self.name}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if not isinstance(self.params, dict):
            raise ConfigError("params must be an object")
        self.physical_params(TABLE1_4K)

    def physical_params(self, base: PhysicalParams) -> PhysicalParams:
        if not self.params:
            return base
        merged = base.to_mapping()
        merged.update(self.params)
        try:
            return PhysicalParams.from_mapping(merged)
        except ValueError as exc:
            raise ConfigError(f"params: {exc}") from exc


def read_config(path) -> dict:
    text = Path(path).read_text()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be an object")
    for key in cfg:
        if key not in TOP_KEYS:
            raise ConfigError(f"{path}: unknown key {key!r}")
    for key in cfg.get("grid", {}):
        if key not in GRID_KEYS:
            raise ConfigError(f"{path}: unknown key 'grid.{key}'")
    return cfg


def build_spec(args: argparse.Namespace) -> ExperimentSpec:
    cfg = read_config(args.config) if args.config else {}
    grid_cfg = dict(cfg.get("grid", {}))
    if args.grid_points is not None:
        grid_cfg["n_points"] = args.grid_points
    if args.grid_extent is not None:
        grid_cfg["extent"] = args.grid_extent
    try:
        grid = Grid(r_max=float(grid_cfg.get("extent", 6.0)), n_points=int(grid_cfg.get("n_points", 256)))
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc
    out = args.out or cfg.get("output_dir") or os.environ.get(OUT_ENV) or "."
    seed = args.seed if args.seed is not None else cfg.get("seed", 42)
    return ExperimentSpec(
        name=args.experiment,
        params=cfg.get("params", {}),
        grid=grid,
        sweep=cfg.get("sweep", {}),
        seed=int(seed),
        output_dir=Path(out),
        threads=args.threads,
    )


def _executor(spec: ExperimentSpec) -> Optional[ThreadPoolExecutor]:
    return ThreadPoolExecutor(spec.threads) if spec.threads > 1 else None


def _grid_meta(grid: Grid) -> dict:
    return {"grid_extent": grid.r_max, "grid_points": grid.n_points}


def run_table1(spec):
    rows = [spec.physical_params(TABLE1_4K), spec.physical_params(TABLE1_50MK)]
    result = ex.table1(rows, spec.grid)
    meta = metadata("table1", params=[p.to_mapping() for p in rows], **_grid_meta(spec.grid))
    return [write_json(spec.output_dir / "table1.json", {"metadata": meta, **result})]


def run_cool_surface(spec):
    s = spec.sweep
    kw = dict(
        gamma_range=tuple(s.get("gamma_range", (1e-8, 1e-2))),
        n_bath_range=tuple(s.get("n_bath_range", (1.0, 1e6))),
        resolution=int(s.get("resolution", 64)),
        eta_l=float(s.get("eta_l", 1.0)),
        mu=tuple(s.get("mu", (1.0, 1.0, 1.0))),
    )
    ex_ = _executor(spec)
    try:
        cols = gs.cooling_surface(executor=ex_, **kw)
    finally:
        if ex_:
            ex_.shutdown()
    path = spec.output_dir / "cool_surface.csv"
    write_csv(path, cols)
    meta = metadata("cool-surface", columns=list(cols), gamma_column="Gamma/omega_M", **kw)
    return [path, write_json(path.with_suffix(".json"), meta)]


def run_fock_transfer(spec):
    s = spec.sweep
    ns = s.get("n", [1])
    qs = s.get("q_m", [1e7, 3e6, 1e6])
    n_bath = float(s.get("n_bath", 5e4))
    n_initial = float(s.get("n_initial", ex.N_INITIAL))
    files, summary = [], []
    cases = [(int(n), float(q)) for n in ns for q in qs]
    ex_ = _executor(spec)
    try:
        run = lambda c: ex.fock_transfer(c[0], c[1], n_bath, n_initial, spec.grid)
        results = list(ex_.map(run, cases)) if ex_ else [run(c) for c in cases]
    finally:
        if ex_:
            ex_.shutdown()
    for (n, q), (w, info) in zip(cases, results):
        path = spec.output_dir / f"fock_transfer_n{n}_q{q:.6g}.csv"
        files.extend(write_wigner(path, w, metadata("fock-transfer", **info)))
        summary.append(info)
    files.append(write_json(spec.output_dir / "fock_transfer_summary.json",
                            {"metadata": metadata("fock-transfer", **_grid_meta(spec.grid)), "cases": summary}))
    return files


def _kitten_settings(names):
    known = {"ideal": ex.IDEAL, "lossy": ex.THIN_LINES}
    for name in names:
        if name not in known:
            raise ConfigError(f"unknown kitten setting {name!r}; expected one of {sorted(known)}")
    return [known[n] for n in names]


def run_kitten(spec):
    s = spec.sweep
    lo, hi = s.get("xi_range", (-0.6, 0.2))
    xis = tuple(np.linspace(lo, hi, int(s.get("xi_steps", 81))))
    alpha_sq = tuple(float(a) for a in s.get("alpha_sq", (0.1, 0.25, 0.5, 0.75)))
    settings = _kitten_settings(s.get("settings", ["ideal", "lossy"]))
    ex_ = _executor(spec)
    try:
        cols = ex.kitten_scan(alpha_sq, xis, settings, spec.grid, ex_)
    finally:
        if ex_:
            ex_.shutdown()
    path = spec.output_dir / "kitten.csv"
    write_csv(path, cols)
    meta = metadata(
        "kitten",
        alpha_sq=alpha_sq,
        settings=[vars(st) for st in settings],
        xi_range=[lo, hi],
        xi_steps=len(xis),
        **_grid_meta(spec.grid),
    )
    return [path, write_json(path.with_suffix(".json"), meta)]


def run_tolerance(spec):
    s = spec.sweep
    eps = s.get("epsilon", list(np.geomspace(1e-8, 1e-4, 9)))
    kw = dict(n_bath=float(s.get("n_bath", 5e3)), eta_l=float(s.get("eta_l", 1.0)))
    cols = ex.tolerance_table(eps, **kw)
    path = spec.output_dir / "tolerance.csv"
    write_csv(path, cols)
    return [path, write_json(path.with_suffix(".json"), metadata("tolerance", **kw))]


def run_heating(spec):
    s = spec.sweep
    try:
        result = ex.heating(
            s.get("preset", "sin_microstring"),
            float(s.get("finesse", 100.0)),
            float(s.get("n_photons", 7.28e9)),
            float(s.get("temperature_k", 0.05)),
        )
    except KeyError as exc:
        raise ConfigError(f"unknown heating preset {exc}") from exc
    return [write_json(spec.output_dir / "heating.json", {"metadata": metadata("heating"), **result})]


def run_verify(spec):
    n_samples = int(spec.sweep.get("n_samples", 1_000_000))
    report = ex.verify(spec.seed, spec.grid, n_samples, spec.threads)
    meta = metadata("verify", **_grid_meta(spec.grid))
    path = write_json(spec.output_dir / "verify.json", {"metadata": meta, **report})
    return [path], report["passed"]


RUNNERS = {
    "table1": run_table1,
    "cool-surface": run_cool_surface,
    "fock-transfer": run_fock_transfer,
    "kitten": run_kitten,
    "tolerance": run_tolerance,
    "heating": run_heating,
    "verify": run_verify,
}


def run(spec: ExperimentSpec):
    """Run one experiment; returns (files written, exit status)."""
    spec.output_dir.mkdir(parents=True, exist_ok=True)
    if not os.access(spec.output_dir, os.W_OK):
        raise ConfigError(f"output directory {spec.output_dir} is not writable")
    result = RUNNERS[spec.name](spec)
    if spec.name == "verify":
        files, passed = result
        return files, EXIT_OK if passed else EXIT_VERIFY
    return result, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optoswap", description=__doc__.splitlines()[0])
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="JSON file with params/grid/sweep/seed/output_dir")
    parser.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--grid-points", type=int)
    parser.add_argument("--grid-extent", type=float)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = build_spec(args)
        files, status = run(spec)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TypeError, ValueError) as exc:
        # malformed sweep values surface here
        print(f"config error: invalid value: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for f in files:
        print(f)
    if status == EXIT_VERIFY:
        print("verification failed", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
