"""Deterministic CSV/JSON writers shared by the experiments."""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import __version__

CONVENTION = "[X,P] = 2i, vacuum variance 1; quadratures ordered (X_M, P_M, X_L, P_L); frequencies in rad/s unless keyed _hz"


def format_number(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return "%.17g" % float(value)


def write_csv(path, columns: Mapping[str, Sequence]) -> Path:
    """Write equal-length columns with 17 significant digits and '\\n' endings."""
    path = Path(path)
    names = list(columns)
    data = [list(columns[name]) for name in names]
    lengths = {len(col) for col in data}
    if len(lengths) > 1:
        raise ValueError(f"columns have unequal lengths {sorted(lengths)}")
    lines = [",".join(names)]
    for row in zip(*data):
        lines.append(",".join(format_number(v) for v in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_csv(path) -> dict:
    lines = Path(path).read_text().splitlines()
    names = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    out = {}
    for i, name in enumerate(names):
        col = [r[i] for r in rows]
        try:
            out[name] = np.array([float(v) for v in col])
        except ValueError:
            out[name] = col
    return out


def _jsonable(obj):
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isinf(value) or math.isnan(value):
            return str(value)
        return value
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return repr(obj)


def metadata(experiment: str, **fields) -> dict:
    return _jsonable({"experiment": experiment, "convention": CONVENTION, "code_version": __version__, **fields})


def write_json(path, payload: Mapping) -> Path:
    path = Path(path)
    with open(path, "w", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_wigner(path, wg, meta: Mapping) -> tuple:
    """Wigner grid as (x, p, w) rows plus a JSON sidecar with the grid settings."""
    x, p = wg.grid.mesh()
    csv_path = write_csv(path, {"x": x.ravel(), "p": p.ravel(), "w": wg.values.ravel()})
    side = dict(meta)
    side.update({"extent": wg.grid.r_max, "resolution": wg.grid.n_points, "state": wg.metadata})
    json_path = write_json(Path(path).with_suffix(".json"), side)
    return csv_path, json_path
