"""JSON and CSV serialisation shared by the CLI."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .divergence import StatePair
from .errors import InvalidParams
from .linop import matrix_from_json, matrix_to_json


def _clean(obj):
    """Make ``obj`` JSON-safe: numpy scalars become Python numbers, non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def fmt_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def dumps_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(v) if isinstance(v, (float, int, np.floating, np.integer)) and not isinstance(v, bool) else v for v in row])
    return buf.getvalue()


def load_json(path: str | Path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidParams(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidParams(f"{path} is not valid JSON: {exc}") from exc


def pair_to_json(pair: StatePair) -> dict:
    return {"rho": matrix_to_json(pair.rho), "sigma": matrix_to_json(pair.sigma)}


def pair_from_json(obj) -> StatePair:
    if not isinstance(obj, dict) or "rho" not in obj or "sigma" not in obj:
        raise InvalidParams('a pair file needs "rho" and "sigma" matrices')
    return StatePair(matrix_from_json(obj["rho"]), matrix_from_json(obj["sigma"]))


def parse_grid(text: str) -> np.ndarray:
    """Parse ``"a:b:n"`` (n evenly spaced points) or a comma-separated list."""
    text = text.strip()
    try:
        if ":" in text:
            a, b, n = text.split(":")
            n = int(n)
            if n < 1:
                raise ValueError("grid needs at least one point")
            return np.linspace(float(a), float(b), n)
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InvalidParams(f"bad grid {text!r}: {exc}") from exc
    if not vals:
        raise InvalidParams("grid is empty")
    return np.array(vals)
