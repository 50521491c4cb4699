"""Run-configuration parsing and validation for the CLI."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .system import DEFAULT_BUDGET, MatrixSystem

CONSTRUCTIONS = ("cone", "kusuoka", "tensor-k", "projective")
OUTPUT_FORMATS = ("csv", "json")

DEFAULTS = {
    "t": 1.0,
    "construction": "cone",
    "k": 2,
    "grid_resolution": 1024,
    "L": 6,
    "N": 4,
    "n_max": 10,
    "theta": 0.5,
    "seed": 42,
    "budget": DEFAULT_BUDGET,
    "output_format": "csv",
}


@dataclass
class RunConfig:
    """Validated configuration for one CLI run."""

    matrices: np.ndarray          # (M, d, d)
    dim: int
    alphabet_size: int
    t: float
    construction: str
    k: int
    grid_resolution: int
    scan_length: int              # L
    gap: int                      # N
    n_max: int
    epsilon: float
    theta: float
    seed: int
    budget: int
    output_format: str

    def system(self) -> MatrixSystem:
        return MatrixSystem(self.matrices.copy())


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _get_number(doc, key, default, low=None, integer=False):
    value = doc.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(key, f"expected a number, got {value!r}")
    if integer and int(value) != value:
        _fail(key, f"expected an integer, got {value!r}")
    if low is not None and value < low:
        _fail(key, f"must be >= {low}, got {value}")
    return int(value) if integer else float(value)


def _parse_matrices(doc) -> np.ndarray:
    if "matrices" not in doc:
        _fail("matrices", "required field is missing")
    raw = doc["matrices"]
    if not isinstance(raw, list) or not raw:
        _fail("matrices", "expected a non-empty list of matrices")
    dim_hint = doc.get("d")
    mats = []
    for i, entry in enumerate(raw):
        path = f"matrices[{i}]"
        if not isinstance(entry, list) or not entry:
            _fail(path, "expected a nested or flat row-major array")
        arr = np.asarray(entry, dtype=float)
        if arr.ndim == 1:
            # flat row-major data; the side must be declared or square
            side = dim_hint if dim_hint else math.isqrt(arr.size)
            if side * side != arr.size:
                _fail(path, f"flat array of length {arr.size} is not square")
            arr = arr.reshape(side, side)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            _fail(path, f"expected a square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            _fail(path, "entries must be finite numbers")
        mats.append(arr)
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        _fail("matrices", f"matrices have mixed dimensions {sorted(dims)}")
    return np.stack(mats)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON configuration document.

    Defaults: R=1024, L=6, N=4, n_max=10, seed=42, budget=2e7, t=1,
    construction "cone", k=2, epsilon=min(1, t), theta=0.5, format "csv".
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"<document>: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        _fail("<document>", "top level must be an object")

    matrices = _parse_matrices(doc)
    M, d = matrices.shape[0], matrices.shape[1]
    if M < 2:
        _fail("matrices", f"need at least 2 matrices, got {M}")
    if "d" in doc and int(doc["d"]) != d:
        _fail("d", f"declared d={doc['d']} but matrices are {d}x{d}")
    if "M" in doc and int(doc["M"]) != M:
        _fail("M", f"declared M={doc['M']} but {M} matrices were given")
    for entry in doc:
        if entry not in {"matrices", "d", "M", "t", "construction", "k",
                         "grid_resolution", "L", "N", "n_max", "epsilon",
                         "theta", "seed", "budget", "output_format"}:
            _fail(entry, "unknown field")

    t = _get_number(doc, "t", DEFAULTS["t"], low=0.0)
    construction = doc.get("construction", DEFAULTS["construction"])
    if construction not in CONSTRUCTIONS:
        _fail("construction", f"must be one of {CONSTRUCTIONS}, got {construction!r}")
    k = _get_number(doc, "k", DEFAULTS["k"], low=1, integer=True)
    if construction in ("kusuoka", "tensor-k") and k % 2 != 0:
        _fail("k", f"tensor-power constructions require an even k, got {k}")
    if construction == "kusuoka" and k != 2:
        _fail("k", f"the kusuoka construction is the k=2 lift, got k={k}")

    out_format = doc.get("output_format", DEFAULTS["output_format"])
    if out_format not in OUTPUT_FORMATS:
        _fail("output_format", f"must be one of {OUTPUT_FORMATS}")

    t_bar = min(1.0, t) if t > 0 else 1.0
    epsilon = _get_number(doc, "epsilon", t_bar, low=0.0)
    if epsilon <= 0 or epsilon > t_bar + 1e-12:
        _fail("epsilon", f"must lie in (0, min(1, t)], got {epsilon}")

    return RunConfig(
        matrices=matrices,
        dim=d,
        alphabet_size=M,
        t=t,
        construction=construction,
        k=int(k),
        grid_resolution=_get_number(doc, "grid_resolution",
                                    DEFAULTS["grid_resolution"], low=2, integer=True),
        scan_length=_get_number(doc, "L", DEFAULTS["L"], low=1, integer=True),
        gap=_get_number(doc, "N", DEFAULTS["N"], low=1, integer=True),
        n_max=_get_number(doc, "n_max", DEFAULTS["n_max"], low=2, integer=True),
        epsilon=epsilon,
        theta=_get_number(doc, "theta", DEFAULTS["theta"], low=0.0),
        seed=_get_number(doc, "seed", DEFAULTS["seed"], low=0, integer=True),
        budget=_get_number(doc, "budget", DEFAULTS["budget"], low=1, integer=True),
        output_format=out_format,
    )


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
