"""Deterministic CSV / JSON emission helpers.

Floats are printed with 17 significant digits so every value round-trips;
identical configs and seeds therefore produce byte-identical files.
"""

from __future__ import annotations

import json
import os

from .errors import CheckFailedError

SPEC_VERSION = "1"

MASS_SLACK = 1e-9


def fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def checked_mass(value: float) -> float:
    """Clamp rounding fuzz; anything beyond slack is a real defect."""
    if value < -MASS_SLACK or value > 1.0 + MASS_SLACK:
        raise CheckFailedError(f"cylinder mass {value} escapes [0, 1]")
    return min(max(value, 0.0), 1.0 + MASS_SLACK)


def write_table(out_dir, name: str, header, rows, output_format: str = "csv") -> str:
    """Write one report table as CSV (default) or JSON records."""
    os.makedirs(out_dir, exist_ok=True)
    if output_format == "json":
        path = os.path.join(out_dir, f"{name}.json")
        records = [dict(zip(header, [_jsonable(v) for v in row])) for row in rows]
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(records, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path
    path = os.path.join(out_dir, f"{name}.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def _jsonable(value):
    if isinstance(value, float):
        return float(fmt(value))
    return value


def write_summary(out_dir, payload: dict, name: str = "summary") -> str:
    """Versioned JSON summary with sorted keys and round-trip floats."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{name}.json")
    body = {"spec_version": SPEC_VERSION, **payload}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_round_trip(body), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _round_trip(obj):
    if isinstance(obj, dict):
        return {k: _round_trip(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_trip(v) for v in obj]
    if isinstance(obj, float):
        return float(fmt(obj))
    if hasattr(obj, "item"):  # numpy scalars
        return _round_trip(obj.item())
    return obj
