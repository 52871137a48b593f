"""Deterministic output writers.

Floats are written with 17 significant digits in scientific notation, which
round-trips doubles exactly. CSV files are ASCII, comma-separated, with a
header row and LF endings. Non-finite values are written as ``inf``/``nan``
in CSV and as ``null`` in JSON.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return format(x, ".16e")


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else (str(v) if isinstance(v, (int, np.integer)) else fmt(v)) for v in row))
    path.write_bytes(("\n".join(lines) + "\n").encode("ascii"))
    return path


def _encode(value, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if value is None or isinstance(value, bool):
        return json.dumps(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return fmt(value) if math.isfinite(value) else "null"
    if isinstance(value, complex):
        return _encode({"re": value.real, "im": value.imag}, indent, level)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        if len(value) == 0:
            return "[]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(value).__name__}")


def dumps_record(record: dict) -> str:
    """JSON text with fixed 17-digit floats and complex values as
    ``{"re": ..., "im": ...}``."""
    return _encode(record, 2, 0) + "\n"


def write_record(path, record: dict) -> Path:
    path = Path(path)
    path.write_bytes(dumps_record(record).encode("ascii"))
    return path
