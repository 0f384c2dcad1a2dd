"""Bit-stable JSON and CSV output.

Floats are written with 17 significant digits, keys are sorted, and complex
numbers become ``[re, im]`` pairs, so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def to_plain(obj):
    """numpy scalars/arrays and complex numbers -> plain Python containers."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def _encode(obj, indent, level):
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(k) + ": " + _encode(obj[k], indent, level + 1) for k in sorted(obj)]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[" + pad + ("," + pad).join(_encode(v, indent, level + 1) for v in obj) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2) -> str:
    return _encode(to_plain(obj), indent, 0) + "\n"


def kernel_to_json(matrix) -> dict:
    """An r x r complex matrix as ``{"r": r, "entries": [[[re, im], ...], ...]}``."""
    matrix = np.asarray(matrix, dtype=complex)
    return {"r": matrix.shape[-1], "entries": to_plain(matrix)}


def eigenvalues_csv(eigenvalues) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "eigenvalue"])
    for k, v in enumerate(np.asarray(eigenvalues, dtype=float)):
        writer.writerow([k, format_float(v)])
    return buf.getvalue()


def summary_csv(rows) -> str:
    """Rows of (check, residual, threshold, verdict)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["check", "residual", "threshold", "verdict"])
    for name, res, thr, verdict in rows:
        writer.writerow([name, format_float(res), format_float(thr), verdict])
    return buf.getvalue()
