"""Deterministic JSON and CSV writers.

Floats are printed with 15 significant digits so that reruns are byte
identical regardless of how the last bits of a computation came out.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np


def fmt(x: float) -> str:
    x = float(x)
    if x == 0.0:
        return "0"  # folds -0.0
    return f"{x:.15g}"


def clean(obj):
    """Round floats to 15 significant digits and convert numpy types, recursively."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(fmt(x))
    if isinstance(obj, complex):
        return [clean(obj.real), clean(obj.imag)]
    return obj


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(clean(obj), indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def outcome_label(tup) -> str:
    return "-".join(str(int(k)) for k in tup)
