"""File formats: coefficient JSON and sphere-sample CSV."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import TextIO

import numpy as np

from octaharm.sh4_core import Sh4Coeffs, SphereSampleGrid, as_coeffs


class InputFormatError(ValueError):
    """Input file could not be parsed."""


def coeffs_to_json(a) -> str:
    return json.dumps({"coeffs": [float(c) for c in as_coeffs(a)]})


def coeffs_from_json(text: str) -> Sh4Coeffs:
    try:
        obj = json.loads(text)
        return as_coeffs(obj["coeffs"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"expected {{\"coeffs\": [9 numbers]}}: {exc}") from exc


def read_coeffs(path: str | Path) -> Sh4Coeffs:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputFormatError(str(exc)) from exc
    return coeffs_from_json(text)


def write_coeffs(path: str | Path, a) -> None:
    Path(path).write_text(coeffs_to_json(a) + "\n")


def write_sample_csv(fh: TextIO, grid: SphereSampleGrid) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["theta", "phi", "value"])
    for t, p, v in grid.rows():
        w.writerow([repr(t), repr(p), repr(v)])


def read_sample_csv(fh: TextIO) -> np.ndarray:
    """Rows ``(theta, phi, value)`` as an ``(n, 3)`` array."""
    reader = csv.reader(fh)
    header = next(reader)
    if header != ["theta", "phi", "value"]:
        raise InputFormatError(f"unexpected header {header}")
    return np.array([[float(x) for x in row] for row in reader])
