"""CSV and JSON helpers for coefficient vectors, grid functions and reports."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .fourier_core import CoeffVector, GridFunction
from .reports import to_jsonable


def write_json(obj, path=None) -> str:
    text = json.dumps(to_jsonable(obj), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def coeffs_to_csv(c: CoeffVector, path) -> None:
    write_rows(path, ["k", "re", "im"], ([int(k), repr(float(z.real)), repr(float(z.imag))] for k, z in zip(c.freqs, c.coeffs)))


def coeffs_from_csv(path) -> CoeffVector:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    ks = rows[:, 0].astype(int)
    return CoeffVector.from_mapping(dict(zip(ks, rows[:, 1] + 1j * rows[:, 2])), int(np.abs(ks).max()))


def grid_to_csv(f: GridFunction, path) -> None:
    write_rows(path, ["x", "re", "im"], ([repr(float(x)), repr(float(z.real)), repr(float(z.imag))] for x, z in zip(f.x, f.samples)))


def grid_from_csv(path) -> GridFunction:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return GridFunction(rows[:, 1] + 1j * rows[:, 2])
