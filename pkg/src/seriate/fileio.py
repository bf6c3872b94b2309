"""On-disk formats: matrix CSV, permutation CSV, PGM heatmaps, JSON reports.

CSV is comma-separated with no header and LF line endings; floats are written
with 17 significant digits so a write/read round trip is exact.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import BadShape, ParseError
from .matcore import as_permutation


def format_float(x: float) -> str:
    return "%.17g" % x


def read_matrix_csv(path, header: bool = False) -> np.ndarray:
    rows = []
    width = None
    with open(path, newline="") as fh:
        for line_no, record in enumerate(csv.reader(fh), start=1):
            if header and line_no == 1:
                continue
            if not record or all(not cell.strip() for cell in record):
                continue
            values = []
            for col_no, cell in enumerate(record, start=1):
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(f"not a number: {cell!r}", line_no, col_no) from None
                if not math.isfinite(value):
                    raise ParseError(f"non-finite value {cell!r}", line_no, col_no)
                values.append(value)
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise ParseError(f"expected {width} fields, found {len(values)}", line_no)
            rows.append(values)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def write_matrix_csv(path, M) -> None:
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise BadShape("only 2-D matrices can be written as CSV")
    lines = [",".join(format_float(x) for x in row) for row in M]
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def read_permutation_csv(path) -> np.ndarray:
    values = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(int(text))
            except ValueError:
                raise ParseError(f"not an integer index: {text!r}", line_no, 1) from None
    try:
        return as_permutation(np.array(values, dtype=np.int64))
    except BadShape as exc:
        raise ParseError(f"{path}: {exc}") from None


def write_permutation_csv(path, perm) -> None:
    perm = as_permutation(perm)
    Path(path).write_text("".join(f"{int(i)}\n" for i in perm), newline="\n")


def heatmap_pixels(M) -> np.ndarray:
    """Grey levels ``round(255 * (v - min) / (max - min))``, halves rounded up; constant -> 128."""
    M = np.asarray(M, dtype=np.float64)
    if not np.all(np.isfinite(M)):
        raise BadShape("heatmap needs finite entries")
    lo, hi = M.min(), M.max()
    if hi == lo:
        return np.full(M.shape, 128, dtype=np.int64)
    return np.floor(255.0 * (M - lo) / (hi - lo) + 0.5).astype(np.int64)


def write_heatmap(M, path) -> None:
    """Plain (ASCII, "P2") PGM with one pixel per matrix entry."""
    pixels = heatmap_pixels(M)
    if pixels.ndim != 2:
        raise BadShape("heatmap needs a 2-D matrix")
    rows, cols = pixels.shape
    body = "\n".join(" ".join(str(v) for v in row) for row in pixels)
    Path(path).write_text(f"P2\n{cols} {rows}\n255\n{body}\n", newline="\n")


def read_pgm(path) -> np.ndarray:
    tokens = Path(path).read_text().split()
    if not tokens or tokens[0] != "P2":
        raise ParseError(f"{path}: not a plain PGM file")
    cols, rows, _maxval = (int(t) for t in tokens[1:4])
    return np.array([int(t) for t in tokens[4:]], dtype=np.int64).reshape(rows, cols)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(path, doc) -> None:
    text = json.dumps(doc, indent=2, sort_keys=False, default=_jsonable, allow_nan=False)
    Path(path).write_text(text + "\n", newline="\n")


def dumps_json(doc) -> str:
    return json.dumps(doc, indent=2, default=_jsonable, allow_nan=False)
