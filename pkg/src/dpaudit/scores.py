"""The shared score-file format: UTF-8 text, one finite float per line.

Lines starting with '#' and blank lines are ignored on read. Writing uses
repr formatting, so files round-trip exactly and identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ScoreFileError


def read_scores(path) -> np.ndarray:
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                value = float(line)
            except ValueError:
                raise ScoreFileError(
                    f"{path}: line {lineno}: not a number: {line!r}", lineno) from None
            if not math.isfinite(value):
                raise ScoreFileError(
                    f"{path}: line {lineno}: non-finite value {line!r}", lineno)
            values.append(value)
    if not values:
        raise ScoreFileError(f"{path}: no scores found", None)
    return np.asarray(values, dtype=float)


def write_scores(path, values) -> None:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("scores must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError("scores must be finite")
    with open(path, "w", encoding="utf-8") as fh:
        for v in arr:
            fh.write(repr(float(v)))
            fh.write("\n")
