"""Privacy profiles: the curve eps -> delta(eps) for a mechanism or estimate.

A profile is tabulated on an ascending eps grid with non-increasing delta
values. Profiles built from closed-form mechanisms may also carry the exact
callable, which is used in preference to interpolation where available.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

_MONOTONE_SLACK = 1e-9


def _format_sig(x: float) -> str:
    # canonical 12-significant-digit formatting; survives a parse/format
    # round trip byte for byte (12 < 15 decimal digits of float64)
    return format(float(x), ".12g")


@dataclass(frozen=True)
class PrivacyProfile:
    """Tabulated eps -> delta curve, optionally backed by an exact function."""

    epsilons: np.ndarray
    deltas: np.ndarray
    fn: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)
    heuristic: bool = False
    label: str = ""

    def __post_init__(self):
        eps = np.array(self.epsilons, dtype=float)
        del_ = np.array(self.deltas, dtype=float)
        eps.setflags(write=False)
        del_.setflags(write=False)
        object.__setattr__(self, "epsilons", eps)
        object.__setattr__(self, "deltas", del_)
        if eps.ndim != 1 or eps.size < 2 or eps.shape != del_.shape:
            raise ValueError("profile needs matching 1-D grids with at least 2 points")
        if np.any(np.diff(eps) <= 0):
            raise ValueError("epsilons must be strictly increasing")
        if np.any(del_ < -_MONOTONE_SLACK) or np.any(del_ > 1 + _MONOTONE_SLACK):
            raise ValueError("deltas must lie in [0, 1]")
        if np.any(np.diff(del_) > _MONOTONE_SLACK):
            raise ValueError("deltas must be non-increasing in eps")

    @classmethod
    def from_function(cls, fn: Callable, eps_grid, *, heuristic: bool = False,
                      label: str = "") -> "PrivacyProfile":
        eps = np.asarray(eps_grid, dtype=float)
        return cls(eps, np.asarray(fn(eps), dtype=float), fn=fn,
                   heuristic=heuristic, label=label)

    def delta_at(self, eps):
        """delta(eps); exact when a callable backs the profile, else interpolated."""
        if self.fn is not None:
            return self.fn(np.asarray(eps, dtype=float))
        return np.interp(eps, self.epsilons, self.deltas)

    def epsilon_at(self, delta_target: float) -> float | None:
        """Smallest tabulated eps with delta(eps) <= delta_target.

        A target at or above the left-end delta clamps to the smallest
        tabulated eps (the profile certifies that point, so the claim is
        valid if loose); a target the curve never descends to returns None.
        Flat stretches resolve to the smallest eps achieving the target.
        """
        d = self.deltas
        if delta_target >= d[0]:
            return float(self.epsilons[0])
        if delta_target < d[-1]:
            return None
        j = int(np.argmax(d <= delta_target))
        if j == 0:
            return float(self.epsilons[0])
        d0, d1 = d[j - 1], d[j]
        if d0 == d1:
            return float(self.epsilons[j])
        t = (d0 - delta_target) / (d0 - d1)
        return float(self.epsilons[j - 1] + t * (self.epsilons[j] - self.epsilons[j - 1]))

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("epsilon,delta\n")
            for e, d in zip(self.epsilons, self.deltas):
                fh.write(f"{_format_sig(e)},{_format_sig(d)}\n")

    @classmethod
    def from_csv(cls, path, *, heuristic: bool = False, label: str = "") -> "PrivacyProfile":
        eps, deltas = [], []
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != "epsilon,delta":
                raise ValueError(f"expected header 'epsilon,delta', got {header!r}")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                e_str, d_str = line.split(",")
                eps.append(float(e_str))
                deltas.append(float(d_str))
        return cls(np.asarray(eps), np.asarray(deltas), heuristic=heuristic, label=label)
