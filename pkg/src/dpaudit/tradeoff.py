"""Trade-off curves and the profile-to-curve conversion.

A trade-off curve maps the type-I error alpha to the least achievable
type-II error beta. Valid curves are convex, non-increasing, and sit below
1 - alpha; ``validate`` reports violations instead of raising so that
hand-built diagnostics remain possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .mechanisms import std_normal_quantile
from .profiles import PrivacyProfile, _format_sig

_VALIDATE_SLACK = 1e-9
MIN_ALPHA_NODES = 512


@dataclass(frozen=True)
class TradeoffCurve:
    """Piecewise-linear curve alpha -> beta on [0, 1]."""

    alphas: np.ndarray
    betas: np.ndarray
    label: str = ""

    def __post_init__(self):
        a = np.array(self.alphas, dtype=float)
        b = np.array(self.betas, dtype=float)
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "betas", b)
        if a.ndim != 1 or a.size < 2 or a.shape != b.shape:
            raise ValueError("curve needs matching 1-D node arrays with >= 2 points")
        if np.any(np.diff(a) <= 0):
            raise ValueError("alphas must be strictly increasing")
        if a[0] < -_VALIDATE_SLACK or a[-1] > 1 + _VALIDATE_SLACK:
            raise ValueError("alphas must lie in [0, 1]")
        if np.any(b < -_VALIDATE_SLACK) or np.any(b > 1 + _VALIDATE_SLACK):
            raise ValueError("betas must lie in [0, 1]")

    def evaluate(self, alpha):
        """Piecewise-linear interpolation, clamped to the end nodes."""
        return np.interp(alpha, self.alphas, self.betas)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("alpha,beta\n")
            for a, b in zip(self.alphas, self.betas):
                fh.write(f"{_format_sig(a)},{_format_sig(b)}\n")

    @classmethod
    def from_csv(cls, path, label: str = "") -> "TradeoffCurve":
        alphas, betas = [], []
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != "alpha,beta":
                raise ValueError(f"expected header 'alpha,beta', got {header!r}")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                a_str, b_str = line.split(",")
                alphas.append(float(a_str))
                betas.append(float(b_str))
        return cls(np.asarray(alphas), np.asarray(betas), label=label)


def validate(curve: TradeoffCurve) -> list[str]:
    """Check the trade-off invariants; returns human-readable violations."""
    violations = []
    a, b = curve.alphas, curve.betas
    if np.any(np.diff(b) > _VALIDATE_SLACK):
        j = int(np.argmax(np.diff(b) > _VALIDATE_SLACK))
        violations.append(f"beta increases between alpha={a[j]:.6g} and alpha={a[j+1]:.6g}")
    slopes = np.diff(b) / np.diff(a)
    if slopes.size >= 2 and np.any(np.diff(slopes) < -_VALIDATE_SLACK):
        j = int(np.argmax(np.diff(slopes) < -_VALIDATE_SLACK))
        violations.append(f"convexity violated around alpha={a[j+1]:.6g}")
    over = b - (1.0 - a)
    if np.any(over > _VALIDATE_SLACK):
        j = int(np.argmax(over > _VALIDATE_SLACK))
        violations.append(f"beta exceeds 1 - alpha at alpha={a[j]:.6g}")
    return violations


def f_eps_delta(eps: float, delta: float, alpha):
    """The (eps, delta)-DP trade-off curve max{0, 1-d-e^eps a, e^-eps (1-d-a)}."""
    alpha = np.asarray(alpha, dtype=float)
    if np.any((alpha < 0) | (alpha > 1)):
        raise ValueError("alpha must lie in [0, 1]")
    if not 0 <= delta <= 1:
        raise ValueError("delta must lie in [0, 1]")
    out = np.maximum(0.0, np.maximum(1.0 - delta - math.exp(eps) * alpha,
                                     math.exp(-eps) * (1.0 - delta - alpha)))
    return float(out) if out.ndim == 0 else out


def profile_to_tradeoff(profile: PrivacyProfile, delta_target: float = 1e-3,
                        n_points: int = 200, *, n_alpha: int | None = None,
                        strict: bool = True, label: str = "") -> TradeoffCurve:
    """Convert a privacy profile to a trade-off curve.

    For n_points linearly spaced delta' in [delta_target, 1 - delta_target],
    invert the profile to eps' and take the upper envelope of the
    corresponding f_{eps',delta'} curves on a uniform alpha grid.

    With ``strict`` (the default) a delta' that exceeds the profile's largest
    tabulated value raises; otherwise unreachable delta' values are skipped,
    which only lowers the envelope. Inversion ties resolve to the smallest
    eps.

    Args:
        profile: tabulated (or function-backed) privacy profile.
        delta_target: half-margin of the delta' sweep; must lie in (0, 0.5).
        n_points: number of delta' values.
        n_alpha: alpha-grid size; defaults to max(n_points, 512).
        strict: raise on out-of-range delta' instead of skipping.
        label: label for the returned curve.

    Returns:
        The enveloping TradeoffCurve.
    """
    if not 0 < delta_target < 0.5:
        raise ValueError("delta_target must lie in (0, 0.5)")
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    delta_grid = np.linspace(delta_target, 1.0 - delta_target, n_points)
    pairs = []
    for dp in delta_grid:
        eps_hat = profile.epsilon_at(dp)
        if eps_hat is None:
            if strict:
                raise ValueError(
                    f"profile not invertible at delta'={dp:.6g}: the tabulated curve "
                    f"never descends below {float(profile.deltas[-1]):.6g}")
            continue
        # any pair is also certified at a larger eps, and no distribution
        # pair realizes delta < 1 - e^eps; flooring keeps every line below
        # 1 - alpha, so the envelope stays a valid trade-off curve
        pairs.append((max(eps_hat, math.log1p(-dp)), dp))
    if not pairs:
        raise ValueError("no delta' value was invertible on this profile")
    alphas = np.linspace(0.0, 1.0, n_alpha if n_alpha is not None else
                         max(n_points, MIN_ALPHA_NODES))
    best = np.zeros_like(alphas)
    for eps_hat, dp in pairs:
        cand = np.maximum(1.0 - dp - math.exp(eps_hat) * alphas,
                          math.exp(-eps_hat) * (1.0 - dp - alphas))
        np.maximum(best, cand, out=best)
    best = np.maximum(best, 0.0)
    return TradeoffCurve(alphas, best, label=label)


def mu_lower_from_rates(alpha_bar: float, beta_bar: float) -> float:
    """Empirical GDP lower bound Phi^{-1}(1 - alpha') - Phi^{-1}(beta')."""
    if not (0 < alpha_bar < 1 and 0 < beta_bar < 1):
        raise ValueError("rates at 0 or 1 give an infinite bound; need rates in (0, 1)")
    return float(std_normal_quantile(1.0 - alpha_bar) - std_normal_quantile(beta_bar))
