"""Frequentist confidence machinery for the histogram estimates.

The multinomial TV radius gives a simultaneous bound on how far an empirical
distribution can sit from its truth; propagating one radius per side through
the hockey-stick divergence yields two-sided (epsilon, delta) intervals.
Clopper-Pearson intervals back the threshold-attack baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special


@dataclass(frozen=True)
class TvRadius:
    """High-probability bound on TV(empirical, true) for one sample."""

    tau: float
    confidence: float
    n: int
    k: int

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("tau must be >= 0")
        if not 0 < self.confidence < 1:
            raise ValueError("confidence must lie in (0, 1)")


def canonne_radius(n: int, k: int, failure_prob: float) -> TvRadius:
    """Smallest TV radius the multinomial bound certifies at the given budget.

    tau = max( sqrt(k/n), sqrt((2/n) * ln(2/failure_prob)) ).
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    if not 0 < failure_prob < 1:
        raise ValueError("failure_prob must lie in (0, 1)")
    tau = max(math.sqrt(k / n), math.sqrt(2.0 * math.log(2.0 / failure_prob) / n))
    return TvRadius(tau, 1.0 - failure_prob, n, k)


def required_samples(k: int, tau: float, failure_prob: float) -> int:
    """Samples needed for the multinomial bound to certify radius tau."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 < failure_prob < 1:
        raise ValueError("failure_prob must lie in (0, 1)")
    return int(math.ceil(max(k / tau ** 2,
                             2.0 * math.log(2.0 / failure_prob) / tau ** 2)))


def hs_interval(delta_hat: float, eps: float, tau_p: TvRadius,
                tau_q: TvRadius) -> tuple[float, float]:
    """Two-sided bound on the true divergence given per-side TV radii.

    One radius bounds both sides of the estimate, so the slack is
    (1 + e^eps) * max(tau_p, tau_q) in each direction; the caller splits the
    failure budget across the two samples.
    """
    if not 0 <= delta_hat <= 1:
        raise ValueError("delta_hat must lie in [0, 1]")
    tau = max(tau_p.tau, tau_q.tau)
    alpha = math.exp(eps) if eps <= 700 else math.inf
    slack = (1.0 + alpha) * tau if tau > 0 else 0.0
    return (max(0.0, delta_hat - slack), min(1.0, delta_hat + slack))


def clopper_pearson(successes: int, trials: int, confidence: float) -> tuple[float, float]:
    """Exact binomial confidence interval via Beta quantiles."""
    if trials < 1 or successes < 0 or successes > trials:
        raise ValueError(f"invalid counts: {successes}/{trials}")
    if not 0 < confidence < 1:
        raise ValueError("confidence must lie in (0, 1)")
    half = (1.0 - confidence) / 2.0
    lo = 0.0 if successes == 0 else float(
        special.betaincinv(successes, trials - successes + 1, half))
    hi = 1.0 if successes == trials else float(
        special.betaincinv(successes + 1, trials - successes, 1.0 - half))
    return (lo, hi)


def sigma_interval_from_tv(tv_interval: tuple[float, float],
                           forward_map: Callable[[float], float],
                           bracket: tuple[float, float] = (1e-3, 1e3),
                           rel_tol: float = 1e-9) -> tuple[float, float]:
    """Invert a strictly decreasing TV(sigma) map at both interval endpoints.

    Larger TV maps to smaller sigma, so the returned (sigma_lo, sigma_hi)
    comes from the upper and lower TV endpoints respectively.
    """
    tv_lo, tv_hi = tv_interval
    if tv_lo > tv_hi:
        raise ValueError("tv_interval must be ordered (lo, hi)")

    def invert(target: float) -> float:
        lo, hi = bracket
        f_lo, f_hi = forward_map(lo), forward_map(hi)
        # decreasing map: f(lo) is the largest reachable value
        if not (f_hi <= target <= f_lo):
            raise ValueError(
                f"TV value {target!r} outside the range of forward_map over {bracket}")
        while hi - lo > rel_tol * max(1.0, abs(hi)):
            mid = 0.5 * (lo + hi)
            if forward_map(mid) >= target:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    return (invert(tv_hi), invert(tv_lo))
