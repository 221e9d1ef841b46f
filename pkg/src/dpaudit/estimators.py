"""Audit pipelines and baselines built on the histogram estimator.

``histogram_audit`` is the end-to-end pipeline: bin the two score samples,
tabulate the symmetric divergence over an eps grid, attach multinomial
confidence bounds, convert per-delta targets to epsilon estimates, and emit
trade-off curves. The remaining functions are the baselines and diagnostics:
the threshold attack, the exposure metric, TV-based single-parameter
inversion, and the Gaussian-profile (GDP) fit.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .confidence import TvRadius, canonne_radius
from .errors import FitError
from .histogram import (BinningSpec, HistogramEstimate, auto_spec,
                        build_histograms, estimate_profile)
from .mechanisms import gaussian_delta
from .profiles import PrivacyProfile, _format_sig
from .tradeoff import TradeoffCurve, profile_to_tradeoff

DEFAULT_EPS_GRID = (-10.0, 10.0, 2001)
DEFAULT_DELTA_TARGETS = (0.01, 0.05, 0.1)


@dataclass(frozen=True)
class AuditConfig:
    """Knobs for ``histogram_audit``; defaults follow the auditing recipes."""

    binning_mode: str = "scott-gaussian"
    bins: int | None = None
    bin_width: float | None = None
    delta_targets: tuple[float, ...] = DEFAULT_DELTA_TARGETS
    confidence: float = 0.99
    eps_grid: tuple[float, float, int] = DEFAULT_EPS_GRID
    curve_delta_target: float = 1e-3
    curve_points: int = 200
    with_curves: bool = True

    def __post_init__(self):
        if not 0 < self.confidence < 1:
            raise ValueError("confidence must lie in (0, 1)")
        lo, hi, m = self.eps_grid
        if not (lo < hi and int(m) >= 2):
            raise ValueError("eps_grid must be (lo < hi, m >= 2)")
        for d in self.delta_targets:
            if not 0 < d < 1:
                raise ValueError("delta targets must lie in (0, 1)")

    def eps_values(self) -> np.ndarray:
        lo, hi, m = self.eps_grid
        return np.linspace(lo, hi, int(m))


@dataclass(frozen=True)
class EpsilonEstimate:
    """Point estimate and confidence lower bound of eps at one delta target."""

    delta: float
    point: float | None
    lower: float | None


@dataclass(frozen=True)
class SigmaEstimate:
    """Single-parameter (noise scale) estimate recovered from the TV distance."""

    tv: float
    tv_interval: tuple[float, float]
    sigma: float
    sigma_interval: tuple[float, float]
    confidence: float


@dataclass(frozen=True)
class AuditReport:
    """Everything an audit produced, serializable to a stable JSON layout."""

    method: str
    n: int
    confidence: float
    binning: BinningSpec
    epsilons: tuple[EpsilonEstimate, ...]
    profile: PrivacyProfile
    profile_lower: PrivacyProfile
    tradeoff_estimate: TradeoffCurve | None = None
    tradeoff_bound: TradeoffCurve | None = None
    sigma: SigmaEstimate | None = None

    def to_json_dict(self) -> dict:
        def curve_csv(curve: TradeoffCurve | None) -> str | None:
            if curve is None:
                return None
            buf = io.StringIO()
            buf.write("alpha,beta\n")
            for a, b in zip(curve.alphas, curve.betas):
                buf.write(f"{_format_sig(a)},{_format_sig(b)}\n")
            return buf.getvalue()

        doc = {
            "method": self.method,
            "n": self.n,
            "confidence": self.confidence,
            "binning": {"a": self.binning.a, "b": self.binning.b,
                        "k": self.binning.k, "h": self.binning.h},
            "eps": [{"delta": e.delta, "point": e.point, "lower": e.lower}
                    for e in self.epsilons],
            "profile": [{"epsilon": float(e), "delta": float(d)}
                        for e, d in zip(self.profile.epsilons, self.profile.deltas)],
            "heuristic": self.profile.heuristic,
            "curves": {"estimate": curve_csv(self.tradeoff_estimate),
                       "bound": curve_csv(self.tradeoff_bound)},
        }
        if self.sigma is not None:
            doc["sigma_estimation"] = {
                "tv": self.sigma.tv,
                "tv_interval": list(self.sigma.tv_interval),
                "sigma": self.sigma.sigma,
                "sigma_interval": list(self.sigma.sigma_interval),
                "confidence": self.sigma.confidence,
            }
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def _epsilon_for_target(profile: PrivacyProfile, delta_target: float) -> float | None:
    """Reported eps at a delta target: 0 when the curve is already below the
    target at eps=0, the crossing otherwise, None when the grid never gets
    below the target."""
    if float(profile.delta_at(0.0)) <= delta_target:
        return 0.0
    eps_hat = profile.epsilon_at(delta_target)
    if eps_hat is None:
        return None
    return max(0.0, eps_hat)


def _lower_profile(point: PrivacyProfile, tau: float) -> PrivacyProfile:
    deltas = np.maximum(point.deltas - (1.0 + np.exp(np.minimum(point.epsilons, 700.0))) * tau, 0.0)
    deltas = np.maximum.accumulate(deltas[::-1])[::-1]
    return PrivacyProfile(point.epsilons, np.clip(deltas, 0.0, 1.0),
                          label=point.label + "-lower")


def spec_from_config(samples_p, samples_q, config: AuditConfig) -> BinningSpec:
    return auto_spec(samples_p, samples_q, config.binning_mode,
                     k=config.bins, width=config.bin_width)


def histogram_audit(samples_p, samples_q, config: AuditConfig | None = None, *,
                    method: str = "histogram",
                    sigma_forward_map: Callable[[float], float] | None = None) -> AuditReport:
    """Run the full histogram audit on two equal-length score samples.

    Args:
        samples_p: scores drawn under the "in" world.
        samples_q: scores drawn under the "out" world.
        config: audit knobs; defaults are reasonable for 1e4..1e6 samples.
        method: tag recorded in the report.
        sigma_forward_map: optional strictly decreasing sigma -> TV map; when
            given, a single-parameter sigma estimate with its confidence
            interval is attached to the report.

    Returns:
        An AuditReport with the point profile, the confidence-lower-bounded
        profile, per-delta-target epsilon estimates, and trade-off curves.
    """
    config = config or AuditConfig()
    spec = spec_from_config(samples_p, samples_q, config)
    hist = build_histograms(samples_p, samples_q, spec)
    return audit_from_histogram(hist, config, method=method,
                                sigma_forward_map=sigma_forward_map)


def audit_from_histogram(hist: HistogramEstimate, config: AuditConfig | None = None, *,
                         method: str = "histogram",
                         sigma_forward_map: Callable[[float], float] | None = None) -> AuditReport:
    config = config or AuditConfig()
    eps_values = config.eps_values()
    profile = estimate_profile(hist, eps_values, symmetric=True, label=method)

    # union bound: each side gets half the failure budget, one radius covers both
    failure = 1.0 - config.confidence
    radius = canonne_radius(hist.n, hist.spec.k, failure / 2.0)
    lower = _lower_profile(profile, radius.tau)

    estimates = []
    for target in config.delta_targets:
        estimates.append(EpsilonEstimate(
            delta=target,
            point=_epsilon_for_target(profile, target),
            lower=_epsilon_for_target(lower, target),
        ))

    curve_est = curve_bound = None
    if config.with_curves:
        curve_est = profile_to_tradeoff(profile, config.curve_delta_target,
                                        config.curve_points, strict=False,
                                        label=method)
        # converting the lower-bounded profile; see the report caveat: this
        # conversion is not itself a certified upper bound
        curve_bound = profile_to_tradeoff(lower, config.curve_delta_target,
                                          config.curve_points, strict=False,
                                          label=method + "-bound")

    sigma_block = None
    if sigma_forward_map is not None:
        sigma_block = estimate_sigma(hist, config.confidence, sigma_forward_map)

    return AuditReport(method=method, n=hist.n, confidence=config.confidence,
                       binning=hist.spec, epsilons=tuple(estimates),
                       profile=profile, profile_lower=lower,
                       tradeoff_estimate=curve_est, tradeoff_bound=curve_bound,
                       sigma=sigma_block)


def estimate_sigma(hist: HistogramEstimate, confidence: float,
                   forward_map: Callable[[float], float],
                   bracket: tuple[float, float] = (1e-3, 1e3)) -> SigmaEstimate:
    """Single-parameter recovery: TV estimate +/- the multinomial radius,
    mapped through a strictly decreasing sigma -> TV curve."""
    from .confidence import sigma_interval_from_tv
    from .discrete import tv_distance

    tv_hat = tv_distance(hist.p_hat, hist.q_hat)
    radius = canonne_radius(hist.n, hist.spec.k, 1.0 - confidence)
    tv_lo = max(0.0, tv_hat - radius.tau)
    tv_hi = min(1.0, tv_hat + radius.tau)
    sigma_hat = invert_monotone(forward_map, tv_hat, bracket)
    sigma_interval = sigma_interval_from_tv((tv_lo, tv_hi), forward_map, bracket)
    return SigmaEstimate(tv=tv_hat, tv_interval=(tv_lo, tv_hi), sigma=sigma_hat,
                         sigma_interval=sigma_interval, confidence=confidence)


@dataclass(frozen=True)
class ThresholdEstimate:
    """Threshold-attack epsilon with its degenerate outcomes flagged.

    ``status`` is "ok" (epsilon holds the estimate), "undefined" (both
    numerators non-positive) or "unbounded" (an empty cell produced an
    infinite ratio); degenerate outcomes never masquerade as numbers.
    """

    epsilon: float | None
    status: str = "ok"


def threshold_epsilon(samples_p, samples_q, threshold: float,
                      delta: float = 0.0) -> ThresholdEstimate:
    """Membership-threshold baseline: scores below the threshold vote "in".

    Returns max{ ln((TPR - delta)/FPR), ln((TNR - delta)/FNR) } with ties
    going to the negative class (strict '<' defines membership).
    """
    sp = np.asarray(samples_p, dtype=float)
    sq = np.asarray(samples_q, dtype=float)
    if sp.size == 0 or sq.size == 0:
        raise ValueError("samples must be non-empty")
    if not 0 <= delta < 1:
        raise ValueError("delta must lie in [0, 1)")
    tpr = float(np.mean(sp < threshold))
    fpr = float(np.mean(sq < threshold))
    fnr, tnr = 1.0 - tpr, 1.0 - fpr

    candidates = []
    unbounded = False
    for num, den in ((tpr - delta, fpr), (tnr - delta, fnr)):
        if num <= 0:
            continue
        if den == 0:
            unbounded = True
        else:
            candidates.append(math.log(num / den))
    if unbounded:
        return ThresholdEstimate(None, "unbounded")
    if not candidates:
        return ThresholdEstimate(None, "undefined")
    return ThresholdEstimate(max(candidates), "ok")


def two_bin_histogram(samples_p, samples_q, threshold: float) -> HistogramEstimate:
    """The two-bin histogram whose divergence the threshold attack measures."""
    spec = BinningSpec(threshold - 1.0, threshold + 1.0, 2)
    return build_histograms(samples_p, samples_q, spec)


def exposure(canary_losses, reference_losses) -> np.ndarray:
    """Rank-based exposure log2(n) - log2(rank) of each canary loss.

    rank = 1 + #{references strictly smaller}, capped at n so the score is
    finite and non-negative.
    """
    canaries = np.asarray(canary_losses, dtype=float)
    refs = np.sort(np.asarray(reference_losses, dtype=float))
    if refs.size == 0:
        raise ValueError("reference losses must be non-empty")
    n = refs.size
    smaller = np.searchsorted(refs, canaries, side="left")
    ranks = np.minimum(smaller + 1, n)
    return np.log2(n) - np.log2(ranks)


def invert_monotone(forward: Callable[[float], float], target: float,
                    bracket: tuple[float, float], *, tol: float = 1e-10,
                    max_iter: int = 200) -> float:
    """Bisection inverse of a strictly monotone scalar function."""
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError("bracket must be ordered (lo, hi)")
    f_lo, f_hi = forward(lo), forward(hi)
    increasing = f_hi >= f_lo
    if not (min(f_lo, f_hi) <= target <= max(f_lo, f_hi)):
        raise ValueError(f"target {target!r} outside forward range "
                         f"[{min(f_lo, f_hi)!r}, {max(f_lo, f_hi)!r}] over bracket {bracket}")
    x = lo
    for _ in range(max_iter):
        x = 0.5 * (lo + hi)
        value = forward(x)
        if abs(value - target) <= tol:
            return x
        if (value < target) == increasing:
            lo = x
        else:
            hi = x
    return x


def fit_mu_gdp(profile: PrivacyProfile, eps_range: tuple[float, float], *,
               n_grid: int = 2000, sigma_bracket: tuple[float, float] = (0.01, 100.0),
               rel_tol: float = 1e-5) -> float:
    """Fit the GDP parameter: tightest Gaussian profile dominating this one.

    Finds the largest noise scale sigma whose Gaussian profile stays above
    the given profile on the eps window (at that sigma the two curves touch
    tangentially) and returns mu = 1/sigma. The feasibility margin is
    monotone in sigma, so the search is a plain bisection over the bracket.

    Raises FitError when the profile is not non-increasing or when even the
    noisiest Gaussian in the bracket fails to dominate.
    """
    lo_eps, hi_eps = eps_range
    if not (np.isfinite(lo_eps) and np.isfinite(hi_eps) and lo_eps < hi_eps):
        raise ValueError("eps_range must be finite with lo < hi")
    if np.any(np.diff(profile.deltas) > 1e-9):
        raise FitError("profile is not non-increasing; cannot fit a GDP parameter")
    grid = np.linspace(lo_eps, hi_eps, n_grid)
    reference = np.asarray(profile.delta_at(grid), dtype=float)

    def dominates(sigma: float) -> bool:
        return bool(np.all(gaussian_delta(grid, sigma) >= reference - 1e-12))

    lo_sig, hi_sig = sigma_bracket
    if not dominates(lo_sig):
        raise FitError(f"no Gaussian profile with sigma >= {lo_sig} dominates the input")
    if dominates(hi_sig):
        return 1.0 / hi_sig
    while hi_sig / lo_sig > 1.0 + rel_tol:
        mid = math.sqrt(lo_sig * hi_sig)
        if dominates(mid):
            lo_sig = mid
        else:
            hi_sig = mid
    return 1.0 / lo_sig


def f_alpha_sensitivity(sigma: float, alpha):
    """d/d sigma of the Gaussian pair divergence at order alpha.

    (-ln a - 1/(2 s^2)) phi(-s ln a + 1/(2s)) - a (-ln a + 1/(2 s^2)) phi(-s ln a - 1/(2s)).
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha <= 0):
        raise ValueError("alpha must be positive")
    log_a = np.log(alpha)
    inv2s2 = 1.0 / (2.0 * sigma * sigma)
    inv2s = 1.0 / (2.0 * sigma)

    def phi(x):
        return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)

    out = ((-log_a - inv2s2) * phi(-sigma * log_a + inv2s)
           - alpha * (-log_a + inv2s2) * phi(-sigma * log_a - inv2s))
    return float(out) if out.ndim == 0 else out
