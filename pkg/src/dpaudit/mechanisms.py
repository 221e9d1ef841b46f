"""Analytic mechanisms: ground-truth profiles, densities, trade-offs, samplers.

These are the oracles the estimators get tested against. The Gaussian
mechanism has a closed-form profile; the subsampled Gaussian is handled by
integrating its dominating pair (a two-component normal mixture against a
normal) over fine analytic bins and running them through the PLD machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import pld
from .discrete import DiscreteDistribution
from .profiles import PrivacyProfile

SQRT_2PI = math.sqrt(2.0 * math.pi)


def std_normal_cdf(x):
    """Phi(x), evaluated via the complementary error function."""
    return special.ndtr(x)


def std_normal_quantile(p):
    """Phi^{-1}(p)."""
    return special.ndtri(p)


def _std_normal_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / SQRT_2PI


def gaussian_density(mu: float, sigma: float, x):
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return _std_normal_pdf((np.asarray(x, dtype=float) - mu) / sigma) / sigma


def laplace_density(b: float, mu: float, x):
    if b <= 0:
        raise ValueError("scale must be positive")
    return np.exp(-np.abs(np.asarray(x, dtype=float) - mu) / b) / (2.0 * b)


def gaussian_delta(eps, sigma: float, sensitivity: float = 1.0):
    """Tight delta(eps) of the Gaussian mechanism.

    Phi(-eps*sigma/D + D/(2 sigma)) - e^eps * Phi(-eps*sigma/D - D/(2 sigma)),
    with the second term evaluated in log space so large eps stays finite.
    """
    if sigma <= 0 or sensitivity <= 0:
        raise ValueError("sigma and sensitivity must be positive")
    eps = np.asarray(eps, dtype=float)
    a = -eps * sigma / sensitivity + sensitivity / (2.0 * sigma)
    b = -eps * sigma / sensitivity - sensitivity / (2.0 * sigma)
    with np.errstate(over="ignore"):
        out = special.ndtr(a) - np.exp(eps + special.log_ndtr(b))
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def gdp_tradeoff(mu: float, alpha):
    """Gaussian trade-off curve Phi(Phi^{-1}(1 - alpha) - mu)."""
    if mu < 0:
        raise ValueError("mu must be >= 0")
    alpha = np.asarray(alpha, dtype=float)
    if np.any((alpha < 0) | (alpha > 1)):
        raise ValueError("alpha must lie in [0, 1]")
    out = special.ndtr(special.ndtri(1.0 - alpha) - mu)
    return float(out) if out.ndim == 0 else out


def laplace_tradeoff(mu: float, alpha):
    """Trade-off curve of a unit-scale Laplace pair at separation mu.

    Piecewise: 1 - e^mu * a below e^{-mu}/2, then e^{-mu}/(4a) up to 1/2,
    then e^{-mu} * (1 - a).
    """
    if mu < 0:
        raise ValueError("mu must be >= 0")
    alpha = np.asarray(alpha, dtype=float)
    if np.any((alpha < 0) | (alpha > 1)):
        raise ValueError("alpha must lie in [0, 1]")
    lo = math.exp(-mu) / 2.0
    with np.errstate(divide="ignore"):
        middle = math.exp(-mu) / (4.0 * alpha)
    out = np.where(alpha < lo, 1.0 - math.exp(mu) * alpha,
                   np.where(alpha <= 0.5, middle, math.exp(-mu) * (1.0 - alpha)))
    return float(out) if out.ndim == 0 else out


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _cdf_bin_masses(cdf, lo: float, hi: float, width: float) -> DiscreteDistribution:
    k = max(2, int(math.ceil((hi - lo) / width)))
    edges = lo + (hi - lo) * np.arange(k + 1) / k
    cum = cdf(edges)
    masses = np.diff(cum)
    # end bins are open-ended, as in the estimator's binning
    masses[0] += cum[0]
    masses[-1] += 1.0 - cum[-1]
    return DiscreteDistribution.normalized(np.maximum(masses, 0.0))


@dataclass(frozen=True)
class GaussianMechanism:
    """Dominating pair N(0, sigma^2) against N(sensitivity, sigma^2)."""

    sigma: float
    sensitivity: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0 or self.sensitivity <= 0:
            raise ValueError("sigma and sensitivity must be positive")

    def delta(self, eps):
        return gaussian_delta(eps, self.sigma, self.sensitivity)

    def tv(self) -> float:
        return float(self.delta(0.0))

    def profile(self, eps_grid, label: str = "gaussian") -> PrivacyProfile:
        return PrivacyProfile.from_function(self.delta, eps_grid, label=label)

    def sample_pair(self, n: int, seed) -> tuple[np.ndarray, np.ndarray]:
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = _rng(seed)
        return (rng.normal(0.0, self.sigma, n),
                rng.normal(self.sensitivity, self.sigma, n))


@dataclass(frozen=True)
class SubsampledGaussianMechanism:
    """Pair q*N(1, sigma^2) + (1-q)*N(0, sigma^2) against N(0, sigma^2)."""

    q: float
    sigma: float

    def __post_init__(self):
        if not 0 < self.q <= 1:
            raise ValueError("q must lie in (0, 1]")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    def density_p(self, x):
        return (self.q * gaussian_density(1.0, self.sigma, x)
                + (1.0 - self.q) * gaussian_density(0.0, self.sigma, x))

    def density_q(self, x):
        return gaussian_density(0.0, self.sigma, x)

    def cdf_p(self, x):
        x = np.asarray(x, dtype=float)
        return (self.q * special.ndtr((x - 1.0) / self.sigma)
                + (1.0 - self.q) * special.ndtr(x / self.sigma))

    def tv(self, *, nodes: int = 2 ** 16) -> float:
        """TV distance by trapezoid quadrature of [P - Q]_+ ."""
        return self.hs_quadrature(1.0, nodes=nodes)

    def hs_quadrature(self, alpha: float, *, nodes: int = 2 ** 16) -> float:
        """Quadrature of the directed divergence from P to Q at order alpha."""
        lo = min(0.0, 1.0) - 20.0 * self.sigma
        hi = max(0.0, 1.0) + 20.0 * self.sigma
        x = np.linspace(lo, hi, nodes)
        integrand = np.maximum(self.density_p(x) - alpha * self.density_q(x), 0.0)
        return float(np.trapezoid(integrand, x))

    def bin_masses(self, *, width: float = 1e-3,
                   tail_sigmas: float = 12.0) -> tuple[DiscreteDistribution, DiscreteDistribution]:
        """Exact masses of the dominating pair on a shared fine binning."""
        lo = -tail_sigmas * self.sigma
        hi = 1.0 + tail_sigmas * self.sigma
        p = _cdf_bin_masses(self.cdf_p, lo, hi, width)
        q = _cdf_bin_masses(lambda x: special.ndtr(np.asarray(x) / self.sigma), lo, hi, width)
        return p, q

    def profile(self, eps_grid, *, width: float = 1e-3, tail_sigmas: float = 12.0,
                label: str = "subsampled-gaussian") -> PrivacyProfile:
        """Reference profile via the PLD grid on analytically binned densities."""
        p, q = self.bin_masses(width=width, tail_sigmas=tail_sigmas)
        grid = _grid_for_masses(p, q)
        prof = pld.compose_profile(p, q, 1, eps_grid, grid=grid, label=label)
        # exact bin masses, not an estimate: the heuristic flag is reserved
        # for sample-based composition
        return PrivacyProfile(prof.epsilons, prof.deltas, label=label)

    def sample_pair(self, n: int, seed) -> tuple[np.ndarray, np.ndarray]:
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = _rng(seed)
        component = rng.random(n) < self.q
        p_samples = rng.normal(np.where(component, 1.0, 0.0), self.sigma)
        q_samples = rng.normal(0.0, self.sigma, n)
        return p_samples, q_samples


def mixture_density(mech: SubsampledGaussianMechanism, x):
    return mech.density_p(x)


@dataclass(frozen=True)
class LaplaceMechanism:
    """Dominating pair Lap(0, scale) against Lap(l1_sensitivity, scale)."""

    scale: float
    l1_sensitivity: float = 1.0

    def __post_init__(self):
        if self.scale <= 0 or self.l1_sensitivity <= 0:
            raise ValueError("scale and l1_sensitivity must be positive")

    def density_p(self, x):
        return laplace_density(self.scale, 0.0, x)

    def density_q(self, x):
        return laplace_density(self.scale, self.l1_sensitivity, x)

    def sample_pair(self, n: int, seed) -> tuple[np.ndarray, np.ndarray]:
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = _rng(seed)
        return (rng.laplace(0.0, self.scale, n),
                rng.laplace(self.l1_sensitivity, self.scale, n))


def _grid_for_masses(p: DiscreteDistribution, q: DiscreteDistribution,
                     step: float = pld.DEFAULT_GRID[0] * 2 / pld.DEFAULT_GRID[1]) -> tuple[float, int]:
    """Grid sized to the occupied log-ratio range at the default step."""
    pv, qv = p.probs, q.probs
    finite = (pv > 0) & (qv > 0)
    if not np.any(finite):
        return pld.DEFAULT_GRID
    worst = float(np.max(np.abs(np.log(pv[finite]) - np.log(qv[finite]))))
    half_width = max(pld.DEFAULT_GRID[0], 1.125 * worst)
    m = int(2 ** math.ceil(math.log2(2 * half_width / step)))
    return (half_width, m)


def sample_gaussian(n: int, seed, *, mu: float = 0.0, sigma: float = 1.0) -> np.ndarray:
    """n i.i.d. normal draws, deterministic per seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _rng(seed).normal(mu, sigma, n)
