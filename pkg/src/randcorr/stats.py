"""Summaries and Kolmogorov-Smirnov tests for checking distributional claims."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SummaryStats",
    "KsResult",
    "summarize",
    "kolmogorov_sf",
    "ks_two_sample",
    "ks_one_sample",
    "clt_transform",
    "normal_cdf",
    "normality_check",
]

_MIN_KS = 8
_erfc = np.vectorize(math.erfc, otypes=[float])


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    variance: float
    min: float
    max: float

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    @property
    def sem(self) -> float:
        return math.sqrt(self.variance / self.n)


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    n_effective: float


def summarize(samples) -> SummaryStats:
    """Mean and unbiased variance with exactly rounded sums (``math.fsum``)."""
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n < 2:
        raise ValueError("summarize needs at least two samples")
    mean = math.fsum(x) / n
    dev = x - mean
    # second term corrects the residual error in the mean
    var = (math.fsum(dev * dev) - math.fsum(dev) ** 2 / n) / (n - 1)
    mean = min(max(mean, float(x.min())), float(x.max()))
    return SummaryStats(n, mean, max(var, 0.0), float(x.min()), float(x.max()))


def kolmogorov_sf(x: float) -> float:
    """``P(K > x)`` for the limiting Kolmogorov distribution.

    Uses ``2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2)`` (100 terms) for
    ``x >= 1``, and the Jacobi-theta form of the CDF below that, where the
    alternating series converges poorly.
    """
    if x <= 0:
        return 1.0
    if x < 1.0:
        s = 0.0
        for k in range(1, 101):
            term = math.exp(-((2 * k - 1) ** 2) * math.pi**2 / (8.0 * x * x))
            s += term
            if term < 1e-300:
                break
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / x * s))
    s = 0.0
    for k in range(1, 101):
        s += (-1) ** (k - 1) * math.exp(-2.0 * k * k * x * x)
    return min(1.0, max(0.0, 2.0 * s))


def _check_size(x, name):
    x = np.asarray(x, dtype=float).ravel()
    if x.size < _MIN_KS:
        raise ValueError(f"{name} needs at least {_MIN_KS} observations, got {x.size}")
    if np.any(np.isnan(x)):
        raise ValueError(f"{name} contains NaN")
    return x


def ks_two_sample(x, y) -> KsResult:
    """Two-sample KS test with the asymptotic p-value.

    The statistic is the exact sup-distance between the two empirical CDFs,
    evaluated at every point of the pooled sample.
    """
    x = np.sort(_check_size(x, "x"))
    y = np.sort(_check_size(y, "y"))
    pooled = np.concatenate([x, y])
    cdf_x = np.searchsorted(x, pooled, side="right") / x.size
    cdf_y = np.searchsorted(y, pooled, side="right") / y.size
    stat = float(np.max(np.abs(cdf_x - cdf_y)))
    n_eff = x.size * y.size / (x.size + y.size)
    return KsResult(stat, kolmogorov_sf(math.sqrt(n_eff) * stat), n_eff)


def ks_one_sample(x, cdf) -> KsResult:
    """One-sample KS test of ``x`` against a continuous CDF.

    ``cdf`` must accept an array and return an array of probabilities.
    """
    x = np.sort(_check_size(x, "x"))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    if f.shape != x.shape:
        raise ValueError("cdf must return one value per observation")
    i = np.arange(1, n + 1)
    stat = float(max(np.max(i / n - f), np.max(f - (i - 1) / n), 0.0))
    return KsResult(stat, kolmogorov_sf(math.sqrt(n) * stat), float(n))


def clt_transform(samples, d) -> np.ndarray:
    """Centre and scale log-determinants: ``(y + d) / sqrt(ln d)``."""
    if int(d) != d or d < 3:
        raise ValueError(f"clt_transform needs d >= 3, got {d}")
    y = np.asarray(samples, dtype=float)
    return (y + d) / math.sqrt(math.log(d))


def normal_cdf(x):
    """Standard normal CDF."""
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(-float(x) / math.sqrt(2.0))
    return 0.5 * _erfc(-np.asarray(x, dtype=float) / math.sqrt(2.0))


def normality_check(z, rng) -> tuple[SummaryStats, KsResult]:
    """Two-sample KS of ``z`` against a synthetic normal batch of the same size.

    The reference batch has the empirical mean and standard deviation of
    ``z``; ``rng`` is a numpy ``Generator`` or an ``RngStream``.
    """
    s = summarize(z)
    gen = getattr(rng, "generator", rng)
    ref = gen.normal(s.mean, s.sd, size=s.n)
    return s, ks_two_sample(z, ref)
