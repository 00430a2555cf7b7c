"""Confidence-interval helpers shared by the Monte Carlo estimators."""

from __future__ import annotations

import math

import numpy as np

Z95 = 1.959963984540054  # two-sided 95% normal quantile


def wilson_interval(hits: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = hits / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))
    return (center - half, center + half)


def wilson_halfwidth(hits: int, trials: int, z: float = Z95) -> float:
    lo, hi = wilson_interval(hits, trials, z)
    return 0.5 * (hi - lo)


def mean_ci_halfwidth(samples: np.ndarray, z: float = Z95) -> float:
    """Normal-approximation half-width for a sample mean (sample SD)."""
    samples = np.asarray(samples, dtype=np.float64)
    k = len(samples)
    if k < 2:
        return math.inf
    return z * float(samples.std(ddof=1)) / math.sqrt(k)


def variance_se(samples: np.ndarray) -> float:
    """Standard error of the unbiased sample variance.

    Var(s^2) = (mu4 - (K-3)/(K-1) * s^4) / K with mu4 the central fourth
    moment; estimated by plugging in sample moments.
    """
    samples = np.asarray(samples, dtype=np.float64)
    k = len(samples)
    if k < 4:
        return math.inf
    centered = samples - samples.mean()
    mu4 = float((centered**4).mean())
    s2 = float(samples.var(ddof=1))
    var_s2 = (mu4 - (k - 3) / (k - 1) * s2 * s2) / k
    return math.sqrt(max(var_s2, 0.0))


def binomial_se(p_hat: float, trials: int) -> float:
    if trials <= 0:
        raise ValueError("trials must be positive")
    return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / trials)
