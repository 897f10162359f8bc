"""Log-periodogram regression estimators of the memory parameter d.

GPH regresses log I_n(lambda_k) on R_k = -log[4 sin^2(lambda_k / 2)] and reads
d from the slope.  WBLP and NKK regress the log of a wavelet-domain
periodogram on X_k = -2 log(lambda_k); the slope estimates d - 1 because the
Haar wavelet contributes one vanishing moment, so one is added back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .datagen import TimeSeries
from .errors import EstimationError, ValidationError
from .spectra import (DEFAULT_TOL, Periodogram, check_bandwidth, fourier_frequencies,
                      max_bandwidth, nkk_periodogram, ordinary_periodogram,
                      wavelet_ols_periodogram)
from .wavelet import haar_dwt_finest

METHODS = ("gph", "wblp", "nkk")

# share of frequencies an NKK fit may lose before the estimate is refused
MAX_SKIPPED_FRACTION = 0.2

OPTIMAL_BANDWIDTH_CONSTANT = 0.4634


@dataclass(frozen=True)
class RegressorSet:
    kind: str
    values: np.ndarray

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    @property
    def m(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class MemoryEstimate:
    """Result of one log-periodogram regression.

    For NKK the asymptotic standard error reuses the WBLP constant
    pi^2 / (24 m); no NKK-specific variance is available.
    """

    d_hat: float
    method: str
    m: int
    intercept: float
    se_asymptotic: float
    skipped_k: int = 0

    def to_dict(self) -> dict:
        return {"d_hat": self.d_hat, "method": self.method, "m": self.m,
                "intercept": self.intercept, "se": self.se_asymptotic,
                "skipped_k": self.skipped_k}


@dataclass(frozen=True)
class SpectralCurvature:
    s0: float
    s2: float

    def __post_init__(self):
        if not self.s0 > 0:
            raise ValidationError(f"s(0) must be positive, got {self.s0}", "s0")


class LogRegression(NamedTuple):
    slope: float
    intercept: float
    skipped_k: int
    sxx: float


def gph_regressor(lam):
    """-log[4 sin^2(lam / 2)] at one or many frequencies."""
    return -np.log(4 * np.sin(np.asarray(lam, dtype=float) / 2) ** 2)


def gph_regressors(n: int, m: int) -> RegressorSet:
    """R_k = -log[4 sin^2(lambda_k / 2)], k = 1..m."""
    check_bandwidth(n, m)
    return RegressorSet("gph_R", gph_regressor(fourier_frequencies(n, m)))


def wavelet_regressors(n: int, m: int) -> RegressorSet:
    """X_k = -2 log(lambda_k), k = 1..m."""
    check_bandwidth(n, m)
    return RegressorSet("wavelet_X", -2 * np.log(fourier_frequencies(n, m)))


def centered_slope(x, y) -> tuple[float, float]:
    """OLS slope written as sum y_k (x_k - xbar) / sum (x_k - xbar)^2, and that denominator."""
    dx = x - x.mean()
    sxx = float(dx @ dx)
    return float(y @ dx) / sxx, sxx


def log_periodogram_slope(pgram: Periodogram, regressors: RegressorSet) -> LogRegression:
    """OLS of log-ordinates on the regressors over usable frequencies.

    Frequencies with a non-positive ordinate or a non-converged fit are
    dropped and counted in ``skipped_k``.
    """
    if regressors.m != pgram.m:
        raise ValidationError(
            f"regressor count {regressors.m} does not match periodogram size {pgram.m}", "m")
    use = (pgram.ordinates > 0) & pgram.converged
    if use.sum() < 2:
        raise EstimationError(
            f"only {int(use.sum())} usable frequencies out of {pgram.m}; need at least 2")
    x = regressors.values[use]
    y = np.log(pgram.ordinates[use])
    slope, sxx = centered_slope(x, y)
    intercept = float(y.mean() - slope * x.mean())
    return LogRegression(slope, intercept, int(pgram.m - use.sum()), sxx)


def estimate_from_periodogram(pgram: Periodogram, method: str) -> MemoryEstimate:
    """Shared regression layer; ``pgram`` is already restricted to k = 1..m."""
    if method not in METHODS:
        raise ValidationError(f"method must be one of {', '.join(METHODS)}, got {method!r}",
                              "method")
    m = pgram.m
    if m < 2:
        raise ValidationError("log-periodogram regression needs m >= 2", "m")
    if method == "gph":
        fit = log_periodogram_slope(pgram, gph_regressors(pgram.n, m))
        return MemoryEstimate(fit.slope, method, m, fit.intercept,
                              math.sqrt(math.pi ** 2 / 6 / fit.sxx), fit.skipped_k)
    fit = log_periodogram_slope(pgram, wavelet_regressors(pgram.n, m))
    if method == "nkk" and fit.skipped_k > MAX_SKIPPED_FRACTION * m:
        raise EstimationError(
            f"NKK fit skipped {fit.skipped_k} of {m} frequencies "
            f"(limit {MAX_SKIPPED_FRACTION:.0%}); estimate untrustworthy")
    return MemoryEstimate(fit.slope + 1, method, m, fit.intercept,
                          math.sqrt(math.pi ** 2 / (24 * m)), fit.skipped_k)


def _as_series(y) -> TimeSeries:
    return y if isinstance(y, TimeSeries) else TimeSeries(np.asarray(y, dtype=float))


def estimate_gph(x, m: int, demean: bool = False) -> MemoryEstimate:
    return estimate_from_periodogram(ordinary_periodogram(_as_series(x), m, demean), "gph")


def estimate_wblp(y, m: int) -> MemoryEstimate:
    w = haar_dwt_finest(_as_series(y))
    return estimate_from_periodogram(wavelet_ols_periodogram(w, m), "wblp")


def estimate_nkk(y, m: int, tol: float = DEFAULT_TOL, solver: str = "simplex") -> MemoryEstimate:
    w = haar_dwt_finest(_as_series(y))
    return estimate_from_periodogram(nkk_periodogram(w, m, tol, solver), "nkk")


def estimate(y, method: str, m: int, tol: float = DEFAULT_TOL, **kwargs) -> MemoryEstimate:
    """Dispatch on ``method`` in {gph, wblp, nkk}."""
    if method == "gph":
        return estimate_gph(y, m, **kwargs)
    if method == "wblp":
        return estimate_wblp(y, m)
    if method == "nkk":
        return estimate_nkk(y, m, tol, **kwargs)
    raise ValidationError(f"method must be one of {', '.join(METHODS)}, got {method!r}", "method")


def optimal_bandwidth(curv: SpectralCurvature, n: int) -> int:
    """[0.4634 (s(0)/s''(0))^{2/5} n^{4/5}].

    The ratio enters squared in the bias term, so its magnitude is used.
    """
    if curv.s2 == 0:
        raise ValidationError("s''(0) = 0 makes the optimal bandwidth formula singular", "s2")
    ratio = abs(curv.s0 / curv.s2)
    return int(math.floor(OPTIMAL_BANDWIDTH_CONSTANT * ratio ** 0.4 * _ipow(n, 0.8) + 1e-9))


def _ipow(n: int, e: float) -> float:
    # n ** e can land a few ulps below an exact integer (1024 ** 0.3 -> 7.999...)
    v = float(n) ** e
    r = round(v)
    return float(r) if abs(v - r) < 1e-9 * max(1.0, v) else v


def bandwidth_grid(n: int, lo_exp: float = 0.3, hi_exp: float = 0.8) -> list[int]:
    """Every integer m from [n^lo_exp] to [n^hi_exp], clipped to 2..(n-1)//2."""
    if not 0 < lo_exp < hi_exp < 1:
        raise ValidationError(
            f"need 0 < lo_exp < hi_exp < 1, got ({lo_exp}, {hi_exp})", "lo_exp")
    lo = max(int(math.floor(_ipow(n, lo_exp))), 2)
    hi = min(int(math.floor(_ipow(n, hi_exp))), max_bandwidth(n))
    if hi < lo:
        raise ValidationError(f"empty bandwidth grid for n={n}", "n")
    return list(range(lo, hi + 1))


def bandwidth_from_exponent(n: int, exponent: float) -> int:
    """[n^exponent] clipped to the valid periodogram range."""
    if not 0 < exponent < 1:
        raise ValidationError(f"bandwidth exponent must lie in (0, 1), got {exponent}", "m_exp")
    m = int(math.floor(_ipow(n, exponent)))
    return min(max(m, 2), max_bandwidth(n))


__all__ = [
    "METHODS", "RegressorSet", "MemoryEstimate", "SpectralCurvature", "LogRegression",
    "gph_regressor", "gph_regressors", "wavelet_regressors", "log_periodogram_slope", "estimate_from_periodogram",
    "estimate_gph", "estimate_wblp", "estimate_nkk", "estimate", "optimal_bandwidth",
    "bandwidth_grid", "bandwidth_from_exponent",
]
