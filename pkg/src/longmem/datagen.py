"""Series generators: truncated fractional noise, ARFIMA(1, d, 0) and LMSV.

Every generator draws from a counter-based Philox stream keyed by
``(seed, replication, stream)`` so that replication ``r`` of an experiment can
be regenerated in isolation and in any order.  The latent process always uses
stream 0 and the LMSV observation noise stream 1, which keeps the latent path
identical whether or not the observation noise is requested.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import ValidationError

STREAM_LATENT = 0
STREAM_NOISE = 1

NOISE_KINDS = ("gaussian", "student-t")


def make_rng(seed: int, replication: int = 0, stream: int = 0) -> np.random.Generator:
    """Independent generator for one (seed, replication, stream) triple."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(replication), int(stream)))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class TimeSeries:
    """Ordered real samples with a provenance label."""

    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValidationError("time series must be one-dimensional", "values")
        if not np.all(np.isfinite(v)):
            bad = int(np.flatnonzero(~np.isfinite(v))[0])
            raise ValidationError(f"non-finite sample at index {bad}", "values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self):
        return self.values.size

    def checksum(self) -> str:
        """SHA-256 of the raw float64 bytes; equal checksums mean identical samples."""
        return hashlib.sha256(self.values.tobytes()).hexdigest()


@dataclass(frozen=True)
class GenConfig:
    """Parameters of one simulated path.

    ``burn_in`` extra samples are generated and discarded from the front;
    the default of 0 reproduces the plain truncated-series generator.
    ``noise`` selects the LMSV observation noise; Student-t draws are
    rescaled to unit variance.
    """

    n: int
    d: float = 0.0
    phi: float = 0.0
    sigma_eps2: float = 1.0
    sigma: float = 1.0
    seed: int = 0
    replication: int = 0
    burn_in: int = 0
    noise: str = "gaussian"
    df: float = 5.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValidationError(f"n must be an integer >= 2, got {self.n}", "n")
        if not abs(self.phi) < 1:
            raise ValidationError(
                f"|phi| must be < 1 for a stationary AR(1) factor, got {self.phi}", "phi")
        if not self.sigma_eps2 > 0:
            raise ValidationError(f"sigma_eps2 must be positive, got {self.sigma_eps2}",
                                  "sigma_eps2")
        if not self.sigma > 0:
            raise ValidationError(f"sigma must be positive, got {self.sigma}", "sigma")
        if self.burn_in < 0:
            raise ValidationError("burn_in must be >= 0", "burn_in")
        if self.noise not in NOISE_KINDS:
            raise ValidationError(
                f"noise must be one of {', '.join(NOISE_KINDS)}, got {self.noise!r}", "noise")
        if self.noise == "student-t" and not self.df > 2:
            raise ValidationError("student-t noise needs df > 2 for unit variance", "df")


def pochhammer_weight(d: float, k: int) -> float:
    """Return (d)_k / k!, the k-th fractional integration weight."""
    if k < 0:
        raise ValidationError(f"k must be >= 0, got {k}", "k")
    c = 1.0
    for j in range(1, k + 1):
        c *= (d + j - 1) / j
    return c


def pochhammer_weights(d: float, n: int) -> np.ndarray:
    """Weights (d)_k / k! for k = 0..n-1 via the ratio recurrence."""
    if n < 1:
        return np.empty(0)
    ratios = (d + np.arange(n - 1)) / np.arange(1, n)
    return np.concatenate(([1.0], np.cumprod(ratios)))


def fractional_filter(d: float, u) -> np.ndarray:
    """Apply the truncated series Z_t = sum_{k<t} (d)_k/k! u_{t-k} to ``u``."""
    u = np.asarray(u, dtype=float)
    if d == 0:
        return u.copy()
    return np.convolve(u, pochhammer_weights(d, u.size))[: u.size]


def ar1_filter(x, phi: float) -> np.ndarray:
    """Z_t = phi * Z_{t-1} + x_t started from zero."""
    x = np.asarray(x, dtype=float)
    if phi == 0:
        return x.copy()
    return lfilter([1.0], [1.0, -phi], x)


def fractional_noise(d: float, n: int, seed: int = 0, replication: int = 0) -> TimeSeries:
    """Truncated fractional noise driven by standard Gaussian innovations."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}", "n")
    u = make_rng(seed, replication, STREAM_LATENT).standard_normal(n)
    return TimeSeries(fractional_filter(d, u), label=f"fractional(d={d})")


def _latent(cfg: GenConfig) -> np.ndarray:
    total = cfg.n + cfg.burn_in
    u = make_rng(cfg.seed, cfg.replication, STREAM_LATENT).standard_normal(total)
    if cfg.sigma_eps2 != 1.0:
        u = u * np.sqrt(cfg.sigma_eps2)
    z = ar1_filter(fractional_filter(cfg.d, u), cfg.phi)
    return z[cfg.burn_in:]


def arfima_1_d_0(cfg: GenConfig) -> TimeSeries:
    """ARFIMA(1, d, 0) path: truncated fractional noise passed through (1 - phi L)^{-1}."""
    return TimeSeries(_latent(cfg), label=f"arfima(d={cfg.d},phi={cfg.phi})")


def observation_noise(cfg: GenConfig) -> np.ndarray:
    """The i.i.d. zero-mean, unit-variance LMSV noise e_t for ``cfg``."""
    rng = make_rng(cfg.seed, cfg.replication, STREAM_NOISE)
    total = cfg.n + cfg.burn_in
    if cfg.noise == "gaussian":
        e = rng.standard_normal(total)
    else:
        e = rng.standard_t(cfg.df, total) * np.sqrt((cfg.df - 2) / cfg.df)
    return e[cfg.burn_in:]


def lmsv_from_components(z, e, sigma: float = 1.0) -> np.ndarray:
    """X_t = sigma * exp(Z_t / 2) * e_t."""
    return sigma * np.exp(np.asarray(z, dtype=float) / 2) * np.asarray(e, dtype=float)


def lmsv_series(cfg: GenConfig) -> TimeSeries:
    """Long-memory stochastic volatility returns with ARFIMA(1, d, 0) log-volatility."""
    if not 0 <= cfg.d < 0.5:
        raise ValidationError(f"LMSV needs d in [0, 0.5), got {cfg.d}", "d")
    x = lmsv_from_components(_latent(cfg), observation_noise(cfg), cfg.sigma)
    return TimeSeries(x, label=f"lmsv(d={cfg.d},phi={cfg.phi})")


def log_squared(x: TimeSeries) -> TimeSeries:
    """Y_t = log(X_t^2); zero samples are rejected by index."""
    v = x.values if isinstance(x, TimeSeries) else np.asarray(x, dtype=float)
    zeros = np.flatnonzero(v == 0)
    if zeros.size:
        raise ValidationError(
            f"log(X_t^2) is singular: zero sample at index {int(zeros[0])}", "values")
    label = getattr(x, "label", "")
    return TimeSeries(2.0 * np.log(np.abs(v)), label=f"logsq({label})" if label else "logsq")
