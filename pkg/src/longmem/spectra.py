"""Periodograms at the Fourier frequencies lambda_k = 2 pi k / n, k = 1..m.

Three kinds share one container:

* ``ordinary``: |sum_t x_t e^{i t lambda_k}|^2 / (2 pi n), via the FFT.
* ``wavelet_ols``: (n / 8 pi) ||beta_k||^2 with beta_k the least-squares fit
  of the wavelet coefficients on [cos(lambda_k q), sin(lambda_k q)].
* ``nkk_lad``: the same with the least-absolute-deviations fit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datagen import TimeSeries
from .errors import ValidationError
from .lad import lad_batch
from .wavelet import WaveletCoefficients

KINDS = ("ordinary", "wavelet_ols", "nkk_lad")

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Periodogram:
    freqs: np.ndarray
    ordinates: np.ndarray
    kind: str
    n: int
    converged: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown periodogram kind {self.kind!r}", "kind")
        if np.any(self.ordinates < 0):
            raise ValidationError("periodogram ordinates must be nonnegative")
        if self.converged is None:
            object.__setattr__(self, "converged", np.ones(self.ordinates.size, dtype=bool))

    @property
    def m(self) -> int:
        return self.ordinates.size

    @property
    def k(self) -> np.ndarray:
        return np.arange(1, self.m + 1)

    def truncate(self, m: int) -> "Periodogram":
        """The first ``m`` frequencies (the fits at each k are independent of m)."""
        if not 1 <= m <= self.m:
            raise ValidationError(f"cannot truncate a {self.m}-frequency periodogram to {m}", "m")
        return Periodogram(self.freqs[:m], self.ordinates[:m], self.kind, self.n,
                           self.converged[:m])


@dataclass(frozen=True)
class HarmonicFit:
    """Coefficients (a, b) on [cos(lambda_k q), sin(lambda_k q)]."""

    beta: np.ndarray
    objective: float
    iterations: int = 0
    converged: bool = True


def fourier_frequencies(n: int, m: int) -> np.ndarray:
    return 2 * np.pi * np.arange(1, m + 1) / n


def max_bandwidth(n: int) -> int:
    """Largest m with every lambda_k strictly inside (0, pi)."""
    return (n - 1) // 2


def check_bandwidth(n: int, m: int) -> None:
    if int(m) != m or not 1 <= m <= max_bandwidth(n):
        raise ValidationError(
            f"bandwidth m={m} out of range 1..{max_bandwidth(n)} for n={n}", "m")


def _check_k(n: int, k: int) -> None:
    if int(k) != k or not 1 <= k < n / 2:
        raise ValidationError(
            f"frequency index k={k} must satisfy 1 <= k < n/2 = {n / 2:g}; "
            "the sine regressor vanishes at k = 0 and k = n/2", "k")


def _values(x):
    if isinstance(x, TimeSeries):
        return x.values
    if isinstance(x, WaveletCoefficients):
        return x.coeffs
    return np.asarray(x, dtype=float)


def harmonic_regressors(n: int, ks) -> tuple[np.ndarray, np.ndarray]:
    """cos(lambda_k q) and sin(lambda_k q), shape (len(ks), n)."""
    q = np.arange(n)
    # reduce k*q mod n first so the angle stays in [0, 2 pi) for large n
    phase = 2 * np.pi * (np.outer(np.asarray(ks), q) % n) / n
    return np.cos(phase), np.sin(phase)


def ordinary_periodogram(x, m: int, demean: bool = False) -> Periodogram:
    v = _values(x)
    n = v.size
    check_bandwidth(n, m)
    if demean:
        v = v - v.mean()
    dft = np.fft.fft(v)[1:m + 1]
    ords = (dft.real ** 2 + dft.imag ** 2) / (2 * np.pi * n)
    return Periodogram(fourier_frequencies(n, m), ords, "ordinary", n)


def ols_harmonic_fit(w, k: int) -> HarmonicFit:
    v = _values(w)
    n = v.size
    _check_k(n, k)
    c, s = harmonic_regressors(n, [k])
    beta = np.array([2 / n * (v * c[0]).sum(), 2 / n * (v * s[0]).sum()])
    resid = v - beta[0] * c[0] - beta[1] * s[0]
    return HarmonicFit(beta, float((resid ** 2).sum()))


def lad_harmonic_fit(w, k: int, tol: float = DEFAULT_TOL, method: str = "simplex") -> HarmonicFit:
    v = _values(w)
    n = v.size
    _check_k(n, k)
    c, s = harmonic_regressors(n, [k])
    res = lad_batch(c, s, v, method=method, tol=tol)
    return HarmonicFit(res.beta[0], float(res.objective[0]), int(res.iterations[0]),
                       bool(res.converged[0]))


def wavelet_ols_periodogram(w, m: int) -> Periodogram:
    """(n/8 pi) ||beta_ols||^2, computed through the FFT.

    At a Fourier frequency the least-squares coefficients are
    (2/n)(Re, Im) of the DFT, so this equals the ordinary periodogram of the
    coefficient sequence.
    """
    v = _values(w)
    n = v.size
    check_bandwidth(n, m)
    dft = np.fft.fft(v)[1:m + 1]
    a, b = 2 / n * dft.real, -2 / n * dft.imag
    ords = n / (8 * np.pi) * (a * a + b * b)
    return Periodogram(fourier_frequencies(n, m), ords, "wavelet_ols", n)


def nkk_periodogram(w, m: int, tol: float = DEFAULT_TOL, method: str = "simplex") -> Periodogram:
    """(n/8 pi) ||beta_lad||^2 with per-frequency convergence flags."""
    v = _values(w)
    n = v.size
    check_bandwidth(n, m)
    c, s = harmonic_regressors(n, np.arange(1, m + 1))
    res = lad_batch(c, s, v, method=method, tol=tol)
    ords = n / (8 * np.pi) * (res.beta ** 2).sum(axis=1)
    return Periodogram(fourier_frequencies(n, m), ords, "nkk_lad", n, res.converged)
