"""Finest-scale Haar discrete wavelet transform.

At the finest scale J (n = 2^J) the Haar filter reduces to scaled first
differences, w_q = 2^{J/2} (y_q - y_{q+1}), q = 0..n-1, with the series
wrapped periodically so that exactly n coefficients exist.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datagen import TimeSeries
from .errors import ValidationError


@dataclass(frozen=True)
class WaveletSpec:
    name: str = "haar"
    nu: int = 1
    boundary: str = "periodic"

    def __post_init__(self):
        if self.name != "haar":
            raise ValidationError(f"only the haar wavelet is supported, got {self.name!r}", "name")
        if self.nu != 1:
            raise ValidationError("the haar wavelet has exactly one vanishing moment", "nu")
        if self.boundary != "periodic":
            raise ValidationError("only periodic boundary extension is supported", "boundary")


HAAR = WaveletSpec()


@dataclass(frozen=True)
class WaveletCoefficients:
    """Detail coefficients w_{jq}, q = 0..2^j - 1, at a single scale."""

    scale_j: int
    coeffs: np.ndarray
    source_n: int
    spec: WaveletSpec = HAAR

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size != 2 ** self.scale_j:
            raise ValidationError(
                f"expected 2^{self.scale_j} = {2 ** self.scale_j} coefficients, got {c.size}",
                "coeffs")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return self.coeffs.size

    @classmethod
    def from_array(cls, w) -> "WaveletCoefficients":
        """Wrap a raw finest-scale coefficient sequence (length a power of two)."""
        w = np.asarray(w, dtype=float)
        return cls(max_scale(w.size), w, w.size)


def max_scale(n: int) -> int:
    """J with n = 2^J."""
    n = int(n)
    if n < 1 or n & (n - 1):
        lo = 1 << max(n.bit_length() - 1, 0)
        hi = lo << 1
        raise ValidationError(
            f"series length {n} is not a power of two; nearest valid lengths are {lo} and {hi}",
            "n")
    return n.bit_length() - 1


def haar_dwt_finest(y) -> WaveletCoefficients:
    """Haar detail coefficients at the finest scale, periodic boundary."""
    v = y.values if isinstance(y, TimeSeries) else np.asarray(y, dtype=float)
    J = max_scale(v.size)
    w = 2.0 ** (J / 2) * (v - np.roll(v, -1))
    return WaveletCoefficients(J, w, v.size)


def haar_ft_magnitude(lam):
    """|psi_hat(lambda)| = |lambda|/4 * sin^2(lambda/4) / (lambda/4)^2 for the Haar wavelet."""
    lam = np.asarray(lam, dtype=float)
    x = lam / 4
    # np.sinc(t) = sin(pi t)/(pi t); the limit at 0 is handled there
    out = np.abs(lam) / 4 * np.sinc(x / np.pi) ** 2
    return out.item() if out.ndim == 0 else out
