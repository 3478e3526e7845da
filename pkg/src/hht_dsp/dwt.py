"""Multilevel orthonormal Haar wavelet transform and its exact inverse."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .signal_core import TimeSeries, as_series

logger = logging.getLogger(__name__)

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class WaveletDecomposition:
    """Haar coefficients for levels 1..``levels``.

    ``details[m - 1]`` holds the level-m detail coefficients. ``padded[m - 1]``
    says whether the level-m input had odd length and was extended by
    repeating its last sample, whose value is kept in ``pad_values[m - 1]``
    (0.0 when no padding happened).
    """

    levels: int
    details: tuple
    approximation: np.ndarray
    original_length: int
    padded: tuple
    pad_values: tuple
    sample_rate: float = 1.0
    t0: float = 0.0

    def coefficient_energy(self) -> float:
        return float(sum(np.dot(d, d) for d in self.details) + np.dot(self.approximation, self.approximation))

    def padding_energy(self) -> float:
        return float(sum(v * v for v, p in zip(self.pad_values, self.padded) if p))


def haar_step(x) -> tuple[np.ndarray, np.ndarray]:
    """One analysis step: pairwise scaled sums and differences.

    Odd-length input is first extended by repeating its last sample.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise DomainError("haar_step needs a 1-d vector of length >= 2")
    if x.size % 2:
        x = np.append(x, x[-1])
    even, odd = x[0::2], x[1::2]
    return (even + odd) / _SQRT2, (even - odd) / _SQRT2


def haar_inverse_step(approx, detail) -> np.ndarray:
    approx = np.asarray(approx, dtype=float)
    detail = np.asarray(detail, dtype=float)
    if approx.shape != detail.shape or approx.ndim != 1:
        raise DomainError("approximation and detail must be 1-d and equal length")
    out = np.empty(2 * approx.size)
    # multiply back by sqrt2 / 2 so the analysis division cancels without
    # the systematic bias of rounding sqrt2 * sqrt2 to 2
    out[0::2] = (approx + detail) * _SQRT2 * 0.5
    out[1::2] = (approx - detail) * _SQRT2 * 0.5
    return out


def dwt_multilevel(x, levels: int) -> WaveletDecomposition:
    """Apply ``haar_step`` ``levels`` times to successive approximations."""
    if levels < 1:
        raise DomainError("levels must be >= 1")
    series = as_series(x)
    a = series.samples
    n = a.size
    if 2**levels > n:
        logger.warning("dwt: %d levels exceed log2 of the signal length %d", levels, n)
    details, padded, pad_values = [], [], []
    for _ in range(levels):
        odd = a.size % 2 == 1
        padded.append(odd)
        pad_values.append(float(a[-1]) if odd else 0.0)
        if odd:
            a = np.append(a, a[-1])
        a, d = haar_step(a)
        d.setflags(write=False)
        details.append(d)
    a.setflags(write=False)
    return WaveletDecomposition(
        levels=levels,
        details=tuple(details),
        approximation=a,
        original_length=n,
        padded=tuple(padded),
        pad_values=tuple(pad_values),
        sample_rate=series.sample_rate,
        t0=series.t0,
    )


def _level_length(n: int, m: int) -> int:
    for _ in range(m):
        n = (n + 1) // 2
    return n


def idwt_multilevel(d: WaveletDecomposition) -> TimeSeries:
    """Invert ``dwt_multilevel``, trimming padding back to ``original_length``."""
    if d.levels < 1 or len(d.details) != d.levels or len(d.padded) != d.levels:
        raise DomainError("malformed wavelet decomposition: level bookkeeping mismatch")
    for m, det in enumerate(d.details, start=1):
        if det.size != _level_length(d.original_length, m):
            raise DomainError(f"malformed wavelet decomposition: level {m} has {det.size} coefficients")
    if d.approximation.size != d.details[-1].size:
        raise DomainError("malformed wavelet decomposition: approximation size mismatch")

    a = np.asarray(d.approximation, dtype=float)
    for m in range(d.levels, 0, -1):
        a = haar_inverse_step(a, d.details[m - 1])
        if d.padded[m - 1]:
            a = a[:-1]
    return TimeSeries(a, d.sample_rate, d.t0)
