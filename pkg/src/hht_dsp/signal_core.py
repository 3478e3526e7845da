"""
Shared signal types and numerics.

TimeSeries is the currency passed between every stage. This module also
holds the pieces the sifting loop is built from: extrema and zero-crossing
detection, a natural cubic spline, and envelope construction with mirror
extension at both ends.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import solve_banded

from .errors import DomainError, NotEnoughExtremaError

logger = logging.getLogger(__name__)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled real signal.

    Sample ``k`` sits at time ``t0 + k / sample_rate``.
    """

    samples: np.ndarray
    sample_rate: float
    t0: float = 0.0

    def __post_init__(self):
        samples = _frozen(self.samples)
        if samples.ndim != 1:
            raise DomainError("samples must be one-dimensional")
        if samples.size < 1:
            raise DomainError("a time series needs at least one sample")
        if not (np.isfinite(self.sample_rate) and self.sample_rate > 0):
            raise DomainError(f"sample_rate must be > 0, got {self.sample_rate!r}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))
        object.__setattr__(self, "t0", float(self.t0))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) / self.sample_rate

    def with_samples(self, samples) -> "TimeSeries":
        """Same grid, new values."""
        return TimeSeries(samples, self.sample_rate, self.t0)

    def same_grid(self, other: "TimeSeries") -> bool:
        return (
            len(self) == len(other)
            and self.sample_rate == other.sample_rate
            and self.t0 == other.t0
        )


def as_series(x, sample_rate: float = 1.0) -> TimeSeries:
    if isinstance(x, TimeSeries):
        return x
    return TimeSeries(x, sample_rate)


@dataclass(frozen=True)
class ExtremaSet:
    max_indices: np.ndarray
    max_values: np.ndarray
    min_indices: np.ndarray
    min_values: np.ndarray

    @property
    def maxima(self) -> list[tuple[int, float]]:
        return [(int(i), float(v)) for i, v in zip(self.max_indices, self.max_values)]

    @property
    def minima(self) -> list[tuple[int, float]]:
        return [(int(i), float(v)) for i, v in zip(self.min_indices, self.min_values)]

    @property
    def count(self) -> int:
        return int(self.max_indices.size + self.min_indices.size)


def find_extrema(series) -> ExtremaSet:
    """Locate interior maxima and minima.

    Endpoints are never extrema. A plateau (run of equal samples) whose
    neighbours on both sides are strictly lower is a single maximum reported
    at the run's first index; minima are handled the same way.

    Raises
    ------
    DomainError
        If the series has fewer than 3 samples.
    """
    x = as_series(series).samples
    if x.size < 3:
        raise DomainError("series too short for extrema (need >= 3 samples)")

    # collapse runs of equal values so plateaus behave like single samples
    starts = np.flatnonzero(np.r_[True, x[1:] != x[:-1]])
    vals = x[starts]
    if vals.size < 3:
        empty_i = np.array([], dtype=int)
        empty_v = np.array([], dtype=float)
        return ExtremaSet(empty_i, empty_v, empty_i, empty_v)

    mid, left, right = vals[1:-1], vals[:-2], vals[2:]
    is_max = (mid > left) & (mid > right)
    is_min = (mid < left) & (mid < right)
    inner = starts[1:-1]
    return ExtremaSet(
        max_indices=inner[is_max],
        max_values=mid[is_max],
        min_indices=inner[is_min],
        min_values=mid[is_min],
    )


def count_zero_crossings(series) -> int:
    """Number of sign changes between consecutive samples.

    Runs of exact zeros are skipped over: they count as one crossing when the
    nonzero samples on either side have opposite signs, otherwise none.
    """
    x = as_series(series).samples
    if x.size < 2:
        raise DomainError("series too short for zero crossings (need >= 2 samples)")
    signs = np.sign(x)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


@dataclass(frozen=True)
class CubicSpline:
    """Natural cubic spline through strictly increasing knots.

    Each interval ``[x_j, x_{j+1}]`` carries the cubic
    ``y = a + b*u + c*u**2 + d*u**3`` with ``u = x - x_j``; the coefficient
    rows live in ``coeffs`` with shape ``(n_knots - 1, 4)``.
    """

    x: np.ndarray
    y: np.ndarray
    coeffs: np.ndarray

    @property
    def knots(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))

    def _locate(self, t):
        t = np.asarray(t, dtype=float)
        j = np.clip(np.searchsorted(self.x, t, side="right") - 1, 0, self.x.size - 2)
        return t, j, t - self.x[j]

    def __call__(self, t, nu: int = 0):
        """Evaluate the spline (or its ``nu``-th derivative, ``nu <= 2``) at ``t``.

        Points outside the knot range use the cubic of the nearest end interval.
        """
        t, j, u = self._locate(t)
        a, b, c, d = self.coeffs[j].T
        if nu == 0:
            return a + u * (b + u * (c + u * d))
        if nu == 1:
            return b + u * (2.0 * c + 3.0 * u * d)
        if nu == 2:
            return 2.0 * c + 6.0 * u * d
        raise ValueError("only derivatives up to order 2 are supported")


def fit_cubic_spline(knots: Sequence[tuple[float, float]] | np.ndarray, y=None) -> CubicSpline:
    """Fit a natural cubic spline (zero second derivative at both ends).

    Accepts either a sequence of ``(x, y)`` pairs or separate ``x`` and ``y``
    arrays. Two knots give the straight line through them.
    """
    if y is None:
        pts = np.asarray(knots, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise DomainError("knots must be (x, y) pairs")
        xs, ys = pts[:, 0], pts[:, 1]
    else:
        xs = np.asarray(knots, dtype=float)
        ys = np.asarray(y, dtype=float)
        if xs.shape != ys.shape or xs.ndim != 1:
            raise DomainError("x and y must be 1-d arrays of equal length")
    n = xs.size
    if n < 2:
        raise DomainError("a spline needs at least 2 knots")
    h = np.diff(xs)
    if np.any(h <= 0):
        raise DomainError("knot x values must be strictly increasing")

    slopes = np.diff(ys) / h
    # second derivatives M at the knots; natural ends pin M[0] = M[-1] = 0
    M = np.zeros(n)
    if n > 2:
        ab = np.zeros((3, n - 2))
        ab[0, 1:] = h[1:-1]
        ab[1, :] = 2.0 * (h[:-1] + h[1:])
        ab[2, :-1] = h[1:-1]
        rhs = 6.0 * np.diff(slopes)
        M[1:-1] = solve_banded((1, 1), ab, rhs)

    coeffs = np.empty((n - 1, 4))
    coeffs[:, 0] = ys[:-1]
    coeffs[:, 1] = slopes - h * (2.0 * M[:-1] + M[1:]) / 6.0
    coeffs[:, 2] = M[:-1] / 2.0
    coeffs[:, 3] = (M[1:] - M[:-1]) / (6.0 * h)
    coeffs.setflags(write=False)
    return CubicSpline(_frozen(xs), _frozen(ys), coeffs)


@dataclass(frozen=True)
class EnvelopePair:
    """Upper and lower envelopes sampled on the source grid.

    ``inverted`` counts samples where spline overshoot put the lower envelope
    above the upper one; those samples are left as computed.
    """

    upper: TimeSeries
    lower: TimeSeries
    inverted: int = field(default=0)


def _mirror_knots(idx: np.ndarray, val: np.ndarray, last: int):
    # reflect the two extrema nearest each end across that endpoint
    left_i = -idx[:2][::-1]
    left_v = val[:2][::-1]
    right_i = 2 * last - idx[-2:][::-1]
    right_v = val[-2:][::-1]
    return np.r_[left_i, idx, right_i].astype(float), np.r_[left_v, val, right_v]


def build_envelopes(series, extrema: ExtremaSet | None = None) -> EnvelopePair:
    """Spline envelopes through the maxima and through the minima.

    Raises
    ------
    NotEnoughExtremaError
        When fewer than two maxima or two minima exist; the series is then a
        monotone residue as far as sifting is concerned.
    """
    series = as_series(series)
    if extrema is None:
        extrema = find_extrema(series)
    if extrema.max_indices.size < 2 or extrema.min_indices.size < 2:
        raise NotEnoughExtremaError(
            f"monotone residue: {extrema.max_indices.size} maxima, "
            f"{extrema.min_indices.size} minima"
        )
    last = len(series) - 1
    grid = np.arange(len(series), dtype=float)
    upper = fit_cubic_spline(*_mirror_knots(extrema.max_indices, extrema.max_values, last))(grid)
    lower = fit_cubic_spline(*_mirror_knots(extrema.min_indices, extrema.min_values, last))(grid)

    inverted = int(np.count_nonzero(lower > upper + 1e-9))
    if inverted:
        logger.debug("envelope overshoot: lower above upper at %d samples", inverted)
    return EnvelopePair(series.with_samples(upper), series.with_samples(lower), inverted)


def local_mean(envelopes: EnvelopePair) -> TimeSeries:
    upper, lower = envelopes.upper, envelopes.lower
    if not upper.same_grid(lower):
        raise DomainError("upper and lower envelopes are on different grids")
    return upper.with_samples((upper.samples + lower.samples) / 2.0)
