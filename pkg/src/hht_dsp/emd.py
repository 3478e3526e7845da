"""
Empirical mode decomposition by sifting.

Each IMF is found by repeatedly subtracting the mean of the spline
envelopes from the current iterate until a stopping rule fires. The IMF is
removed from the signal and the remainder is sifted again until it runs out
of extrema.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, NotEnoughExtremaError
from .signal_core import (
    TimeSeries,
    as_series,
    build_envelopes,
    count_zero_crossings,
    find_extrema,
    local_mean,
)

logger = logging.getLogger(__name__)


class Criterion(str, enum.Enum):
    SD = "sd"
    SNUMBER = "snumber"


@dataclass(frozen=True)
class SiftConfig:
    """Stopping rules for the sifting loop.

    ``max_imfs=None`` resolves to ``floor(log2(N))`` for a series of length N.
    """

    sd_threshold: float = 0.25
    s_number: int = 4
    criterion: Criterion = Criterion.SNUMBER
    max_sift_iterations: int = 200
    max_imfs: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "criterion", Criterion(self.criterion))
        if not self.sd_threshold > 0:
            raise DomainError("sd_threshold must be > 0")
        if self.s_number < 1:
            raise DomainError("s_number must be >= 1")
        if self.max_sift_iterations < 1:
            raise DomainError("max_sift_iterations must be >= 1")
        if self.max_imfs is not None and self.max_imfs < 1:
            raise DomainError("max_imfs must be >= 1")

    def imf_cap(self, n: int) -> int:
        if self.max_imfs is not None:
            return self.max_imfs
        return max(1, int(math.floor(math.log2(n))))


@dataclass(frozen=True)
class Imf:
    samples: TimeSeries
    index: int
    sift_iterations_used: int
    stop_reason: str = "criterion"

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class Decomposition:
    """IMFs ordered finest to coarsest plus the final residue.

    ``stop_reason`` is ``"monotone_residue"`` when the residue ran out of
    extrema and ``"max_imfs"`` when the IMF cap fired first.
    """

    imfs: tuple
    residue: TimeSeries
    source: TimeSeries
    stop_reason: str = "monotone_residue"

    def __post_init__(self):
        object.__setattr__(self, "imfs", tuple(self.imfs))

    @property
    def n_imfs(self) -> int:
        return len(self.imfs)

    def imf_matrix(self) -> np.ndarray:
        if not self.imfs:
            return np.zeros((0, len(self.source)))
        return np.vstack([imf.samples.samples for imf in self.imfs])


def _counts(h: TimeSeries) -> tuple[int, int]:
    return find_extrema(h).count, count_zero_crossings(h)


def sift_once(h) -> TimeSeries:
    """Subtract the local envelope mean from ``h``.

    Raises NotEnoughExtremaError when ``h`` cannot carry two envelopes.
    """
    h = as_series(h)
    if len(h) < 3:
        raise NotEnoughExtremaError("no sift possible: series too short")
    mean = local_mean(build_envelopes(h))
    return h.with_samples(h.samples - mean.samples)


def is_imf(h) -> bool:
    """Extrema and zero-crossing counts differ by at most one."""
    n_ext, n_zc = _counts(as_series(h))
    return abs(n_ext - n_zc) <= 1


def sd_value(prev, curr) -> float:
    """Normalised squared difference between successive sift iterates."""
    p = as_series(prev).samples
    c = as_series(curr).samples
    if p.shape != c.shape:
        raise DomainError("iterates must have equal length")
    denom = float(np.dot(p, p))
    if denom == 0.0:
        raise DomainError("SD undefined: previous iterate is identically zero")
    diff = p - c
    return float(np.dot(diff, diff)) / denom


def extract_imf(x, config: SiftConfig = SiftConfig(), index: int = 1) -> tuple[Imf, TimeSeries]:
    """Sift one IMF out of ``x``.

    Returns the IMF and ``x`` minus the IMF. Raises NotEnoughExtremaError if
    ``x`` itself is already a residue.
    """
    x = as_series(x)
    prev = x
    h = sift_once(x)
    iterations = 1
    reason = "max_iterations"
    streak = 0
    last_counts = None

    while True:
        if config.criterion is Criterion.SD:
            if not np.any(prev.samples):
                reason = "criterion"
                break
            if sd_value(prev, h) < config.sd_threshold:
                reason = "criterion"
                break
        else:
            counts = _counts(h)
            balanced = abs(counts[0] - counts[1]) <= 1
            if balanced and counts == last_counts:
                streak += 1
            else:
                streak = 1 if balanced else 0
            last_counts = counts
            if streak >= config.s_number:
                reason = "criterion"
                break

        if iterations >= config.max_sift_iterations:
            break
        try:
            nxt = sift_once(h)
        except NotEnoughExtremaError:
            reason = "extrema_exhausted"
            break
        prev, h = h, nxt
        iterations += 1

    if reason == "max_iterations":
        logger.info("IMF %d: sifting hit the %d-iteration cap", index, iterations)
    if config.criterion is Criterion.SD and not is_imf(h):
        logger.info("IMF %d (SD criterion) violates the extrema/zero-crossing balance", index)
    logger.debug("IMF %d: %d sift iterations, stop=%s", index, iterations, reason)
    imf = Imf(h, index, iterations, reason)
    return imf, x.with_samples(x.samples - h.samples)


def decompose(x, config: SiftConfig = SiftConfig()) -> Decomposition:
    """Split ``x`` into IMFs and a final residue.

    Sifting stops when the residue has fewer than two maxima or two minima,
    or when ``config.imf_cap(len(x))`` IMFs have been extracted.
    """
    x = as_series(x)
    if len(x) < 4:
        raise DomainError("decompose needs at least 4 samples")
    cap = config.imf_cap(len(x))
    imfs = []
    residue = x
    stop = "monotone_residue"
    while True:
        if len(imfs) >= cap:
            stop = "max_imfs"
            break
        try:
            imf, residue_next = extract_imf(residue, config, index=len(imfs) + 1)
        except NotEnoughExtremaError:
            break
        imfs.append(imf)
        residue = residue_next
    logger.info("decomposition: %d IMFs, stop=%s", len(imfs), stop)
    return Decomposition(tuple(imfs), residue, x, stop)


def reconstruct(d: Decomposition) -> TimeSeries:
    total = d.residue.samples.copy()
    for imf in d.imfs:
        total = total + imf.samples.samples
    return d.residue.with_samples(total)
