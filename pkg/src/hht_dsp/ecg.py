"""
Synthetic ECG and beat-level feature extraction.

Each beat is a sum of five Gaussian bumps (P, Q, R, S, T) placed relative to
the R peak. Detection thresholds the in-band instantaneous energy of the IMFs and
refines each hit to the local maximum of the raw ECG.

Pre-gradient is the mean slope from QRS onset up to R; post-gradient the mean
slope from R down to QRS offset.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .emd import Decomposition
from .errors import DomainError
from .hsa import analytic_signal
from .signal_core import TimeSeries, as_series

logger = logging.getLogger(__name__)


class Abnormality(str, enum.Enum):
    NONE = "none"
    DROPPED_BEATS = "dropped_beats"
    IRREGULAR_RR = "irregular_rr"
    INVERTED_T = "inverted_t"


class Rhythm(str, enum.Enum):
    NORMAL = "Normal"
    TACHYCARDIA = "Tachycardia"
    BRADYCARDIA = "Bradycardia"
    IRREGULAR = "Irregular"


@dataclass(frozen=True)
class Wave:
    amplitude_mv: float
    center_offset_s: float
    width_s: float


DEFAULT_WAVES = {
    "P": Wave(0.15, -0.20, 0.025),
    "Q": Wave(-0.10, -0.030, 0.010),
    "R": Wave(1.00, 0.0, 0.012),
    "S": Wave(-0.20, 0.030, 0.010),
    "T": Wave(0.30, 0.25, 0.045),
}

# jitter used for IrregularRR when the params leave rr_jitter_fraction at 0
DEFAULT_IRREGULAR_JITTER = 0.3
MIN_RR_FACTOR = 0.2


@dataclass(frozen=True)
class EcgSynthParams:
    duration_s: float = 10.0
    heart_rate_bpm: float = 60.0
    sample_rate_hz: float = 500.0
    waves: dict = field(default_factory=lambda: dict(DEFAULT_WAVES))
    rr_jitter_fraction: float = 0.0
    abnormality: Abnormality = Abnormality.NONE
    drop_every: int = 4
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "abnormality", Abnormality(self.abnormality))
        if not self.heart_rate_bpm > 0:
            raise DomainError("heart_rate_bpm must be > 0")
        if not self.duration_s > 0:
            raise DomainError("duration_s must be > 0")
        if not self.sample_rate_hz > 0:
            raise DomainError("sample_rate_hz must be > 0")
        if self.rr_jitter_fraction < 0:
            raise DomainError("rr_jitter_fraction must be >= 0")
        if set(self.waves) != set("PQRST"):
            raise DomainError("wave table needs exactly the entries P, Q, R, S, T")
        for name, w in self.waves.items():
            if not w.width_s > 0:
                raise DomainError(f"wave {name} width must be > 0")
        min_width = min(w.width_s for w in self.waves.values())
        if self.sample_rate_hz <= 2.0 / min_width:
            logger.warning("sample rate %.1f Hz is coarse for %.3f s wide waves", self.sample_rate_hz, min_width)


def beat_schedule(params: EcgSynthParams) -> np.ndarray:
    """R-peak times in seconds, after jitter and dropped beats are applied.

    The first R peak sits half a nominal RR interval after t = 0; beats are
    kept while their R time lies inside the recording.
    """
    rr = 60.0 / params.heart_rate_bpm
    if rr / 2.0 >= params.duration_s:
        raise DomainError("duration too short for one beat")
    jitter = params.rr_jitter_fraction
    if params.abnormality is Abnormality.IRREGULAR_RR and jitter == 0:
        jitter = DEFAULT_IRREGULAR_JITTER
    if jitter > 0:
        rng = np.random.default_rng(params.seed)
        # clip to +-2 sigma and at least 0.2 RR so every interval stays positive
        n_max = int(np.ceil(params.duration_s / (MIN_RR_FACTOR * rr))) + 1
        z = np.clip(rng.normal(0.0, jitter, n_max), -2 * jitter, 2 * jitter)
        intervals = rr * np.maximum(1.0 + z, MIN_RR_FACTOR)
        times = rr / 2.0 + np.r_[0.0, np.cumsum(intervals[:-1])]
    else:
        # closed form; a running sum drifts and can admit a beat at t = duration
        n_max = int(np.ceil(params.duration_s / rr)) + 1
        times = rr * (np.arange(n_max) + 0.5)
    times = times[times < params.duration_s]
    if params.abnormality is Abnormality.DROPPED_BEATS and params.drop_every > 0:
        keep = (np.arange(times.size) % params.drop_every) != params.drop_every - 1
        times = times[keep]
    return times


def synthesize_ecg(params: EcgSynthParams = EcgSynthParams()) -> TimeSeries:
    """Sum-of-Gaussians ECG sampled on a uniform grid starting at t = 0."""
    fs = params.sample_rate_hz
    n = int(round(params.duration_s * fs))
    t = np.arange(n) / fs
    x = np.zeros(n)
    waves = dict(params.waves)
    if params.abnormality is Abnormality.INVERTED_T:
        tw = waves["T"]
        waves["T"] = Wave(-tw.amplitude_mv, tw.center_offset_s, tw.width_s)
    for r_time in beat_schedule(params):
        for w in waves.values():
            if w.amplitude_mv == 0.0:
                continue
            x += w.amplitude_mv * np.exp(-0.5 * ((t - r_time - w.center_offset_s) / w.width_s) ** 2)
    return TimeSeries(x, fs)


@dataclass(frozen=True)
class DetectorConfig:
    band_hz: tuple = (5.0, 40.0)
    threshold_fraction: float = 0.30
    threshold_percentile: float = 99.0
    refractory_s: float = 0.200
    refine_window_s: float = 0.050


def _mirrored_analytic(imf) -> tuple[np.ndarray, np.ndarray]:
    # symmetric extension keeps the FFT's periodic wrap continuous at both ends
    c = imf.samples.samples
    n = c.size
    ext = imf.samples.with_samples(np.r_[c[::-1], c, c[::-1]])
    sig = analytic_signal(ext)
    inner = slice(n, 2 * n)
    return sig.amplitude.samples[inner], sig.inst_frequency.samples[inner]


def qrs_energy(d: Decomposition, band_hz=(5.0, 40.0)) -> np.ndarray:
    """In-band instantaneous energy summed over IMFs.

    Sample ``t`` of IMF ``i`` contributes ``(A_i(t) * w_i(t))**2`` when its
    instantaneous frequency ``w_i(t) / 2pi`` lies inside ``band_hz``. Sifting
    spreads the sharp QRS over IMFs whose mean frequency is only a few Hz,
    but their instantaneous frequency still spikes into the band at each QRS.
    """
    lo, hi = band_hz
    total = np.zeros(len(d.source))
    for imf in d.imfs:
        amp, omega = _mirrored_analytic(imf)
        f = omega / (2.0 * np.pi)
        in_band = (f >= lo) & (f <= hi)
        total += np.where(in_band, (amp * omega) ** 2, 0.0)
    return total


def detect_r_peaks(x, d: Decomposition, config: DetectorConfig = DetectorConfig()) -> list[int]:
    """R-peak sample indices from an EMD of ``x``.

    Energy runs above ``threshold_fraction`` of the ``threshold_percentile``
    value are candidate QRS complexes; candidates closer than the refractory
    period keep the stronger one. Each survivor is moved to the maximum of
    ``x`` within ``refine_window_s``; maxima landing on the first or last
    sample belong to truncated beats and are dropped.
    """
    x = as_series(x)
    samples = x.samples
    if not np.any(samples - samples[0]):
        return []
    if d.n_imfs == 0:
        raise DomainError("cannot detect R peaks from an empty decomposition")

    energy = qrs_energy(d, config.band_hz)
    threshold = config.threshold_fraction * np.percentile(energy, config.threshold_percentile)
    if threshold <= 0:
        logger.warning("no in-band energy for QRS band %s Hz", config.band_hz)
        return []
    fs = x.sample_rate
    refractory = int(round(config.refractory_s * fs))
    half = int(round(config.refine_window_s * fs))

    above = energy > threshold
    edges = np.diff(np.r_[0, above.astype(np.int8), 0])
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1)

    candidates: list[int] = []
    for s, e in zip(starts, stops):
        k = s + int(np.argmax(energy[s:e]))
        if candidates and k - candidates[-1] < refractory:
            if energy[k] > energy[candidates[-1]]:
                candidates[-1] = k
            continue
        candidates.append(k)

    last = samples.size - 1
    peaks: list[int] = []
    for k in candidates:
        lo, hi = max(0, k - half), min(samples.size, k + half + 1)
        r = lo + int(np.argmax(samples[lo:hi]))
        if r == 0 or r == last:
            continue
        if peaks and r - peaks[-1] < refractory:
            if samples[r] > samples[peaks[-1]]:
                peaks[-1] = r
            continue
        peaks.append(r)
    return peaks


@dataclass(frozen=True)
class Beat:
    r_index: int
    r_amplitude_mv: float
    qrs_onset_index: int
    qrs_offset_index: int
    qrs_duration_s: float
    pre_gradient_mv_per_s: float
    post_gradient_mv_per_s: float


@dataclass(frozen=True)
class EcgFeatureSet:
    beats: tuple
    rr_intervals_s: np.ndarray
    mean_heart_rate_bpm: Optional[float]
    rhythm_flag: Rhythm

    @property
    def mean_rr_s(self) -> Optional[float]:
        if self.rr_intervals_s.size == 0:
            return None
        return float(self.rr_intervals_s.mean())

    @property
    def rr_cv(self) -> Optional[float]:
        if self.rr_intervals_s.size == 0:
            return None
        return float(self.rr_intervals_s.std() / self.rr_intervals_s.mean())


def _walk(x: np.ndarray, start: int, step: int, limit: int, tol: float) -> int:
    """Follow x from ``start`` in direction ``step``: down into the trough,
    then back up until the slope flattens or reverses."""
    k = start
    # descend into the Q (or S) trough
    while k + step != limit and x[k + step] < x[k]:
        k += step
    # climb out of it
    while k + step != limit and x[k + step] - x[k] > tol:
        k += step
    return k


def _qrs_bounds(x: np.ndarray, r: int, fs: float, search_s: float, flat_fraction: float):
    w = max(2, int(round(search_s * fs)))
    lo, hi = max(0, r - w), min(x.size - 1, r + w)
    seg = np.diff(x[lo : hi + 1])
    tol = flat_fraction * (np.abs(seg).max() if seg.size else 0.0)
    onset = _walk(x, r, -1, lo - 1, tol)
    offset = _walk(x, r, +1, hi + 1, tol)
    return onset, offset


def classify_rhythm(mean_hr: Optional[float], rr_cv: Optional[float], cv_limit: float = 0.15) -> Rhythm:
    """Irregular takes precedence over the rate-based labels."""
    if mean_hr is None:
        return Rhythm.NORMAL
    if rr_cv is not None and rr_cv > cv_limit:
        return Rhythm.IRREGULAR
    if mean_hr > 100:
        return Rhythm.TACHYCARDIA
    if mean_hr < 60:
        return Rhythm.BRADYCARDIA
    return Rhythm.NORMAL


def extract_features(
    x,
    r_peaks: Sequence[int],
    search_s: float = 0.10,
    flat_fraction: float = 0.02,
) -> EcgFeatureSet:
    """Per-beat amplitude, QRS duration and gradients plus RR statistics.

    QRS onset is found by walking left from R down into the Q trough and up
    the far side until the slope flattens to ``flat_fraction`` of the
    steepest step within ``search_s`` of R; offset mirrors this through S.
    ``r_amplitude_mv`` is measured from the median of the whole record.
    """
    x = as_series(x)
    peaks = [int(p) for p in r_peaks]
    if not peaks:
        raise DomainError("feature extraction needs at least one R peak")
    v = x.samples
    fs = x.sample_rate
    baseline = float(np.median(v))
    beats = []
    for r in peaks:
        onset, offset = _qrs_bounds(v, r, fs, search_s, flat_fraction)
        if not onset < r < offset:
            logger.warning("beat at sample %d has degenerate QRS bounds (%d, %d)", r, onset, offset)
        pre = (v[r] - v[onset]) * fs / (r - onset) if r > onset else 0.0
        post = (v[offset] - v[r]) * fs / (offset - r) if offset > r else 0.0
        beats.append(
            Beat(
                r_index=r,
                r_amplitude_mv=float(v[r] - baseline),
                qrs_onset_index=onset,
                qrs_offset_index=offset,
                qrs_duration_s=(offset - onset) / fs,
                pre_gradient_mv_per_s=float(pre),
                post_gradient_mv_per_s=float(post),
            )
        )
    rr = np.diff(np.asarray(peaks, dtype=float)) / fs
    mean_hr = float(60.0 / rr.mean()) if rr.size else None
    cv = float(rr.std() / rr.mean()) if rr.size else None
    return EcgFeatureSet(tuple(beats), rr, mean_hr, classify_rhythm(mean_hr, cv))
