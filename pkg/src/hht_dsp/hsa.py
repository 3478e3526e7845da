"""
Hilbert spectral analysis of IMFs.

Analytic signal, instantaneous amplitude/phase/frequency, the sparse
Hilbert spectrum over a whole decomposition, resynthesis from amplitude and
phase, and one-sided DFT magnitude spectra.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .emd import Decomposition, Imf
from .errors import DomainError
from .signal_core import TimeSeries, as_series

logger = logging.getLogger(__name__)

# fraction trimmed from each end for interior statistics
EDGE_FRACTION = 0.05
DEGENERATE_AMPLITUDE = 1e-12


def _series_of(x) -> TimeSeries:
    if isinstance(x, Imf):
        return x.samples
    return as_series(x)


def interior_slice(n: int, fraction: float = EDGE_FRACTION) -> slice:
    """Indices left after dropping ``fraction`` of the samples at each end."""
    k = int(np.floor(n * fraction))
    if 2 * k >= n:
        return slice(0, n)
    return slice(k, n - k)


def hilbert_transform(x) -> TimeSeries:
    """Discrete Hilbert transform by single-sideband construction.

    Forward FFT, zero the negative frequencies, double the positive ones
    (DC and Nyquist keep unit weight), inverse FFT, take the imaginary part.
    """
    x = _series_of(x)
    n = len(x)
    if n < 4:
        raise DomainError("hilbert_transform needs at least 4 samples")
    spectrum = np.fft.fft(x.samples)
    weights = np.zeros(n)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[n // 2] = 1.0
        weights[1 : n // 2] = 2.0
    else:
        weights[1 : (n + 1) // 2] = 2.0
    return x.with_samples(np.fft.ifft(spectrum * weights).imag)


@dataclass(frozen=True)
class AnalyticSignal:
    """Analytic signal of one IMF with its derived quantities.

    ``inst_frequency`` is in rad/s. ``degenerate`` marks samples whose
    amplitude is effectively zero; their phase was interpolated from
    neighbours.
    """

    real_part: TimeSeries
    imag_part: TimeSeries
    amplitude: TimeSeries
    phase_unwrapped: TimeSeries
    inst_frequency: TimeSeries
    degenerate: np.ndarray

    @property
    def sample_rate(self) -> float:
        return self.real_part.sample_rate

    @property
    def frequency_hz(self) -> np.ndarray:
        return self.inst_frequency.samples / (2.0 * np.pi)

    @property
    def any_degenerate(self) -> bool:
        return bool(np.any(self.degenerate))


def _phase(real: np.ndarray, imag: np.ndarray, amplitude: np.ndarray):
    raw = np.arctan2(imag, real)
    peak = amplitude.max()
    if peak == 0.0:
        return np.zeros_like(raw), np.ones(raw.size, dtype=bool)
    degenerate = amplitude < DEGENERATE_AMPLITUDE * peak
    good = ~degenerate
    # unwrap the well-defined samples, then fill the gaps linearly
    idx = np.flatnonzero(good)
    phase = np.empty_like(raw)
    phase[idx] = np.unwrap(raw[idx])
    if degenerate.any():
        phase[degenerate] = np.interp(np.flatnonzero(degenerate), idx, phase[idx])
    return phase, degenerate


def _phase_derivative(phase: np.ndarray, sample_rate: float) -> np.ndarray:
    if phase.size < 2:
        return np.zeros_like(phase)
    return np.gradient(phase) * sample_rate


def analytic_signal(imf) -> AnalyticSignal:
    """Build ``C + iH[C]`` with amplitude, unwrapped phase and frequency."""
    c = _series_of(imf)
    ch = hilbert_transform(c)
    re, im = c.samples, ch.samples
    amplitude = np.hypot(re, im)
    phase, degenerate = _phase(re, im, amplitude)
    if degenerate.any():
        logger.debug("analytic signal: %d degenerate-amplitude samples", int(degenerate.sum()))
    degenerate.setflags(write=False)
    return AnalyticSignal(
        real_part=c,
        imag_part=ch,
        amplitude=c.with_samples(amplitude),
        phase_unwrapped=c.with_samples(phase),
        inst_frequency=c.with_samples(_phase_derivative(phase, c.sample_rate)),
        degenerate=degenerate,
    )


def instantaneous_frequency(sig: AnalyticSignal) -> TimeSeries:
    """Time derivative of the unwrapped phase in rad/s.

    Central differences inside, one-sided at the two endpoints. When every
    sample is degenerate the result is all zeros; check ``sig.degenerate``.
    """
    phase = sig.phase_unwrapped
    return phase.with_samples(_phase_derivative(phase.samples, phase.sample_rate))


def weighted_mean_frequency(sig: AnalyticSignal) -> float:
    """Squared-amplitude weighted mean of the instantaneous frequency, in Hz.

    Only interior samples contribute.
    """
    sl = interior_slice(len(sig.amplitude))
    w = sig.amplitude.samples[sl] ** 2
    total = w.sum()
    if total == 0.0:
        raise DomainError("amplitude is identically zero; weighted mean frequency undefined")
    return float(np.dot(w, sig.frequency_hz[sl]) / total)


@dataclass(frozen=True)
class HilbertSpectrum:
    """Sparse (time, frequency, amplitude, imf) samples over all IMFs.

    Stored column-wise. The two endpoints of every IMF, where the phase
    derivative is one-sided, are treated as boundary and omitted.
    """

    time: np.ndarray
    frequency: np.ndarray
    amplitude: np.ndarray
    imf_index: np.ndarray
    freq_bin_width: float
    time_step: float
    dropped_negative: int = 0

    @property
    def entries(self) -> list[tuple[float, float, float, int]]:
        return list(
            zip(
                self.time.tolist(),
                self.frequency.tolist(),
                self.amplitude.tolist(),
                self.imf_index.tolist(),
            )
        )

    def __len__(self) -> int:
        return self.time.size


def hilbert_spectrum(
    d: Decomposition, keep_negative: bool = False, signals: list[AnalyticSignal] | None = None
) -> HilbertSpectrum:
    """Collect instantaneous frequency and amplitude for every IMF.

    Negative instantaneous frequencies are dropped and counted unless
    ``keep_negative`` is set. Precomputed analytic signals may be passed in
    ``signals`` (one per IMF, in order).
    """
    src = d.source
    n = len(src)
    fs = src.sample_rate
    if signals is None:
        signals = [analytic_signal(imf) for imf in d.imfs]
    cols = ([], [], [], [])
    dropped = 0
    t = src.times
    inner = slice(1, n - 1)
    for imf, sig in zip(d.imfs, signals):
        f = sig.frequency_hz[inner]
        a = sig.amplitude.samples[inner]
        keep = np.ones(f.size, dtype=bool) if keep_negative else f >= 0
        dropped += int(f.size - keep.sum())
        cols[0].append(t[inner][keep])
        cols[1].append(f[keep])
        cols[2].append(a[keep])
        cols[3].append(np.full(int(keep.sum()), imf.index, dtype=int))
    if dropped:
        logger.info("hilbert spectrum: dropped %d negative-frequency samples", dropped)
    if d.imfs:
        time, freq, amp, idx = (np.concatenate(c) for c in cols)
    else:
        time = freq = amp = np.array([], dtype=float)
        idx = np.array([], dtype=int)
    return HilbertSpectrum(time, freq, amp, idx, fs / n, 1.0 / fs, dropped)


def hht_resynthesize(d: Decomposition, signals: list[AnalyticSignal] | None = None) -> TimeSeries:
    """``Re[sum_i A_i exp(i theta_i)]`` over all IMFs; the residue is left out."""
    if signals is None:
        signals = [analytic_signal(imf) for imf in d.imfs]
    total = np.zeros(len(d.source))
    for sig in signals:
        total += np.real(sig.amplitude.samples * np.exp(1j * sig.phase_unwrapped.samples))
    return d.source.with_samples(total)


@dataclass(frozen=True)
class MagnitudeSpectrum:
    frequencies: np.ndarray
    magnitudes: np.ndarray
    n_samples: int

    def energy(self) -> float:
        """Time-domain energy recovered from the one-sided spectrum (Parseval)."""
        power = self.magnitudes**2
        interior = power[1:-1].sum() if self.n_samples % 2 == 0 else power[1:].sum()
        edges = power[0] + (power[-1] if self.n_samples % 2 == 0 and power.size > 1 else 0.0)
        return float((edges + 2.0 * interior) / self.n_samples)

    def peak_frequency(self) -> float:
        return float(self.frequencies[int(np.argmax(self.magnitudes))])

    def centroid(self) -> float:
        """Power-weighted mean frequency, DC excluded."""
        power = self.magnitudes[1:] ** 2
        total = power.sum()
        if total == 0.0:
            return 0.0
        return float(np.dot(power, self.frequencies[1:]) / total)


def magnitude_spectrum(x) -> MagnitudeSpectrum:
    x = _series_of(x)
    n = len(x)
    if n < 2:
        raise DomainError("magnitude_spectrum needs at least 2 samples")
    mags = np.abs(np.fft.rfft(x.samples))
    freqs = np.fft.rfftfreq(n, d=1.0 / x.sample_rate)
    return MagnitudeSpectrum(freqs, mags, n)
