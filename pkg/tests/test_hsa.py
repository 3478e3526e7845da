import numpy as np
import pytest
from conftest import interior, rms, tone
from hypothesis import given, settings
from hypothesis import strategies as st

from hht_dsp import (
    Decomposition,
    DomainError,
    SiftConfig,
    TimeSeries,
    analytic_signal,
    decompose,
    hht_resynthesize,
    hilbert_spectrum,
    hilbert_transform,
    instantaneous_frequency,
    magnitude_spectrum,
    weighted_mean_frequency,
)
from hht_dsp.hsa import AnalyticSignal


def chirp(f0=2.0, f1=20.0, seconds=10.0, fs=1000.0):
    t = np.arange(int(seconds * fs)) / fs
    k = (f1 - f0) / seconds
    return TimeSeries(np.cos(2 * np.pi * (f0 * t + 0.5 * k * t**2)), fs), 2 * np.pi * (f0 + k * t)


class TestHilbertTransform:
    def test_cos_to_sin(self):
        x = tone(5.0, kind="cos")
        expected = tone(5.0).samples
        assert rms(hilbert_transform(x).samples - expected) < 1e-6

    def test_sin_to_minus_cos(self):
        x = tone(5.0)
        expected = -tone(5.0, kind="cos").samples
        assert rms(hilbert_transform(x).samples - expected) < 1e-6

    def test_constant(self):
        out = hilbert_transform(np.full(100, 3.7))
        assert np.max(np.abs(out.samples)) < 1e-10

    def test_preserves_grid(self):
        x = TimeSeries(np.arange(8.0), 4.0, t0=2.0)
        out = hilbert_transform(x)
        assert out.same_grid(x)

    def test_too_short(self):
        with pytest.raises(DomainError):
            hilbert_transform([1.0, 2.0, 3.0])

    @pytest.mark.parametrize("n", [64, 65, 1000, 1001])
    def test_anti_involution(self, n):
        # integer periods of a tone that sits well inside the band
        t = np.arange(n)
        x = np.cos(2 * np.pi * 7 * t / n + 0.3)
        hh = hilbert_transform(hilbert_transform(x))
        assert rms(hh.samples + x) < 1e-6

    @settings(max_examples=30)
    @given(st.integers(8, 400), st.integers(1, 3), st.floats(0, 2 * np.pi))
    def test_matches_analytic_pair(self, n, k, phase):
        if 2 * k >= n // 2:
            return
        t = np.arange(n)
        x = np.cos(2 * np.pi * k * t / n + phase)
        expected = np.sin(2 * np.pi * k * t / n + phase)
        assert rms(hilbert_transform(x).samples - expected) < 1e-9


class TestAnalyticSignal:
    def test_cos_unit_amplitude(self):
        sig = analytic_signal(tone(5.0, kind="cos"))
        a = sig.amplitude.samples
        assert np.max(np.abs(a[interior(a.size)] - 1.0)) < 1e-3

    def test_am_envelope(self):
        fs = 1000.0
        t = np.arange(int(10 * fs)) / fs
        env = 1 + 0.5 * np.cos(2 * np.pi * 0.5 * t)
        sig = analytic_signal(TimeSeries(env * np.cos(2 * np.pi * 10 * t), fs))
        sl = interior(t.size)
        assert rms(sig.amplitude.samples[sl] - env[sl]) / rms(env[sl]) < 0.02

    def test_phase_is_linear(self):
        x = tone(5.0, kind="cos")
        sig = analytic_signal(x)
        sl = interior(len(x))
        t = x.times[sl]
        phase = sig.phase_unwrapped.samples[sl]
        slope, icpt = np.polyfit(t, phase, 1)
        assert slope == pytest.approx(2 * np.pi * 5, rel=1e-3)
        assert np.max(np.abs(phase - (slope * t + icpt))) < 1e-2

    @settings(max_examples=30)
    @given(st.integers(0, 2**32 - 1), st.integers(4, 300))
    def test_amplitude_consistency(self, seed, n):
        x = np.random.default_rng(seed).normal(size=n)
        sig = analytic_signal(x)
        re, im, a = sig.real_part.samples, sig.imag_part.samples, sig.amplitude.samples
        np.testing.assert_allclose(re**2 + im**2, a**2, rtol=1e-12, atol=1e-12)
        np.testing.assert_array_equal(re, x)

    def test_zero_is_degenerate(self):
        sig = analytic_signal(np.zeros(64))
        assert sig.any_degenerate and sig.degenerate.all()
        assert np.all(sig.inst_frequency.samples == 0)


class TestInstantaneousFrequency:
    def test_tone(self):
        x = tone(5.0, kind="cos")
        w = instantaneous_frequency(analytic_signal(x)).samples
        sl = interior(len(x))
        assert np.max(np.abs(w[sl] - 2 * np.pi * 5) / (2 * np.pi * 5)) < 0.01

    def test_chirp(self):
        x, omega = chirp()
        w = instantaneous_frequency(analytic_signal(x)).samples
        sl = interior(len(x))
        assert rms((w[sl] - omega[sl]) / omega[sl]) < 0.05

    def test_matches_stored_field(self):
        sig = analytic_signal(tone(3.0))
        np.testing.assert_array_equal(instantaneous_frequency(sig).samples, sig.inst_frequency.samples)

    def test_constant_signal(self):
        sig = analytic_signal(np.full(50, 2.0))
        w = instantaneous_frequency(sig).samples
        assert np.all(np.isfinite(w))
        # a constant has zero quadrature, so the phase never moves
        assert np.max(np.abs(w)) < 1e-6


def constructed(amplitude, freq_hz, fs=1.0):
    a = TimeSeries(np.asarray(amplitude, float), fs)
    w = a.with_samples(2 * np.pi * np.asarray(freq_hz, float))
    zeros = a.with_samples(np.zeros(len(a)))
    return AnalyticSignal(a, zeros, a, zeros, w, np.zeros(len(a), dtype=bool))


class TestWeightedMeanFrequency:
    def test_tone(self):
        assert weighted_mean_frequency(analytic_signal(tone(5.0))) == pytest.approx(5.0, rel=0.01)

    def test_constant_frequency(self):
        rng = np.random.default_rng(3)
        sig = constructed(rng.uniform(0.1, 5.0, 200), np.full(200, 7.25))
        assert weighted_mean_frequency(sig) == pytest.approx(7.25, rel=1e-12)

    def test_dominant_component(self):
        # alternating samples: amplitude 3 at 10 Hz, amplitude 1 at 2 Hz
        a = np.tile([3.0, 1.0], 100)
        f = np.tile([10.0, 2.0], 100)
        sig = constructed(a, f)
        # the 5% trim removes 10 samples from each end, i.e. 5 of each kind
        expected = (9 * 10 + 1 * 2) / (9 + 1)
        assert weighted_mean_frequency(sig) == pytest.approx(expected, rel=1e-12)
        assert weighted_mean_frequency(sig) > 6.0

    def test_zero_amplitude(self):
        with pytest.raises(DomainError):
            weighted_mean_frequency(constructed(np.zeros(20), np.ones(20)))


class TestHilbertSpectrum:
    def test_single_tone(self):
        x = tone(5.0, seconds=4.0)
        hs = hilbert_spectrum(decompose(x))
        near = np.abs(hs.frequency - 5.0) <= 0.5
        assert hs.amplitude[near].sum() >= 0.9 * hs.amplitude.sum()
        assert hs.freq_bin_width == pytest.approx(1000.0 / len(x))

    def test_empty(self):
        x = TimeSeries(np.linspace(0, 1, 100), 10.0)
        hs = hilbert_spectrum(decompose(x))
        assert len(hs) == 0 and hs.entries == []

    def test_two_ridges(self):
        fs = 1000.0
        t = np.arange(int(10 * fs)) / fs
        x = TimeSeries(np.sin(2 * np.pi * t) + np.sin(2 * np.pi * 10 * t), fs)
        d = decompose(x)
        hs = hilbert_spectrum(d)
        sl = interior(len(x))
        for k, target in ((1, 10.0), (2, 1.0)):
            rows = hs.imf_index == k
            f, a = hs.frequency[rows], hs.amplitude[rows]
            tt = hs.time[rows]
            inside = (tt >= t[sl][0]) & (tt <= t[sl][-1])
            wmf = np.dot(a[inside] ** 2, f[inside]) / np.sum(a[inside] ** 2)
            assert wmf == pytest.approx(target, rel=0.1)

    def test_negative_frequencies_counted(self):
        d = decompose(np.random.default_rng(0).normal(size=512))
        kept = hilbert_spectrum(d)
        everything = hilbert_spectrum(d, keep_negative=True)
        assert np.all(kept.frequency >= 0)
        assert len(everything) == len(kept) + kept.dropped_negative
        assert everything.dropped_negative == 0
        assert len(everything) == d.n_imfs * (len(d.source) - 2)


class TestResynthesis:
    def test_matches_source_minus_residue(self):
        x = TimeSeries(np.random.default_rng(5).normal(size=700).cumsum(), 100.0)
        d = decompose(x)
        out = hht_resynthesize(d).samples + d.residue.samples
        assert np.max(np.abs(out - x.samples)) <= 1e-6 * np.max(np.abs(x.samples))

    def test_empty(self):
        x = TimeSeries(np.linspace(0, 1, 64), 1.0)
        d = decompose(x)
        assert np.all(hht_resynthesize(d).samples == 0)

    def test_single_sine(self):
        x = tone(5.0, seconds=2.0)
        d = decompose(x, SiftConfig(max_imfs=1))
        out = hht_resynthesize(d).samples
        assert rms(out - (x.samples - d.residue.samples)) < 1e-6
        assert rms(out - x.samples) <= rms(d.residue.samples) + 1e-6


class TestMagnitudeSpectrum:
    def test_peak(self):
        x = tone(5.0, seconds=1.0, fs=128.0)
        assert magnitude_spectrum(x).peak_frequency() == pytest.approx(5.0)

    def test_constant(self):
        spec = magnitude_spectrum(np.full(32, 2.5))
        assert spec.magnitudes[0] == pytest.approx(2.5 * 32)
        assert np.max(spec.magnitudes[1:]) < 1e-12
        assert spec.centroid() == 0.0

    def test_two_tone(self):
        fs = 256.0
        t = np.arange(256) / fs
        spec = magnitude_spectrum(TimeSeries(np.sin(2 * np.pi * 8 * t) + np.sin(2 * np.pi * 30 * t), fs))
        top = np.sort(np.argsort(spec.magnitudes)[-2:])
        np.testing.assert_allclose(spec.frequencies[top], [8.0, 30.0])
        a, b = spec.magnitudes[top]
        assert abs(a - b) / max(a, b) < 0.05
        # power-weighted mean of two equal lines
        assert spec.centroid() == pytest.approx(19.0, rel=1e-9)

    @settings(max_examples=40)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 500))
    def test_parseval(self, seed, n):
        x = np.random.default_rng(seed).normal(size=n)
        e = float(np.sum(x**2))
        assert magnitude_spectrum(x).energy() == pytest.approx(e, rel=1e-9)

    def test_too_short(self):
        with pytest.raises(DomainError):
            magnitude_spectrum([1.0])


def test_decomposition_without_imfs_has_empty_spectrum():
    src = TimeSeries([0.0, 1.0, 2.0, 3.0], 1.0)
    hs = hilbert_spectrum(Decomposition((), src, src))
    assert len(hs) == 0
