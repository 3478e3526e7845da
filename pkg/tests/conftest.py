import numpy as np
import pytest

from hht_dsp import EcgSynthParams, SiftConfig, TimeSeries, decompose, synthesize_ecg

ACCEPTANCE_LINES: list[str] = []


def tone(freq, seconds=1.0, fs=1000.0, amp=1.0, phase=0.0, kind="sin"):
    t = np.arange(int(round(seconds * fs))) / fs
    f = np.sin if kind == "sin" else np.cos
    return TimeSeries(amp * f(2 * np.pi * freq * t + phase), fs)


def interior(n, fraction=0.05):
    k = int(np.floor(n * fraction))
    return slice(k, n - k)


def rms(a):
    return float(np.sqrt(np.mean(np.square(a))))


def build_corpus(n_signals=50, seed=20240611):
    """Randomized tones, chirps and synthetic ECGs with 256..8192 samples."""
    rng = np.random.default_rng(seed)
    corpus = []
    for i in range(n_signals):
        kind = ("tones", "chirp", "ecg")[i % 3]
        n = int(rng.integers(256, 8193))
        if kind == "tones":
            fs = 1000.0
            t = np.arange(n) / fs
            x = np.zeros(n)
            for _ in range(int(rng.integers(1, 4))):
                f = rng.uniform(1.0, 80.0)
                x += rng.uniform(0.2, 2.0) * np.sin(2 * np.pi * f * t + rng.uniform(0, 2 * np.pi))
            x += rng.uniform(-1.0, 1.0)
            corpus.append((f"tones#{i}", TimeSeries(x, fs)))
        elif kind == "chirp":
            fs = 1000.0
            t = np.arange(n) / fs
            f0, f1 = rng.uniform(1.0, 20.0), rng.uniform(20.0, 120.0)
            rate = (f1 - f0) / t[-1]
            x = rng.uniform(0.5, 3.0) * np.cos(2 * np.pi * (f0 * t + 0.5 * rate * t**2))
            corpus.append((f"chirp#{i}", TimeSeries(x, fs)))
        else:
            fs = float(rng.choice([250.0, 500.0]))
            hr = float(rng.uniform(50, 150))
            p = EcgSynthParams(duration_s=n / fs, heart_rate_bpm=hr, sample_rate_hz=fs, seed=int(rng.integers(1 << 16)))
            if 60.0 / hr / 2.0 >= p.duration_s:
                p = EcgSynthParams(duration_s=n / fs, heart_rate_bpm=150.0, sample_rate_hz=fs)
            corpus.append((f"ecg#{i}", synthesize_ecg(p)))
    return corpus


@pytest.fixture(scope="session")
def corpus():
    return build_corpus()


@pytest.fixture(scope="session")
def corpus_decompositions(corpus):
    """Default configuration: S-number criterion with S = 4."""
    cfg = SiftConfig(criterion="snumber", s_number=4)
    return [(name, decompose(x, cfg)) for name, x in corpus]


@pytest.fixture(scope="session")
def corpus_decompositions_sd(corpus):
    cfg = SiftConfig(criterion="sd")
    return [(name, decompose(x, cfg)) for name, x in corpus]


@pytest.fixture(scope="session")
def acceptance_report():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
