"""Hilbert-Huang transform, Haar wavelets and ECG feature extraction."""

import logging

from .dwt import WaveletDecomposition, dwt_multilevel, haar_inverse_step, haar_step, idwt_multilevel
from .ecg import (
    Abnormality,
    Beat,
    DetectorConfig,
    EcgFeatureSet,
    EcgSynthParams,
    Rhythm,
    beat_schedule,
    detect_r_peaks,
    extract_features,
    synthesize_ecg,
)
from .emd import Criterion, Decomposition, Imf, SiftConfig, decompose, extract_imf, is_imf, reconstruct, sd_value, sift_once
from .errors import DomainError, NotEnoughExtremaError
from .hsa import (
    AnalyticSignal,
    HilbertSpectrum,
    MagnitudeSpectrum,
    analytic_signal,
    hht_resynthesize,
    hilbert_spectrum,
    hilbert_transform,
    instantaneous_frequency,
    magnitude_spectrum,
    weighted_mean_frequency,
)
from .signal_core import (
    CubicSpline,
    EnvelopePair,
    ExtremaSet,
    TimeSeries,
    build_envelopes,
    count_zero_crossings,
    find_extrema,
    fit_cubic_spline,
    local_mean,
)

logging.getLogger(__name__).addHandler(logging.NullHandler())

__version__ = "0.1.0"
