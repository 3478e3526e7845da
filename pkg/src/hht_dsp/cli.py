"""Command-line entry point: ``hht-dsp <command> [options]``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import io
from .dwt import dwt_multilevel, idwt_multilevel
from .ecg import Abnormality, EcgSynthParams, detect_r_peaks, extract_features, synthesize_ecg
from .emd import Criterion, Decomposition, SiftConfig, decompose, reconstruct
from .hsa import (
    analytic_signal,
    hht_resynthesize,
    hilbert_spectrum,
    magnitude_spectrum,
    weighted_mean_frequency,
)
from .errors import DomainError
from .signal_core import TimeSeries

logger = logging.getLogger(__name__)

COMMANDS = ("synth", "decompose", "hsa", "dwt", "features", "pipeline")
LOG_ENV = "HHT_DSP_LOG"


@dataclass(frozen=True)
class RunConfig:
    command: str
    output_dir: Path
    input_path: Optional[Path] = None
    rate: Optional[float] = None
    synth: bool = False
    sift: SiftConfig = SiftConfig()
    levels: int = 4
    ecg: EcgSynthParams = EcgSynthParams()
    output_format: str = "csv"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.output_format not in ("csv", "jsonl"):
            raise DomainError(f"unknown output format {self.output_format!r}")
        if self.command != "synth" and not self.synth and self.input_path is None:
            raise DomainError("pass --input or --synth")

    def echo(self) -> dict:
        """JSON-safe view of the configuration for the summary record."""
        sift = dataclasses.asdict(self.sift)
        sift["criterion"] = self.sift.criterion.value
        ecg = {
            "heart_rate_bpm": self.ecg.heart_rate_bpm,
            "duration_s": self.ecg.duration_s,
            "sample_rate_hz": self.ecg.sample_rate_hz,
            "rr_jitter_fraction": self.ecg.rr_jitter_fraction,
            "abnormality": self.ecg.abnormality.value,
            "seed": self.ecg.seed,
        }
        return {
            "command": self.command,
            "input": str(self.input_path) if self.input_path else None,
            "rate": self.rate,
            "synth": self.synth or self.command == "synth",
            "sift": sift,
            "levels": self.levels,
            "ecg": ecg if (self.synth or self.command == "synth") else None,
            "format": self.output_format,
        }


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


class _Stage:
    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        logger.info("stage %s", self.name)
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and not isinstance(exc, StageError):
            raise StageError(self.name, exc) from exc
        return False


def _max_rel(a: np.ndarray, b: np.ndarray, scale: np.ndarray) -> float:
    peak = float(np.max(np.abs(scale)))
    err = float(np.max(np.abs(a - b))) if a.size else 0.0
    return err / peak if peak > 0 else err


def _write_decomposition(out: Path, d: Decomposition, fmt_name: str):
    for imf in d.imfs:
        io.write_series(out / f"imf_{imf.index}.csv", imf.samples, fmt_name)
    io.write_series(out / "residue.csv", d.residue, fmt_name)


def _decomposition_summary(d: Decomposition) -> dict:
    recon = reconstruct(d).samples
    return {
        "n_imfs": d.n_imfs,
        "stop_reason": d.stop_reason,
        "imf_stop_reasons": [imf.stop_reason for imf in d.imfs],
        "imf_sift_iterations": [imf.sift_iterations_used for imf in d.imfs],
        "reconstruction_error": _max_rel(d.source.samples, recon, d.source.samples),
    }


def run_pipeline(config: RunConfig) -> dict:
    """Run the stages ``config.command`` asks for and write their artifacts.

    Returns the summary record. Raises StageError naming the failed stage.
    """
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    (out / "FAILED").unlink(missing_ok=True)
    fmt_name = config.output_format
    cmd = config.command
    summary: dict = {"config": config.echo()}

    with _Stage("load"):
        if config.synth or cmd == "synth":
            ecg = config.ecg
            if config.rate:
                ecg = dataclasses.replace(ecg, sample_rate_hz=config.rate)
            x = synthesize_ecg(ecg)
        else:
            x = io.load_signal(config.input_path, config.rate)
    summary.update(n_samples=len(x), sample_rate_hz=x.sample_rate)
    if cmd in ("synth", "pipeline"):
        io.write_series(out / "signal.csv", x, fmt_name)

    d = None
    signals = None
    if cmd in ("decompose", "hsa", "features", "pipeline"):
        with _Stage("decompose"):
            d = decompose(x, config.sift)
            _write_decomposition(out, d, fmt_name)
        summary.update(_decomposition_summary(d))

    if cmd in ("hsa", "pipeline"):
        with _Stage("hsa"):
            signals = [analytic_signal(imf) for imf in d.imfs]
            centroids, wmf = [], []
            for imf, sig in zip(d.imfs, signals):
                spec = magnitude_spectrum(imf.samples)
                centroids.append(spec.centroid())
                io.write_table(
                    out / f"spectrum_imf_{imf.index}.csv",
                    ("frequency_hz", "magnitude"),
                    zip(spec.frequencies, spec.magnitudes),
                    fmt_name,
                )
                try:
                    wmf.append(weighted_mean_frequency(sig))
                except DomainError:
                    wmf.append(None)
            hs = hilbert_spectrum(d, signals=signals)
            io.write_table(
                out / "hilbert_spectrum.csv",
                ("t", "f", "A", "imf"),
                zip(hs.time, hs.frequency, hs.amplitude, hs.imf_index),
                fmt_name,
            )
            resynth = hht_resynthesize(d, signals).samples
        summary.update(
            spectral_centroids_hz=centroids,
            weighted_mean_frequencies_hz=wmf,
            dropped_negative_frequencies=hs.dropped_negative,
            hht_resynthesis_error=_max_rel(
                x.samples, resynth + d.residue.samples, x.samples
            ),
        )

    if cmd in ("features", "pipeline"):
        with _Stage("features"):
            peaks = detect_r_peaks(x, d)
            records = []
            if peaks:
                feats = extract_features(x, peaks)
                for b in feats.beats:
                    records.append(
                        {
                            "r_index": b.r_index,
                            "r_amplitude_mv": b.r_amplitude_mv,
                            "qrs_duration_s": b.qrs_duration_s,
                            "pre_gradient_mv_per_s": b.pre_gradient_mv_per_s,
                            "post_gradient_mv_per_s": b.post_gradient_mv_per_s,
                        }
                    )
                rr = feats.rr_intervals_s
                rhythm = feats.rhythm_flag.value
                tail = {
                    "summary": True,
                    "n_beats": len(feats.beats),
                    "rr_intervals_s": rr.tolist(),
                    "mean_rr_s": feats.mean_rr_s,
                    "rr_std_s": float(rr.std()) if rr.size else None,
                    "mean_heart_rate_bpm": feats.mean_heart_rate_bpm,
                    "rhythm_flag": rhythm,
                }
            else:
                rhythm = None
                tail = {"summary": True, "n_beats": 0, "rr_intervals_s": [], "rhythm_flag": None}
            records.append(tail)
            io.write_jsonl(out / "features.jsonl", records)
        summary.update(n_beats=len(peaks), rhythm_flag=rhythm)

    if cmd in ("dwt", "pipeline"):
        with _Stage("dwt"):
            w = dwt_multilevel(x, config.levels)
            for m, det in enumerate(w.details, start=1):
                level = TimeSeries(det, x.sample_rate / 2**m, x.t0)
                io.write_series(out / f"dwt_level_{m}.csv", level, fmt_name)
            approx = TimeSeries(w.approximation, x.sample_rate / 2**config.levels, x.t0)
            io.write_series(out / "dwt_approx.csv", approx, fmt_name)
            back = idwt_multilevel(w).samples
        summary.update(dwt_levels=config.levels, dwt_reconstruction_error=_max_rel(x.samples, back, x.samples))

    io.write_jsonl(out / "summary.jsonl", [summary])
    return summary


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hht-dsp",
        description="Empirical mode decomposition, Hilbert spectral analysis, Haar DWT and ECG features.",
    )
    p.add_argument("command", choices=COMMANDS)
    src = p.add_argument_group("input")
    src.add_argument("--input", type=Path, help="series file (one value per line or t,value pairs)")
    src.add_argument("--rate", type=float, help="sample rate in Hz (overrides the file header)")
    src.add_argument("--synth", action="store_true", help="synthesize an ECG instead of reading --input")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--format", dest="output_format", choices=("csv", "jsonl"), default="csv")

    s = p.add_argument_group("sifting")
    s.add_argument("--criterion", choices=[c.value for c in Criterion], default=SiftConfig.criterion.value)
    s.add_argument("--sd-threshold", type=float, default=SiftConfig.sd_threshold)
    s.add_argument("--s-number", type=int, default=SiftConfig.s_number)
    s.add_argument("--max-imfs", type=int, default=None, help="default floor(log2(N))")
    s.add_argument("--max-sift-iterations", type=int, default=SiftConfig.max_sift_iterations)

    p.add_argument("--levels", type=int, default=4, help="Haar DWT depth")

    e = p.add_argument_group("synthetic ECG")
    e.add_argument("--hr", type=float, default=60.0, help="heart rate in bpm")
    e.add_argument("--duration", type=float, default=10.0, help="seconds")
    e.add_argument("--abnormality", choices=[a.value for a in Abnormality], default="none")
    e.add_argument("--jitter", type=float, default=0.0, help="RR jitter fraction")
    e.add_argument("--seed", type=int, default=0)
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    sift = SiftConfig(
        sd_threshold=args.sd_threshold,
        s_number=args.s_number,
        criterion=args.criterion,
        max_sift_iterations=args.max_sift_iterations,
        max_imfs=args.max_imfs,
    )
    ecg = EcgSynthParams(
        duration_s=args.duration,
        heart_rate_bpm=args.hr,
        rr_jitter_fraction=args.jitter,
        abnormality=args.abnormality,
        seed=args.seed,
    )
    return RunConfig(
        command=args.command,
        output_dir=args.out,
        input_path=args.input,
        rate=args.rate,
        synth=args.synth,
        sift=sift,
        levels=args.levels,
        ecg=ecg,
        output_format=args.output_format,
    )


def _configure_logging():
    level = os.environ.get(LOG_ENV, "").strip()
    if not level or level.lower() in ("0", "off", "none"):
        return
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        numeric = logging.DEBUG
    logging.basicConfig(level=numeric, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
    except DomainError as exc:
        parser.error(str(exc))
    try:
        run_pipeline(config)
    except StageError as exc:
        config.output_dir.mkdir(parents=True, exist_ok=True)
        (config.output_dir / "FAILED").write_text(f"{exc.stage}: {exc.cause}\n")
        print(f"hht-dsp: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
