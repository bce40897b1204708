"""Figure-style analytics: lag-1 byte correlation matrix with a uniformity
chi-square, arrival-histogram peak measurements, and the combined run
report."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .bits import BitStream, bit_rate
from .sim import CycleHistogram, EventStream, cycle_histogram
from .sts.battery import BatteryReport
from .sts.special import igamc

MIN_CORRELATION_BITS = 16
_N_CELLS = 256 * 256


@dataclass(frozen=True)
class ByteCorrelationMatrix:
    """Occurrence counts of consecutive non-overlapping byte pairs."""

    counts: np.ndarray  # (256, 256) int64; counts[x, y] = pairs (x then y)
    n_pairs: int


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    p_value: float
    applicable: bool


def byte_correlation(bits: BitStream) -> ByteCorrelationMatrix:
    """Lag-1 scatter counts of the stream read as MSB-first bytes; a partial
    trailing byte is ignored."""
    if bits.n_bits < MIN_CORRELATION_BITS:
        raise ValueError(f"need at least {MIN_CORRELATION_BITS} bits, "
                         f"got {bits.n_bits}")
    b = bits.data[: bits.n_bits // 8].astype(np.int64)
    pair_idx = b[:-1] * 256 + b[1:]
    counts = np.bincount(pair_idx, minlength=_N_CELLS).reshape(256, 256)
    return ByteCorrelationMatrix(counts, int(b.size - 1))


def uniformity_chi_square(matrix: ByteCorrelationMatrix) -> ChiSquareResult:
    """Pearson chi-square of the 65536 pair cells against uniformity
    (65535 degrees of freedom); needs >= 5 expected counts per cell."""
    if matrix.n_pairs < 5 * _N_CELLS:
        return ChiSquareResult(float("nan"), float("nan"), False)
    expected = matrix.n_pairs / _N_CELLS
    stat = float(((matrix.counts - expected) ** 2 / expected).sum())
    p = igamc((_N_CELLS - 1) / 2.0, stat / 2.0)
    return ChiSquareResult(stat, p, True)


def write_matrix_csv(matrix: ByteCorrelationMatrix, path) -> None:
    """256 lines of 256 comma-separated counts (row = first byte)."""
    with open(path, "w") as fh:
        for row in matrix.counts:
            fh.write(",".join(str(int(v)) for v in row))
            fh.write("\n")


def histogram_fwhm(hist: CycleHistogram) -> float:
    """Full width at half maximum of the tallest histogram peak, from linear
    interpolation of the half-maximum crossings (seconds)."""
    counts = hist.counts.astype(np.float64)
    if counts.max() <= 0:
        raise ValueError("histogram is empty")
    peak = int(np.argmax(counts))
    half = counts[peak] / 2.0

    def cross(direction: int) -> float:
        i = peak
        while 0 <= i + direction < counts.size and counts[i + direction] >= half:
            i += direction
        j = i + direction
        if j < 0 or j >= counts.size:
            return float(i)
        # linear interpolation between bin centers i and j
        frac = (counts[i] - half) / (counts[i] - counts[j])
        return i + direction * frac

    return float((cross(+1) - cross(-1)) * hist.bin_width)


def histogram_zero_gap(hist: CycleHistogram) -> float:
    """Longest contiguous run of empty bins, treating the folded window as
    circular (seconds)."""
    zero = hist.counts == 0
    if zero.all():
        return float(hist.window)
    if not zero.any():
        return 0.0
    # break the circle at a nonzero bin, then scan runs
    first_nz = int(np.argmax(~zero))
    rolled = np.roll(zero, -first_nz)
    best = run = 0
    for z in rolled:
        run = run + 1 if z else 0
        best = max(best, run)
    return float(best * hist.bin_width)


def run_report(sim: EventStream, bits: BitStream,
               battery_report: BatteryReport | None = None,
               histogram_bin_width: float = 2e-12) -> dict:
    """Flat key/value document summarizing one pipeline run.  Deterministic
    for a fixed (config, seed): no timestamps, no environment state."""
    report: dict = {}
    if sim.config is not None:
        for key, value in sim.config.to_dict().items():
            report[f"config.{key}"] = value
    report["clock_hz"] = sim.clock_freq
    report["n_cycles"] = sim.n_cycles
    report["event_count"] = len(sim)
    report["bit_count"] = bits.n_bits
    report["bit_rate_hz"] = bit_rate(sim) if sim.n_cycles > 0 else 0.0
    report["ones_fraction"] = bits.mean() if bits.n_bits else float("nan")

    if len(sim):
        hist = cycle_histogram(sim, histogram_bin_width, 1)
        report["histogram.bin_width_ps"] = histogram_bin_width * 1e12
        report["histogram.peak_fwhm_ps"] = histogram_fwhm(hist) * 1e12
        report["histogram.zero_gap_ps"] = histogram_zero_gap(hist) * 1e12
    else:
        report["histogram.bin_width_ps"] = histogram_bin_width * 1e12
        report["histogram.peak_fwhm_ps"] = None
        report["histogram.zero_gap_ps"] = None

    if battery_report is not None:
        applicable = passed = 0
        for _, results in battery_report.per_stream:
            for res in results:
                if res.applicable:
                    applicable += 1
                    passed += bool(res.passed)
        report["battery.alpha"] = battery_report.alpha
        report["battery.streams"] = battery_report.n_streams
        report["battery.results_applicable"] = applicable
        report["battery.results_passed"] = passed
        report["battery.all_lines_in_band"] = battery_report.all_in_range()
        report["battery.note"] = battery_report.note
    else:
        report["battery.streams"] = 0
        report["battery.note"] = "battery not run"

    if bits.n_bits >= MIN_CORRELATION_BITS:
        matrix = byte_correlation(bits)
        chi = uniformity_chi_square(matrix)
        report["byte_correlation.pairs"] = matrix.n_pairs
        report["byte_correlation.chi2"] = chi.statistic if chi.applicable else None
        report["byte_correlation.p_value"] = chi.p_value if chi.applicable else None
        report["byte_correlation.applicable"] = chi.applicable
    else:
        report["byte_correlation.pairs"] = 0
        report["byte_correlation.applicable"] = False
    report["byte_correlation.pairing"] = "consecutive non-overlapping bytes, lag 1"
    return report


def render_report_text(report: dict) -> str:
    width = max(len(k) for k in report) + 2
    lines = ["run report", "=" * 10]
    for key, value in report.items():
        if isinstance(value, float):
            value = f"{value:.6g}"
        lines.append(f"{key:<{width}}{value}")
    return "\n".join(lines) + "\n"


def write_report(report: dict, text_path, json_path) -> None:
    with open(text_path, "w", encoding="utf-8") as fh:
        fh.write(render_report_text(report))
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=False)
        fh.write("\n")
