"""Full-battery execution over one or many bit streams, plus the
multi-stream proportion-of-passes analysis.

Per-stream, a test "passes" only if every p-value it emits is >= alpha.
The proportion analysis follows the reference reporting convention: each
emitted p-value line is tracked separately (serial has 2 lines, random
excursions 8, ...), each compared against the confidence band
(1-alpha) +- 3*sqrt(alpha*(1-alpha)/m) computed from its own applicable
stream count m.
"""
from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass, field

from ..bits import BitStream
from . import randtests as rt

METHOD_NOTE = ("battery implements the 15 tests of NIST SP 800-22 rev. 1a "
               "(earlier suite revisions counted 16; Lempel-Ziv was withdrawn)")


@dataclass(frozen=True)
class BatteryParams:
    """Battery defaults for megabit-scale streams."""

    block_frequency_len: int = 128
    template_len: int = 9
    template_blocks: int = 8
    overlapping_block_len: int = 1032
    serial_len: int = 2
    apen_len: int = 2
    linear_complexity_len: int = 500
    rank_matrix_size: int = 32


def battery(bits, alpha: float = 0.01,
            params: BatteryParams = BatteryParams()) -> list[rt.TestResult]:
    """Run all fifteen tests on one stream, in the standard's order."""
    bs = bits if isinstance(bits, BitStream) else BitStream.from_array(bits)
    return [
        rt.frequency_monobit(bs, alpha),
        rt.block_frequency(bs, params.block_frequency_len, alpha),
        rt.cumulative_sums(bs, alpha),
        rt.runs_test(bs, alpha),
        rt.longest_run_of_ones(bs, alpha),
        rt.binary_matrix_rank(bs, params.rank_matrix_size, alpha),
        rt.dft_spectral(bs, alpha),
        rt.non_overlapping_templates(bs, params.template_len,
                                     params.template_blocks, alpha=alpha),
        rt.overlapping_templates(bs, params.template_len,
                                 params.overlapping_block_len, alpha=alpha),
        rt.maurer_universal(bs, alpha=alpha),
        rt.approximate_entropy(bs, params.apen_len, alpha),
        rt.serial_test(bs, params.serial_len, alpha),
        rt.linear_complexity(bs, params.linear_complexity_len, alpha),
        rt.random_excursions(bs, alpha),
        rt.random_excursions_variant(bs, alpha),
    ]


def _battery_task(args):
    data, n_bits, alpha, params = args
    return battery(BitStream(data, n_bits), alpha, params)


def battery_many(streams, alpha: float = 0.01,
                 params: BatteryParams = BatteryParams(),
                 jobs: int = 1) -> list[list[rt.TestResult]]:
    """Battery over several streams, optionally across processes.  Results
    come back in stream order regardless of job count."""
    if jobs <= 1 or len(streams) <= 1:
        return [battery(s, alpha, params) for s in streams]
    tasks = [(s.data, s.n_bits, alpha, params) for s in streams]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(min(jobs, len(streams))) as pool:
        return pool.map(_battery_task, tasks)


@dataclass(frozen=True)
class ProportionLine:
    """Pass proportion of one p-value line across streams."""

    test_name: str
    p_index: int
    label: str
    n_applicable: int
    n_passed: int
    proportion: float | None
    confidence_lo: float
    confidence_hi: float
    in_range: bool | None

    @property
    def line_name(self) -> str:
        return self.test_name if not self.label else f"{self.test_name}.{self.label}"


@dataclass(frozen=True)
class BatteryReport:
    """Per-stream test results plus per-line proportion statistics."""

    alpha: float
    per_stream: list[tuple[str, list[rt.TestResult]]]
    lines: list[ProportionLine]
    note: str = METHOD_NOTE

    @property
    def n_streams(self) -> int:
        return len(self.per_stream)

    def all_in_range(self) -> bool:
        determinate = [l.in_range for l in self.lines if l.in_range is not None]
        return bool(determinate) and all(determinate)


def confidence_interval(alpha: float, n_streams: int) -> tuple[float, float]:
    """(1-alpha) +- 3*sqrt(alpha*(1-alpha)/m), clamped to [0, 1]."""
    if n_streams < 1:
        raise ValueError("n_streams must be >= 1")
    half = 3.0 * math.sqrt(alpha * (1.0 - alpha) / n_streams)
    return max(0.0, 1.0 - alpha - half), min(1.0, 1.0 - alpha + half)


def proportion_analysis(per_stream, alpha: float = 0.01) -> BatteryReport:
    """Aggregate per-stream results into pass proportions per p-value line.

    ``per_stream`` is a sequence of (stream_id, list of TestResult).  Lines
    with no applicable stream are reported as indeterminate.
    """
    per_stream = [(str(sid), list(results)) for sid, results in per_stream]
    if len(per_stream) < 2:
        raise ValueError("proportion analysis needs at least 2 streams")
    # line inventory from the union of results (tests keep a fixed line count)
    layout: dict[str, tuple[int, tuple[str, ...]]] = {}
    for _, results in per_stream:
        for res in results:
            if res.applicable and res.test_name not in layout:
                layout[res.test_name] = (len(res.p_values), res.p_labels)
    lines: list[ProportionLine] = []
    order: list[str] = []
    for _, results in per_stream:
        for res in results:
            if res.test_name not in order:
                order.append(res.test_name)
    for name in order:
        if name not in layout:  # never applicable anywhere
            lines.append(ProportionLine(name, 0, "", 0, 0, None, *confidence_interval(
                alpha, len(per_stream)), None))
            continue
        n_p, labels = layout[name]
        for k in range(n_p):
            m = passed = 0
            for _, results in per_stream:
                for res in results:
                    if res.test_name != name or not res.applicable:
                        continue
                    m += 1
                    if res.p_values[k] >= alpha:
                        passed += 1
            label = labels[k] if k < len(labels) else (str(k) if n_p > 1 else "")
            if m == 0:
                lines.append(ProportionLine(name, k, label, 0, 0, None,
                                            *confidence_interval(alpha, len(per_stream)),
                                            None))
                continue
            lo, hi = confidence_interval(alpha, m)
            prop = passed / m
            lines.append(ProportionLine(name, k, label, m, passed, prop,
                                        lo, hi, lo <= prop <= hi))
    return BatteryReport(alpha, per_stream, lines)


def write_results_csv(report: BatteryReport, path) -> None:
    """Per-stream, per-p-value rows; ``passed`` refers to that p-value."""
    with open(path, "w") as fh:
        fh.write("stream_id,test_name,p_value_index,p_value,passed,applicable\n")
        for sid, results in report.per_stream:
            for res in results:
                if not res.applicable:
                    fh.write(f"{sid},{res.test_name},0,,,False\n")
                    continue
                for k, p in enumerate(res.p_values):
                    ok = p >= report.alpha
                    fh.write(f"{sid},{res.test_name},{k},{p:.6f},{ok},True\n")


def write_summary_csv(report: BatteryReport, path) -> None:
    """One row per p-value line; multi-p tests are suffixed ``.label``."""
    with open(path, "w") as fh:
        fh.write("test_name,proportion,conf_lo,conf_hi,in_range\n")
        for line in report.lines:
            if line.proportion is None:
                fh.write(f"{line.line_name},,{line.confidence_lo:.6f},"
                         f"{line.confidence_hi:.6f},\n")
            else:
                fh.write(f"{line.line_name},{line.proportion:.6f},"
                         f"{line.confidence_lo:.6f},{line.confidence_hi:.6f},"
                         f"{line.in_range}\n")
