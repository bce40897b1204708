"""Command-line pipeline: simulate -> extract -> test -> report, plus the
analytic rate sweep.  Every command writes a JSON manifest describing its
inputs, outputs (with hashes), configuration and seed, so any artifact can
be reproduced bit for bit.

Exit status reflects tool health only; statistical pass/fail lives in the
report files.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .analysis import run_report, write_report
from .bits import (BitPacker, BitStream, bit_rate, cycle_parity_bits,
                   extract_bits, read_bits, read_bits_ascii, read_bits_raw,
                   split_streams, write_bits, write_bits_ascii, write_bits_raw)
from .config import SimConfig
from .ratemodel import find_peak, sweep_rate, write_rate_csv
from .sim import (EventStream, iter_tagged, read_events, write_events,
                  write_histogram_csv, cycle_histogram)
from .sts import (BatteryReport, TestResult, battery_many,
                  proportion_analysis, write_results_csv, write_summary_csv)

SEED_ENV_VAR = "QRNG_SEED"


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        return int(env)
    return 0


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _atomic(path, writer) -> None:
    """Write via a temp file so failed runs leave no partial outputs."""
    tmp = str(path) + ".tmp"
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_manifest(manifest_path, argv, outputs, inputs=(), **extra) -> None:
    doc = {
        "tool": "sdqrng",
        "version": __version__,
        "command": list(argv),
        "created_utc": datetime.now(timezone.utc).isoformat(),
        **extra,
        "inputs": [{"path": str(p), "sha256": _sha256(p)} for p in inputs],
        "outputs": [{"path": str(p), "sha256": _sha256(p),
                     "bytes": os.path.getsize(p)} for p in outputs],
    }

    def write(tmp):
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")

    _atomic(manifest_path, write)


def _config_from_args(args) -> SimConfig:
    return SimConfig(
        clock_freq=args.clock_hz,
        mu=args.mu,
        nu=args.nu,
        dark_prob=args.dark_hz / args.clock_hz,
        jitter_sigma=args.jitter_ps * 1e-12,
        jitter_mean=args.jitter_mean_ps * 1e-12,
        dead_time=args.dead_time_ns * 1e-9,
        afterpulse_prob=args.afterpulse,
        seed=_resolve_seed(args.seed),
        duration_s=args.seconds,
        cycles=args.cycles,
    )


def cmd_simulate(args, argv) -> int:
    config = _config_from_args(args)
    chunks = list(iter_tagged(config))
    if chunks:
        cycles = np.concatenate([c for c, _ in chunks])
        offsets = np.concatenate([o for _, o in chunks])
    else:
        cycles = np.empty(0, dtype=np.uint64)
        offsets = np.empty(0, dtype=np.float64)
    stream = EventStream(config.clock_freq, config.n_cycles, cycles, offsets, config)
    _atomic(args.out, lambda tmp: write_events(stream, tmp))
    outputs = [args.out]
    if args.histogram_csv:
        hist = cycle_histogram(stream, args.histogram_bin_ps * 1e-12,
                               args.histogram_cycles)
        _atomic(args.histogram_csv, lambda tmp: write_histogram_csv(hist, tmp))
        outputs.append(args.histogram_csv)
    _write_manifest(str(args.out) + ".manifest.json", argv, outputs,
                    seed=config.seed, config=config.to_dict())
    rate = bit_rate(stream) if config.n_cycles else 0.0
    print(f"simulated {config.n_cycles} gates -> {len(stream)} tagged events "
          f"({rate / 1e6:.3f} MHz sustained)")
    return 0


def cmd_extract(args, argv) -> int:
    stream = read_events(args.events)
    bits = extract_bits(stream)
    writer = {"bits": write_bits, "ascii": write_bits_ascii,
              "raw": write_bits_raw}[args.format]
    _atomic(args.out, lambda tmp: writer(bits, tmp))
    _write_manifest(str(args.out) + ".manifest.json", argv, [args.out],
                    inputs=[args.events], n_bits=bits.n_bits, format=args.format)
    rate = bit_rate(stream) if stream.n_cycles else 0.0
    print(f"extracted {bits.n_bits} bits ({rate / 1e6:.3f} Mbit/s sustained)")
    return 0


def _load_bits(args) -> BitStream:
    if args.format == "raw":
        if args.n_bits is None:
            raise ValueError("--n-bits is required for raw input")
        return read_bits_raw(args.bits, args.n_bits)
    if args.format == "ascii":
        return read_bits_ascii(args.bits)
    return read_bits(args.bits)


def cmd_test(args, argv) -> int:
    bits = _load_bits(args)
    if (args.streams is None) != (args.stream_bits is None):
        raise ValueError("--streams and --stream-bits must be given together")
    if args.streams is not None:
        streams = split_streams(bits, args.streams, args.stream_bits)
        ids = [str(i) for i in range(args.streams)]
    else:
        streams = [bits]
        ids = ["0"]
    all_results = battery_many(streams, args.alpha, jobs=args.jobs)
    os.makedirs(args.out_dir, exist_ok=True)
    results_csv = os.path.join(args.out_dir, "results.csv")
    outputs = [results_csv]
    if len(streams) >= 2:
        report = proportion_analysis(list(zip(ids, all_results)), args.alpha)
        summary_csv = os.path.join(args.out_dir, "summary.csv")
        _atomic(results_csv, lambda tmp: write_results_csv(report, tmp))
        _atomic(summary_csv, lambda tmp: write_summary_csv(report, tmp))
        outputs.append(summary_csv)
        flagged = [l for l in report.lines
                   if l.in_range is False]
        print(f"{len(streams)} streams x {len(all_results[0])} tests; "
              f"{len(report.lines)} p-value lines, "
              f"{len(flagged)} below the confidence band")
        for line in flagged:
            print(f"  LOW {line.line_name}: {line.proportion:.4f} "
                  f"< {line.confidence_lo:.4f}")
    else:
        report = BatteryReport(args.alpha, list(zip(ids, all_results)), [])
        _atomic(results_csv, lambda tmp: write_results_csv(report, tmp))
        for res in all_results[0]:
            if not res.applicable:
                print(f"  {res.test_name}: not applicable "
                      f"({res.stats.get('reason', '')})")
            else:
                verdict = "pass" if res.passed else "FAIL"
                print(f"  {res.test_name}: min p = {res.min_p():.6f} [{verdict}]")
    _write_manifest(os.path.join(args.out_dir, "manifest.json"), argv, outputs,
                    inputs=[args.bits], alpha=args.alpha,
                    streams=len(streams), stream_bits=args.stream_bits)
    return 0


def cmd_sweep_rate(args, argv) -> int:
    theory, limited = sweep_rate(args.clock_hz, args.mu_nu_min, args.mu_nu_max,
                                 args.points, args.dark_hz / args.clock_hz,
                                 args.dead_time_ns * 1e-9)
    _atomic(args.out, lambda tmp: write_rate_csv(theory, limited, tmp))
    _write_manifest(str(args.out) + ".manifest.json", argv, [args.out])
    x, r = find_peak(theory)
    xl, rl = find_peak(limited)
    print(f"theory peak {r / 1e6:.2f} MHz at mu*nu = {x:.4f}; "
          f"dead-time-limited peak {rl / 1e6:.3f} MHz at mu*nu = {xl:.4f}")
    return 0


def _results_from_csv(path, alpha: float) -> list[tuple[str, list[TestResult]]]:
    """Rebuild per-stream results from a results.csv written by cmd_test."""
    rows: dict[str, dict[str, list]] = {}
    stream_order: list[str] = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "stream_id,test_name,p_value_index,p_value,passed,applicable":
            raise ValueError(f"{path}: not a battery results CSV")
        for line in fh:
            sid, name, _idx, p, _ok, applicable = line.rstrip("\n").split(",")
            if sid not in rows:
                rows[sid] = {}
                stream_order.append(sid)
            rows[sid].setdefault(name, [])
            if applicable == "True":
                rows[sid][name].append(float(p))
            else:
                rows[sid][name] = None
    out = []
    for sid in stream_order:
        results = []
        for name, pvals in rows[sid].items():
            if pvals is None:
                results.append(TestResult(name, (), False, None))
            else:
                results.append(TestResult(name, tuple(pvals), True,
                                          all(p >= alpha for p in pvals)))
        out.append((sid, results))
    return out


def cmd_report(args, argv) -> int:
    stream = read_events(args.events)
    bits = _load_bits(args)
    battery_report = None
    inputs = [args.events, args.bits]
    if args.results_csv:
        per_stream = _results_from_csv(args.results_csv, args.alpha)
        battery_report = proportion_analysis(per_stream, args.alpha) \
            if len(per_stream) >= 2 else BatteryReport(args.alpha, per_stream, [])
        inputs.append(args.results_csv)
    doc = run_report(stream, bits, battery_report,
                     histogram_bin_width=args.histogram_bin_ps * 1e-12)
    os.makedirs(args.out_dir, exist_ok=True)
    text_path = os.path.join(args.out_dir, "report.txt")
    json_path = os.path.join(args.out_dir, "report.json")
    _atomic(text_path, lambda tmp: write_report(doc, tmp, os.devnull))
    _atomic(json_path, lambda tmp: write_report(doc, os.devnull, tmp))
    _write_manifest(os.path.join(args.out_dir, "manifest.json"), argv,
                    [text_path, json_path], inputs=inputs)
    print(f"report written to {args.out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdqrng",
        description="Gated-detector random number generator: simulation, "
                    "bit extraction, statistical testing, reporting.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate tagged detection events")
    sim.add_argument("--clock-hz", type=float, default=1.03e9)
    sim.add_argument("--mu", type=float, default=0.3,
                     help="mean photons per gate")
    sim.add_argument("--nu", type=float, default=0.1,
                     help="detector efficiency")
    sim.add_argument("--dark-hz", type=float, default=1.0e4,
                     help="dark count rate, converted to a per-gate probability")
    sim.add_argument("--jitter-ps", type=float, default=27.0,
                     help="within-gate arrival-time sigma")
    sim.add_argument("--jitter-mean-ps", type=float, default=250.0)
    sim.add_argument("--dead-time-ns", type=float, default=200.0)
    sim.add_argument("--afterpulse", type=float, default=0.0)
    group = sim.add_mutually_exclusive_group(required=True)
    group.add_argument("--seconds", type=float, default=None)
    group.add_argument("--cycles", type=int, default=None)
    sim.add_argument("--seed", type=int, default=None,
                     help=f"simulation seed (falls back to ${SEED_ENV_VAR}, then 0)")
    sim.add_argument("--out", required=True)
    sim.add_argument("--histogram-csv", default=None,
                     help="also write a folded arrival-time histogram CSV")
    sim.add_argument("--histogram-bin-ps", type=float, default=2.0)
    sim.add_argument("--histogram-cycles", type=int, default=4)
    sim.set_defaults(func=cmd_simulate)

    ext = sub.add_parser("extract", help="turn tagged events into bits")
    ext.add_argument("--events", required=True)
    ext.add_argument("--out", required=True)
    ext.add_argument("--format", choices=("bits", "ascii", "raw"), default="bits")
    ext.set_defaults(func=cmd_extract)

    tst = sub.add_parser("test", help="run the statistical battery")
    tst.add_argument("--bits", required=True)
    tst.add_argument("--format", choices=("bits", "ascii", "raw"), default="bits")
    tst.add_argument("--n-bits", type=int, default=None,
                     help="bit count, required for raw input")
    tst.add_argument("--alpha", type=float, default=0.01)
    tst.add_argument("--streams", type=int, default=None,
                     help="split the input into this many substreams")
    tst.add_argument("--stream-bits", type=int, default=None,
                     help="bits per substream")
    tst.add_argument("--jobs", type=int, default=1)
    tst.add_argument("--out-dir", required=True)
    tst.set_defaults(func=cmd_test)

    swp = sub.add_parser("sweep-rate", help="analytic rate model sweep")
    swp.add_argument("--clock-hz", type=float, default=1.03e9)
    swp.add_argument("--mu-nu-min", type=float, default=1e-3)
    swp.add_argument("--mu-nu-max", type=float, default=1e2)
    swp.add_argument("--points", type=int, default=200)
    swp.add_argument("--dark-hz", type=float, default=0.0)
    swp.add_argument("--dead-time-ns", type=float, default=0.0)
    swp.add_argument("--out", required=True)
    swp.set_defaults(func=cmd_sweep_rate)

    rep = sub.add_parser("report", help="combined run report")
    rep.add_argument("--events", required=True)
    rep.add_argument("--bits", required=True)
    rep.add_argument("--format", choices=("bits", "ascii", "raw"), default="bits")
    rep.add_argument("--n-bits", type=int, default=None)
    rep.add_argument("--results-csv", default=None,
                     help="results.csv from the test command")
    rep.add_argument("--alpha", type=float, default=0.01)
    rep.add_argument("--histogram-bin-ps", type=float, default=2.0)
    rep.add_argument("--out-dir", required=True)
    rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, argv)
    except (OSError, ValueError) as exc:
        print(f"sdqrng: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
