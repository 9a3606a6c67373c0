"""Command-line pipeline: simulate, synth, ingest, compare, calibrate, deviation.

Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 internal
error.  Results go to stdout, diagnostics to stderr, and every command is a
pure function of its input files: identical inputs give identical output
bytes.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .calibrate import grid_search, load_param_space, write_result_json
from .compare import (
    build_report,
    write_deviation_csv,
    write_report_json,
    write_scatter_csvs,
    write_violin_csvs,
)
from .errors import BudgetExceededError, V2xFieldError
from .ingest import correlate_gps, load_bssid_map, parse_field_csv, parse_pcap
from .records import read_records, write_records
from .scenario import SynthModel, load_scenario, run_simulation, synthesize_field_data
from .trace import load_trace, trace_deviation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    """argparse flavor whose usage failures exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _probability(text: str) -> float:
    value = float(text)
    if not (0.0 <= value <= 1.0):
        raise argparse.ArgumentTypeError(f"{value} is not a probability in [0, 1]")
    return value


def _non_negative(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"{value} must be >= 0")
    return value


def _cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    records = run_simulation(scenario)
    write_records(records, args.out, args.format)
    print(f"records={len(records)}")
    return EXIT_OK


def _cmd_synth(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        from dataclasses import replace

        scenario = replace(scenario, seed=args.seed)
    model = SynthModel(
        extra_loss_db=args.extra_loss, shadowing_sigma_db=args.sigma, drop_prob=args.drop
    )
    records = synthesize_field_data(scenario, model)
    write_records(records, args.out, args.format)
    print(f"records={len(records)}")
    return EXIT_OK


def _cmd_ingest(args) -> int:
    if args.pcap:
        if not args.trace:
            raise V2xFieldError("--trace is required when ingesting pcap captures")
        bssid_map = load_bssid_map(args.bssid_map) if args.bssid_map else None
        captures = []
        skipped = rejected = 0
        for p in args.pcap:
            result = parse_pcap(p, bssid_map)
            captures.extend(result.captures)
            skipped += result.skipped
            rejected += result.rejected
        trace = load_trace(args.trace)
        correlation = correlate_gps(captures, trace, args.max_skew_ms)
        records = list(correlation.records)
        print(f"skipped={skipped} rejected={rejected} dropped={correlation.dropped}")
    else:
        records = []
        for p in args.csv:
            records.extend(parse_field_csv(p))
        records.sort(key=lambda r: (r.t, r.station_id))
    write_records(records, args.out, args.format)
    print(f"records={len(records)}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    sim = read_records(args.sim)
    field = read_records(args.field)
    scenario = load_scenario(args.scenario)
    report = build_report(sim, field, list(scenario.rsus))
    write_report_json(report, args.report)
    if args.export_dir:
        write_violin_csvs(report, args.export_dir)
        write_scatter_csvs(sim, field, list(scenario.rsus), args.export_dir)
    print(
        f"msg_delta_pct={report.total_msg_delta_pct:.2f} "
        f"mean_rssi_delta_db={report.mean_rssi_delta_db:.2f}"
    )
    return EXIT_OK


def _cmd_calibrate(args) -> int:
    scenario = load_scenario(args.scenario)
    field = read_records(args.field)
    space = load_param_space(args.space)
    result = grid_search(space, field, scenario)
    write_result_json(result, args.out)
    best = " ".join(f"{name}={value}" for name, value in sorted(result.best_values.items()))
    print(f"evaluations={result.evaluations} best_score={result.best_score:.6f} {best}")
    return EXIT_OK


def _cmd_deviation(args) -> int:
    trace_a = load_trace(args.trace_a)
    trace_b = load_trace(args.trace_b)
    summary = trace_deviation(trace_a, trace_b)
    write_deviation_csv(trace_a, summary, args.out)
    print(f"max_m={summary.max_m:.2f} median_m={summary.median_m:.2f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="v2xfield", description=__doc__)
    parser.add_argument("--version", action="version", version=f"v2xfield {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the beacon simulation for a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"), default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("synth", help="generate a synthetic field dataset")
    p.add_argument("--scenario", required=True)
    p.add_argument("--extra-loss", type=float, default=0.0, help="flat extra attenuation, dB")
    p.add_argument("--sigma", type=_non_negative, default=0.0, help="shadowing std dev, dB")
    p.add_argument("--drop", type=_probability, default=0.0, help="independent drop probability")
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"), default=None)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("ingest", help="turn captures or field CSVs into records")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--pcap", action="append", help="pcap capture (repeatable)")
    group.add_argument("--csv", action="append", help="pre-extracted field CSV (repeatable)")
    p.add_argument("--trace", help="GPS trace for position correlation (pcap mode)")
    p.add_argument("--bssid-map", help="file mapping transmitter MACs to station ids")
    p.add_argument("--max-skew-ms", type=int, default=200)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"), default=None)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("compare", help="compare simulated and field records")
    p.add_argument("--sim", required=True)
    p.add_argument("--field", required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--report", required=True, help="output JSON report path")
    p.add_argument("--export-dir", help="directory for per-figure CSV exports")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("calibrate", help="grid-search channel parameters against field data")
    p.add_argument("--scenario", required=True)
    p.add_argument("--field", required=True)
    p.add_argument("--space", required=True, help="TOML file with a [calibration] section")
    p.add_argument("--out", required=True, help="output JSON result path")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("deviation", help="deviation series between two traces")
    p.add_argument("--trace-a", required=True, help="reference trace")
    p.add_argument("--trace-b", required=True, help="trace to measure against the reference")
    p.add_argument("--out", required=True, help="output deviation CSV path")
    p.set_defaults(func=_cmd_deviation)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except V2xFieldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
