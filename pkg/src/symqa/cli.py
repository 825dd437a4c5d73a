"""Command-line entry point: ``symqa <subcommand> [options]``.

Exit codes: 0 success, 1 usage or config error, 2 numerical failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .annealing import (DRIVERS, THREADS_ENV, driver_operator, optimize_amplitude,
                        problem_operator, run, sweep_annealing_time)
from .errors import IntegrationError, NumericalError, SymqaError
from .hamiltonians import AnnealSchedule
from .io import (PRESETS, CurveWriter, dumps_record, failure_record, fmt, load_config,
                 result_record, spectrum_csv, sweep_csv, sweep_summary)
from .spectra import DEFAULT_GRID, trace_labeled_spectrum, trace_spectrum

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _drivers(text):
    drivers = tuple(d.strip() for d in text.split(",") if d.strip())
    bad = [d for d in drivers if d not in DRIVERS]
    if bad or not drivers:
        raise argparse.ArgumentTypeError(
            f"drivers must be a comma list from {', '.join(DRIVERS)}; got {text!r}")
    return drivers


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=Path, help="JSON config file")
    source.add_argument("--preset", choices=PRESETS, help="shipped reproduction config")
    common.add_argument("--drivers", type=_drivers, help="comma list overriding the config")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", type=Path, help="output file")
    common.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")

    parser = _Parser(prog="symqa", description="Symmetric-subspace annealing simulator.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", parents=[common], help="instantaneous spectrum CSV")
    p.add_argument("--sectors", action="store_true",
                   help="label levels by magnetization sector (conserving drivers only)")

    sub.add_parser("anneal", parents=[common], help="single run, JSON line per driver")

    for name, text in (("sweep", "annealing-time sweep CSV and summary"),
                       ("optimize", "amplitude scan at the config annealing time")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--threads", type=_positive_int,
                       help=f"worker processes (default ${THREADS_ENV} or 1)")

    sub.add_parser("verify", help="run the built-in oracle checks")
    return parser


def _load(args):
    config = load_config(args.config, args.preset)
    return config.with_overrides(seed=args.seed, drivers=args.drivers)


def _driver_path(out, driver, multiple):
    if not multiple:
        return out
    return out.with_name(f"{out.stem}_{driver}{out.suffix or '.csv'}")


def cmd_spectrum(args):
    config = _load(args)
    drivers = config.drivers
    if args.out is None and len(drivers) > 1:
        raise SymqaError("several drivers selected; give --out or a single --drivers value")
    writer = CurveWriter()
    for driver in drivers:
        exp = config.experiment(driver)
        H = problem_operator(exp)
        schedule = AnnealSchedule(H, driver_operator(exp, H.sites), exp.annealing_time)
        points = config.spectrum_option("grid_points", DEFAULT_GRID)
        count = config.spectrum_option("level_count", None)
        trace = (trace_labeled_spectrum if args.sectors else trace_spectrum)(
            schedule, points, count)
        text = spectrum_csv(trace)
        if args.out is None:
            sys.stdout.write(text)
        else:
            writer.write(_driver_path(args.out, driver, len(drivers) > 1), text)
    return EXIT_OK


def cmd_anneal(args):
    config = _load(args)
    lines = []
    status = EXIT_OK
    for driver in config.drivers:
        exp = config.experiment(driver)
        try:
            record = result_record(exp, run(exp))
        except (IntegrationError, NumericalError) as exc:
            record = failure_record(exp, exc)
            status = EXIT_NUMERICAL
        line = dumps_record(record)
        print(line, flush=True)
        lines.append(line)
        if status:
            break
    if args.out is not None:
        CurveWriter().write(args.out, "\n".join(lines) + "\n")
    return status


def cmd_optimize(args):
    config = _load(args)
    rows = ["amplitude,driver,error,fidelity"]
    for driver in config.drivers:
        exp = config.experiment(driver)
        opt = optimize_amplitude(exp, config.amplitude_grid(driver),
                                 refine=config.sweep_option("refine", False))
        record = result_record(exp, opt.best_result)
        record["record_type"] = "amplitude_optimum"
        record["best_amplitude"] = opt.best_amplitude
        record["curve"] = [[a, r.estimation_error, r.ground_fidelity] for a, r in opt.curve]
        print(dumps_record(record), flush=True)
        rows += [f"{fmt(a)},{driver},{fmt(r.estimation_error)},{fmt(r.ground_fidelity)}"
                 for a, r in opt.curve]
    if args.out is not None:
        CurveWriter().write(args.out, "\n".join(rows) + "\n")
    return EXIT_OK


def cmd_sweep(args):
    config = _load(args)
    sweeps = []
    for driver in config.drivers:
        sweeps.append(sweep_annealing_time(
            config.experiment(driver), config.T_list(),
            optimize=config.sweep_option("optimize", True),
            amplitude_grid=config.amplitude_grid(driver),
            refine=config.sweep_option("refine", False),
            threads=args.threads))
    text = sweep_csv(sweeps)
    summary = json.dumps(sweep_summary(sweeps, config.name), sort_keys=True, indent=2) + "\n"
    if args.out is None:
        sys.stdout.write(text)
        sys.stderr.write(summary)
        return EXIT_OK
    writer = CurveWriter()
    writer.write(args.out, text)
    writer.write(args.out.with_name(f"{args.out.stem}_summary.json"), summary)
    return EXIT_OK


def cmd_verify(args):
    from .verify import format_table, run_checks

    results = run_checks()
    print(format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


COMMANDS = {"spectrum": cmd_spectrum, "anneal": cmd_anneal, "sweep": cmd_sweep,
            "optimize": cmd_optimize, "verify": cmd_verify}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (IntegrationError, NumericalError) as exc:
        print(f"symqa: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SymqaError as exc:
        print(f"symqa: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
