import argparse
import json
import sys
from pathlib import Path

from dotenv import load_dotenv

from structs.exceptions import (
    ConfigError,
    EmptyWindow,
    InconsistentRoutes,
    MatrixFormatError,
    NotRankOne,
    NotUnitary,
    QuadratureNotConverged,
    ZeroCoincidence,
)
from structs.result import Result
from structs.statistics import Statistics
from util.config import VERSION, tolerance_profile
from util.logger import CLogger
from util.parser import Parser
from util.processor import Processor
from util.regions import scan, write_scan_csv
from util.verifier import Verifier

load_dotenv()
log = CLogger().get_logger()

ERROR = Result.ERROR
SUCCESS = Result.SUCCESS

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_USAGE = 2
EXIT_EMPTY = 3
EXIT_INCONSISTENT = 4

USAGE_ERRORS = (ConfigError, MatrixFormatError, NotUnitary, NotRankOne, EmptyWindow, ValueError)
INCONSISTENCY_ERRORS = (InconsistentRoutes, QuadratureNotConverged)

DEFAULT_GRID = "200x200"


class UsageExit(Exception):
    """
    argparse reports usage errors by exiting; this carries them to main().
    """


class CliParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageExit(message)


def args_parser() -> argparse.ArgumentParser:
    """
    Helper function to build the CLI.
    Default environment variables will be set in the .env file.
    """
    parser = CliParser(prog="bellsplit", description="Beam-splitter polarization entanglement and Bell violation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-d", "--debug", action="store_true", help="Set logging to debug.")
    common.add_argument("--out", type=Path, help="Write the report here instead of stdout.")
    common.add_argument("--seed", type=int, help="Seed for random draws.")
    common.add_argument("--statistics", choices=[s.value for s in Statistics])

    commands = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    analyze = commands.add_parser("analyze", parents=[common], help="Analyze one configuration, JSON out.")
    analyze.add_argument("--config", type=Path, help="JSON config file.")
    analyze.add_argument("--preset", help="identity, balanced_pc, balanced_mixing(theta) or haar (drawn from --seed).")
    analyze.add_argument("--alpha-sq", type=float, help="Use this |alpha|^2 instead of wavepackets.")
    analyze.add_argument("--tau", type=float, help="Finite coincidence window length.")

    scan_cmd = commands.add_parser("scan", parents=[common], help="Balanced-slice region scan, CSV out.")
    scan_cmd.add_argument("--grid", default=DEFAULT_GRID, help="AxB cells over (|alpha|^2, |(X^dag X)_HV|^2).")
    scan_cmd.add_argument("--cross-check", action="store_true",
                          help="Re-derive every cell on an explicit splitter.")

    verify = commands.add_parser("verify", parents=[common], help="Random-matrix verification campaign.")
    verify.add_argument("--count", type=int, default=1000, help="Number of Haar splitters.")

    return parser


def emit(text: str, out: Path = None):
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return

    with open(out, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)

    log.info("Wrote %s", out)


def dump_json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def cmd_analyze(args) -> int:
    overrides = {
        "preset": args.preset,
        "alpha_sq": args.alpha_sq,
        "tau": args.tau,
        "statistics": args.statistics,
        "seed": args.seed,
    }
    config = Parser.analysis_config(args.config, overrides)
    report = Processor(config).analyze()

    emit(dump_json(report), args.out)

    return EXIT_OK


def cmd_scan(args) -> int:
    alpha_steps, hv_steps = Parser.grid(args.grid)
    statistics = Statistics.parse(args.statistics or Statistics.BOSONIC)
    tolerances = tolerance_profile()

    result = scan(alpha_steps, hv_steps, statistics, cross_check=args.cross_check)

    if args.out is None:
        write_scan_csv(result, sys.stdout)
        sys.stdout.flush()
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            write_scan_csv(result, handle)

        # the CSV carries one header row only, so the run record goes alongside
        meta = {
            "version": VERSION,
            "tolerances": tolerances.as_dict(),
            "statistics": statistics.value,
            "grid": [alpha_steps, hv_steps],
            "region_counts": result.region_counts(),
            "crossings_above_f": [list(c) for c in result.crossings_above_f],
        }
        emit(dump_json(meta), args.out.with_name(args.out.name + ".meta.json"))

    return EXIT_OK


def cmd_verify(args) -> int:
    verifier = Verifier(args.count, seed=args.seed or 0, tolerances=tolerance_profile())
    report = verifier.run()

    emit(dump_json(report.to_dict()), args.out)

    for name, suite in report.suites.items():
        if suite.result == ERROR:
            log.error("Suite %s failed: %.3e > %.1e", name, suite.max_deviation, suite.tolerance)

    return EXIT_OK if report.result == SUCCESS else EXIT_INVARIANT


COMMANDS = {
    "analyze": cmd_analyze,
    "scan": cmd_scan,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    try:
        args = args_parser().parse_args(argv)

    except UsageExit as e:
        log.error("Usage error: %s", e)
        return EXIT_USAGE

    if args.debug:
        CLogger.set_level("DEBUG")
        log.debug("Logging set to DEBUG")

    try:
        return COMMANDS[args.command](args)

    except ZeroCoincidence as e:
        log.error("No coincidences: %s", e.details)
        return EXIT_EMPTY

    except INCONSISTENCY_ERRORS as e:
        log.error("Internal inconsistency: %s | %s", type(e).__name__, e.details)
        return EXIT_INCONSISTENT

    except USAGE_ERRORS as e:
        log.error("Invalid input: %s | %s", type(e).__name__, getattr(e, "details", None) or e.args)
        return EXIT_USAGE

    except OSError as e:
        log.error("Cannot write output: %s | %s", type(e).__name__, e.args)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
