"""Command-line interface: ``qdotgates {run,sweep,validate}``."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, parse_config
from .errors import ArgumentError, DegenerateError, NumericalContractError
from .harness import run_scenario, run_sweep, write_sweep

log = logging.getLogger("qdotgates")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_DEGENERATE = 4

EPILOG = """\
exit codes:
  0  success
  1  unexpected failure
  2  configuration error (missing/unknown key, bad type, unreadable file,
     parameter out of range)
  3  numerical-contract violation (e.g. non-Hermitian Hamiltonian)
  4  degenerate geometry or gate (point on trajectory, adiabaticity
     violation, gate not phase-like)
"""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdotgates", description="Quantum-dot phase-gate simulator.",
        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_out=True):
        p.add_argument("--config", required=True, metavar="PATH", help="JSON scenario file")
        p.add_argument("--units", choices=("natural", "si"), help="override the config's units")
        if needs_out:
            p.add_argument("--out", metavar="DIR", help="output directory (overrides config)")

    common(sub.add_parser("run", help="run a single scenario", epilog=EPILOG,
                          formatter_class=argparse.RawDescriptionHelpFormatter))
    sweep = sub.add_parser("sweep", help="run a parameter grid", epilog=EPILOG,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
    common(sweep)
    sweep.add_argument("--workers", type=int, default=1, metavar="N",
                       help="worker processes for independent grid points")
    common(sub.add_parser("validate", help="check a config without running it"), needs_out=False)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = parse_config(args.config).with_overrides(getattr(args, "out", None), args.units)
        if args.command == "validate":
            print(f"{args.config}: ok ({cfg.kind})")
            return EXIT_OK
        if args.command == "run":
            written = run_scenario(cfg)
        else:
            if args.workers < 1:
                raise ConfigError("--workers must be >= 1", "workers")
            result = run_sweep(cfg, args.workers)
            written = write_sweep(cfg, result)
        for path in written:
            log.info("wrote %s", path)
        return EXIT_OK
    except (ConfigError, ArgumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalContractError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DegenerateError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except Exception as exc:
        print(f"unexpected failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
