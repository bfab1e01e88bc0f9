"""Command-line entry point: python cli.py <command> [options]."""
import sys
import traceback

from dotenv import load_dotenv

# Load PANDA_* overrides from .env before config.py is read
load_dotenv()

import argparse
import logging

from commands import register_all_commands
from config import VERSION
from utils.errors import EXIT_IO, EXIT_USAGE, PandaError
from utils.logging_setup import setup_logging

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="panda",
        description="Regularized GLMs by adaptive noise augmentation (PANDA)",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        allow_abbrev=False,
        epilog="""
Examples:
  # Lasso-type noise on a Poisson response
  python cli.py fit --data counts.csv --response y --family poisson --scheme lasso --lam 0.02 --n-e 200 --seed 1

  # Confidence intervals, replaying an earlier fit
  python cli.py infer --fit-manifest panda_out/manifest.json --output panda_ci

  # Choose lambda * n_e by 5-fold cross-validation
  python cli.py tune --data data.csv --response y --scheme scad --lambda-ne 0.1,1,10 --seed 7

  # Coverage study for the Gaussian family with 20 replicates
  python cli.py simulate --preset table3 --preset-family gaussian --replicates 20 --seed 3

  # Replay a run and compare output hashes
  python cli.py rerun panda_out/manifest.json
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True
    register_all_commands(subparsers)
    for sub in subparsers.choices.values():
        sub.allow_abbrev = False
    return parser


def main(argv: list[str] | None = None) -> int:
    """Parse argv, run the chosen command and map errors to exit codes.

    Returns:
        Process exit status (0 on success)
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    args.argv = argv
    verbose = getattr(args, "verbose", False)
    setup_logging(verbose=verbose, quiet=getattr(args, "quiet", False))

    try:
        return args.handler(args)
    except PandaError as e:
        if verbose:
            traceback.print_exc()
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        if verbose:
            traceback.print_exc()
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
