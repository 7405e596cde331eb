"""
oodlab command line.

Each subcommand lives in its own module under oodlab.cli.commands and registers
itself on the shared parser. Global flags build the RunConfig (defaults < --config
TOML file < flags < OODLAB_SEED), which every handler receives.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from .. import __version__
from ..config import DEFAULT_SEED, ExitCode, OutputFormat, RunConfig, load_run_config
from ..errors import OodlabError, UsageError
from .commands import COMMANDS
from .logging_setup import LOG_LEVELS, setup_logging
from .workspace import parse_pairs

logger = logging.getLogger(__name__)


class OodlabArgumentParser(argparse.ArgumentParser):
    """argparse parser whose usage errors raise UsageError instead of exiting"""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = OodlabArgumentParser(
        prog="oodlab",
        description="Out-of-distribution analysis toolkit for handwritten text recognition.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, help="TOML run configuration")
    parser.add_argument("--workspace", type=Path, help="workspace directory")
    parser.add_argument("--manifest", action="append", dest="manifests", type=Path,
                        help="dataset manifest (repeatable; default: registered domains)")
    parser.add_argument("--seed", type=int, help=f"random seed (default {DEFAULT_SEED})")
    parser.add_argument("--workers", type=int, help="worker threads")
    parser.add_argument("--log-level", default="INFO", choices=LOG_LEVELS)
    parser.add_argument("--log-file", help="also write the log to this file")

    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def config_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """RunConfig values taken from parsed flags (None means not given)"""
    overrides = {
        "workspace": args.workspace,
        "manifests": args.manifests,
        "seed": args.seed,
        "workers": args.workers,
        "nmax": getattr(args, "nmax", None),
        "alpha": getattr(args, "alpha", None),
        "ece_bins": getattr(args, "ece_bins", None),
        "features": getattr(args, "features", None),
        "outliers": getattr(args, "outliers", None),
    }
    groups = getattr(args, "alignments", None)
    if groups:
        overrides["alignments"] = dict(parse_pairs(groups, "--group"))
    if getattr(args, "pgm", False):
        overrides["formats"] = [OutputFormat.CSV, OutputFormat.PGM]
    return overrides


def run(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and return its exit code."""
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        setup_logging(args.log_level, args.log_file)
        config = load_run_config(args.config, config_overrides(args))
        logger.debug("Run configuration: %s", config.model_dump())
        return int(args.handler(args, config))
    except OodlabError as e:
        logger.error("❌ %s", e)
        return int(e.exit_code)
    except SystemExit as e:
        # --help and --version
        return int(e.code or 0)
    except KeyboardInterrupt:
        print("❌ Interrupted", file=sys.stderr)
        return int(ExitCode.USAGE)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
