"""
Command-line application
"""

import argparse
import logging
import sys
from collections.abc import Sequence

from risdcc.commands.router import register_commands
from risdcc.config import Config
from risdcc.core.errors import ConstraintViolation, RisDccError
from risdcc.core.version import get_version
from risdcc.log import logger


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risdcc",
        description="RIS diffractional channel coding: geometry, codes, detectors and BER simulation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {get_version()}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    register_commands(subparsers)
    return parser


def configure_logging():
    """Log to stderr so CSV written to stdout stays clean"""
    logging.basicConfig(level=Config.LOG_LEVEL, format="%(message)s", stream=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run the subcommand and map failures to exit codes"""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        Config.validate()
    except ValueError as e:
        print(f"Invalid runtime settings: {e}", file=sys.stderr)
        return 2
    configure_logging()

    try:
        return args.handler(args)
    except ConstraintViolation as e:
        logger.error(f"❌ {e}")
        if e.report is not None:
            sys.stderr.write(e.report.to_text())
        return e.exit_code
    except RisDccError as e:
        logger.error(f"❌ {e}")
        return e.exit_code
    except KeyboardInterrupt:
        logger.error("Interrupted")
        return 130
