"""
Shared command-line options and output handling
"""

import argparse
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import IO

from risdcc.core.experiment import load_experiment
from risdcc.models import ExperimentConfig

# Options every subcommand accepts
common_options = argparse.ArgumentParser(add_help=False)
common_options.add_argument("--config", metavar="PATH", help="experiment TOML file")
common_options.add_argument("--seed", type=int, default=None, help="master seed (overrides the file)")
common_options.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                            help="override a dotted config key; repeatable")
common_options.add_argument("--output", metavar="PATH", default=None, help="output file (default: stdout)")


def load_config(args: argparse.Namespace, path: str | None = None) -> ExperimentConfig:
    return load_experiment(path if path is not None else args.config, args.overrides, args.seed, args.output)


@contextmanager
def open_output(path: str | None) -> Iterator[IO[str]]:
    """Text stream for a path, or stdout when no path is given"""
    if path is None:
        yield sys.stdout
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        yield f
