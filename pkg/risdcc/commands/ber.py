"""
ber / compare: Monte-Carlo BER curves as CSV
"""

import argparse
from collections.abc import Sequence
from typing import IO

from risdcc.commands.common import common_options, load_config, open_output
from risdcc.core.errors import ConfigError
from risdcc.core.experiment import build_link, build_stopping, build_sweep
from risdcc.core.harness import BerCurve, highest_common_point, run_ber, write_ber_csv
from risdcc.core.status import get_run
from risdcc.log import logger
from risdcc.models import BerPointResponse, BerResponse, ExperimentConfig


def register(subparsers):
    parser = subparsers.add_parser("ber", parents=[common_options], help="simulate one BER curve")
    parser.set_defaults(handler=run)

    compare = subparsers.add_parser("compare", parents=[common_options],
                                    help="simulate several experiments into one CSV")
    compare.add_argument("configs", nargs="*", metavar="CONFIG", help="further experiment files")
    compare.set_defaults(handler=run_compare)


def simulate(config: ExperimentConfig, workers: int | None = None) -> BerCurve:
    link = build_link(config)
    return run_ber(link, build_sweep(config), config.seed, build_stopping(config), workers, config.label)


def execute(configs: Sequence[ExperimentConfig], stream: IO[str], workers: int | None = None) -> list[BerCurve]:
    """Simulate every experiment in order; scheme labels must be distinct"""
    curves = []
    for config in configs:
        curve = simulate(config, workers)
        if any(c.scheme == curve.scheme for c in curves):
            raise ConfigError(f"duplicate scheme label {curve.scheme!r}; set a distinct label in each experiment")
        curves.append(curve)
    write_ber_csv(curves, stream)
    return curves


def summarize(curve: BerCurve) -> BerResponse:
    run = get_run(curve.run_id) if curve.run_id else None
    return BerResponse(
        scheme=curve.scheme,
        detector=curve.detector,
        modulation=curve.modulation,
        seed=curve.seed,
        points=[
            BerPointResponse(eb_n0_db=p.eb_n0_db, frames=p.frames, bit_errors=p.bit_errors, ber=p.ber, ci95=p.ci95)
            for p in curve.points
        ],
        duration_seconds=run["duration_seconds"] if run else None,
        memory_mb=run["memory_usage"].get("cpu_memory_mb") if run else None,
    )


def _log_summary(response: BerResponse):
    line = f"✓ {response.scheme}: {len(response.points)} point(s)"
    if response.duration_seconds is not None:
        line += f" in {response.duration_seconds:.1f}s"
    if response.memory_mb is not None:
        line += f", {response.memory_mb:.0f} MB resident"
    logger.info(line)
    logger.debug(response.model_dump_json())


def run(args: argparse.Namespace) -> int:
    config = load_config(args)
    with open_output(config.output) as stream:
        curves = execute([config], stream)
    _log_summary(summarize(curves[0]))
    return 0


def run_compare(args: argparse.Namespace) -> int:
    paths = ([args.config] if args.config else []) + list(args.configs)
    if len(paths) < 2:
        raise ConfigError("compare needs at least two experiment files")
    # --output applies to the merged file, not to each experiment
    configs = [load_config(argparse.Namespace(**{**vars(args), "output": None}), path) for path in paths]
    with open_output(args.output or configs[0].output) as stream:
        curves = execute(configs, stream)
    responses = [summarize(curve) for curve in curves]
    for response in responses:
        _log_summary(response)

    top = highest_common_point(curves)
    if top is None:
        logger.warning("no Eb/N0 point has 100 bit errors in every curve; schemes not ranked")
    else:
        eb_n0_db, points = top
        ranked = sorted(zip(curves, points, strict=True), key=lambda cp: cp[1].ber)
        logger.info(f"Ranking at {eb_n0_db} dB: " + ", ".join(f"{c.scheme} {p.ber:.3e}" for c, p in ranked))
    elapsed = sum(r.duration_seconds or 0.0 for r in responses)
    logger.info(f"✓ compared {len(curves)} schemes in {elapsed:.1f}s of simulation")
    return 0
