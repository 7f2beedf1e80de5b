"""
optimize: max-min distance geometry design
"""

import argparse
from typing import IO

from risdcc.commands.common import common_options, load_config, open_output
from risdcc.core.experiment import build_search_space
from risdcc.core.geofile import format_geometry
from risdcc.core.geometry import stack_digest
from risdcc.core.modem import get_scheme
from risdcc.core.optimizer import OptimizerResult, optimize, write_trace_csv
from risdcc.core.status import get_run
from risdcc.log import logger
from risdcc.models import ExperimentConfig, OptimizeResponse


def register(subparsers):
    parser = subparsers.add_parser("optimize", parents=[common_options],
                                   help="search geometry for the largest minimum codeword distance")
    parser.set_defaults(handler=run)


def execute(config: ExperimentConfig, stream: IO[str], workers: int | None = None) -> OptimizerResult:
    """Write the best geometry to the stream and the trace to optimizer.trace_output"""
    opt = config.optimizer
    result = optimize(
        build_search_space(config),
        get_scheme(config.modulation),
        budget=opt.budget,
        seed=config.seed,
        method=opt.method,
        restarts=opt.restarts,
        workers=workers,
    )
    stream.write(format_geometry(result.best_stack))
    if opt.trace_output:
        with open_output(opt.trace_output) as trace:
            write_trace_csv(result, trace)
    return result


def summarize(result: OptimizerResult) -> OptimizeResponse:
    run = get_run(result.run_id) if result.run_id else None
    return OptimizeResponse(
        method=result.method,
        best_d_min=result.best_d_min,
        evaluations=result.evaluations,
        seed=result.seed,
        geometry_digest=stack_digest(result.best_stack),
        duration_seconds=run["duration_seconds"] if run else None,
    )


def run(args: argparse.Namespace) -> int:
    config = load_config(args)
    with open_output(config.output) as stream:
        response = summarize(execute(config, stream))
    took = f" in {response.duration_seconds:.1f}s" if response.duration_seconds is not None else ""
    logger.info(f"✓ geometry {response.geometry_digest}: d_min {response.best_d_min:.12g} after {response.evaluations} evaluations{took}")
    logger.debug(response.model_dump_json())
    return 0
