"""
gen-matrix: dump the generator matrix and related tables as CSV
"""

import argparse
from typing import IO

import numpy as np

from risdcc.commands.common import common_options, load_config, open_output
from risdcc.core.baseline import format_conformance_vectors
from risdcc.core.codec_trellis import branch_table, build_trellis_generator, write_trellis_csv
from risdcc.core.diffraction import GeneratorMatrix, build_generator, distinct_entries, write_generator_csv
from risdcc.core.errors import ConfigError
from risdcc.core.experiment import build_stack, requires_expansion, trellis_spec
from risdcc.core.modem import get_scheme, write_constellation_csv
from risdcc.log import logger
from risdcc.models import ExperimentConfig, MatrixResponse

TABLES = ("generator", "constellation", "trellis", "conformance")


def register(subparsers):
    parser = subparsers.add_parser("gen-matrix", parents=[common_options], help="write the generator matrix CSV")
    parser.add_argument("--table", choices=TABLES, default="generator",
                        help="generator matrix (default), constellation, trellis branch table or baseline test vectors")
    parser.set_defaults(handler=run)


def generator_for(config: ExperimentConfig) -> GeneratorMatrix:
    stack = build_stack(config)
    return build_generator(stack, config.code.normalization, config.code.insertion_loss_db,
                           require_expansion=requires_expansion(config))


def describe(G: GeneratorMatrix) -> MatrixResponse:
    return MatrixResponse(
        rows=G.output_dim,
        cols=G.input_dim,
        normalization=G.normalization,
        frobenius_norm_sq=float(np.sum(np.abs(G.entries) ** 2)),
        distinct_entries=len(distinct_entries(G)),
        digest=G.digest,
    )


def execute(config: ExperimentConfig, stream: IO[str], table: str = "generator") -> MatrixResponse | None:
    m = get_scheme(config.modulation)
    if table == "constellation":
        write_constellation_csv(m, stream)
        return None
    if table == "conformance":
        stream.write(format_conformance_vectors(seed=config.seed))
        return None
    if table == "trellis":
        if config.code.type != "trellis":
            raise ConfigError("--table trellis requires code.type = 'trellis'")
        stack = build_stack(config)
        spec = trellis_spec(config, stack)
        write_trellis_csv(branch_table(spec, build_trellis_generator(stack, spec), m), spec, stream)
        return None

    G = generator_for(config)
    write_generator_csv(G, stream)
    return describe(G)


def run(args: argparse.Namespace) -> int:
    config = load_config(args)
    with open_output(config.output) as stream:
        response = execute(config, stream, args.table)
    if response is not None:
        logger.info(
            f"✓ {response.rows}x{response.cols} generator ({response.normalization}), "
            f"||G||_F^2 = {response.frobenius_norm_sq:.6g}, {response.distinct_entries} distinct entries"
        )
    return 0
