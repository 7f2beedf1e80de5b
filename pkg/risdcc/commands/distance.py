"""
distance: Euclidean distance spectrum of a block code
"""

import argparse
import csv
from typing import IO

import numpy as np

from risdcc.commands.common import common_options, load_config, open_output
from risdcc.commands.matrix import generator_for
from risdcc.core.codec_block import (
    EXACT_PAIR_LIMIT,
    distance_spectrum,
    enumerate_codebook,
    sample_distance_spectrum,
    write_distance_csv,
)
from risdcc.core.errors import ConfigError
from risdcc.core.modem import get_scheme
from risdcc.log import logger
from risdcc.models import DistanceResponse, ExperimentConfig

SAMPLED_PAIRS = 100_000


def register(subparsers):
    parser = subparsers.add_parser("distance", parents=[common_options], help="write the distance spectrum CSV")
    parser.set_defaults(handler=run)


def execute(config: ExperimentConfig, stream: IO[str]) -> DistanceResponse:
    """
    Exact spectrum while the codebook fits the pairwise limit; above it a
    seeded sample of dataword pairs is written as (sample, distance) rows.
    """
    if config.code.type != "block":
        raise ConfigError(f"distance spectra are defined for block codes, got code.type {config.code.type!r}")
    G = generator_for(config)
    m = get_scheme(config.modulation)

    if m.order**G.input_dim <= EXACT_PAIR_LIMIT:
        codebook = enumerate_codebook(G, m)
        spec = distance_spectrum(codebook)
        write_distance_csv(spec, codebook, stream)
        a, b = spec.argmin_pair
        argmin = (codebook.label(a), codebook.label(b))
    else:
        spec = sample_distance_spectrum(G, m, SAMPLED_PAIRS, np.random.default_rng(config.seed))
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["sample", "distance"])
        writer.writerows([i, f"{d:.17g}"] for i, d in enumerate(spec.distances))
        argmin = (str(spec.argmin_pair[0]), str(spec.argmin_pair[1]))

    return DistanceResponse(
        n_codewords=spec.n_codewords,
        pairs=len(spec.distances),
        d_min=spec.d_min,
        d_max=spec.d_max,
        argmin_pair=argmin,
        estimated=spec.estimated,
    )


def run(args: argparse.Namespace) -> int:
    config = load_config(args)
    with open_output(config.output) as stream:
        response = execute(config, stream)
    kind = "estimated " if response.estimated else ""
    logger.info(f"✓ {kind}d_min = {response.d_min:.12g} between {response.argmin_pair[0]} and {response.argmin_pair[1]}")
    return 0
