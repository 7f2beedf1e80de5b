"""
encode: encode the datawords listed in the experiment file
"""

import argparse
import csv
from typing import IO

import numpy as np

from risdcc.commands.common import common_options, load_config, open_output
from risdcc.commands.matrix import generator_for
from risdcc.core.baseline import conv_encode, hamming_encode
from risdcc.core.codec_block import encode_block
from risdcc.core.codec_trellis import build_trellis_generator, encode_sequence
from risdcc.core.errors import ConfigError, DimensionMismatch
from risdcc.core.experiment import build_stack, trellis_spec
from risdcc.core.modem import get_scheme, modulate, symbols_to_bits
from risdcc.log import logger
from risdcc.models import EncodeResponse, ExperimentConfig


def register(subparsers):
    parser = subparsers.add_parser("encode", parents=[common_options], help="encode datawords to codewords")
    parser.set_defaults(handler=run)


def _label(symbols, m) -> str:
    return "".join(map(str, symbols_to_bits(np.asarray(symbols, dtype=np.int64), m)))


def _write_complex(writer, label: str, values: np.ndarray):
    for entry, v in enumerate(values):
        writer.writerow([label, entry, f"{v.real:.17g}", f"{v.imag:.17g}"])


def execute(config: ExperimentConfig, stream: IO[str]) -> EncodeResponse:
    """
    Block and uncoded schemes treat each listed dataword independently;
    a trellis code treats the list as one frame sequence; the binary
    baselines take each list as a bit vector.
    """
    datawords = config.encode.datawords
    if not datawords:
        raise ConfigError("encode.datawords must list at least one dataword")
    m = get_scheme(config.modulation)
    code = config.code.type
    writer = csv.writer(stream, lineterminator="\n")

    if code in ("hamming", "conv"):
        writer.writerow(["dataword", "codeword"])
        lengths = set()
        for bits in datawords:
            bits = np.asarray(bits, dtype=np.int64)
            if code == "hamming":
                if bits.size != 4:
                    raise DimensionMismatch(f"Hamming(7,4) datawords have 4 bits, got {bits.size}")
                out = hamming_encode(bits)
            else:
                out = conv_encode(bits)
            lengths.add(out.size)
            writer.writerow(["".join(map(str, bits)), "".join(map(str, out))])
        return EncodeResponse(scheme=code, datawords=len(datawords), codeword_length=max(lengths))

    writer.writerow(["dataword", "entry", "re", "im"])
    if code == "trellis":
        stack = build_stack(config)
        spec = trellis_spec(config, stack)
        frames = np.asarray(datawords, dtype=np.int64)
        out = encode_sequence(spec, build_trellis_generator(stack, spec), m, frames)[0]
        padded = list(datawords) + [[0] * spec.k] * spec.mu
        for frame, branch in zip(padded, out, strict=True):
            _write_complex(writer, _label(frame, m), branch)
        return EncodeResponse(scheme=f"trellis_{spec.variant}", datawords=len(padded), codeword_length=spec.n)

    symbols = np.asarray(datawords, dtype=np.int64)
    if code == "uncoded":
        codewords = modulate(symbols, m)
    else:
        codewords = encode_block(generator_for(config), modulate(symbols, m))
    for d, c in zip(symbols, codewords, strict=True):
        _write_complex(writer, _label(d, m), c)
    return EncodeResponse(scheme=code, datawords=len(symbols), codeword_length=codewords.shape[-1])


def run(args: argparse.Namespace) -> int:
    config = load_config(args)
    with open_output(config.output) as stream:
        response = execute(config, stream)
    logger.info(f"✓ encoded {response.datawords} dataword(s) into length-{response.codeword_length} codewords")
    return 0
