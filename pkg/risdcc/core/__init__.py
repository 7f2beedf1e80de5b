"""
Core functionality for RIS diffractional channel coding
"""

from .baseline import (
    conv_encode,
    conv_viterbi,
    free_distance,
    hamming_decode_hard,
    hamming_decode_soft,
    hamming_encode,
)
from .channel import ChannelSpec, awgn, q_function, rng_substream, uncoded_ber_theory
from .codec_block import (
    Codebook,
    DistanceSpectrum,
    decoding_radius,
    distance_spectrum,
    encode_block,
    enumerate_codebook,
    minimum_distance,
)
from .codec_trellis import (
    TrellisGenerator,
    TrellisSpec,
    TrellisState,
    build_trellis_generator,
    encode_sequence,
    trellis_output,
    viterbi_dcc,
)
from .detect import DetectorConfig, DetectorKind, detect_ml, detect_mmse, detect_reducer
from .diffraction import GeneratorMatrix, build_generator, rs_coefficient, rs_matrix
from .errors import RisDccError
from .geometry import (
    CarrierSpec,
    MetaAtomLayer,
    RisStack,
    ValidationReport,
    preset_74,
    preset_repetition_42,
    preset_systematic_42,
    validate_stack,
)
from .harness import BerCurve, BerPoint, StoppingRule, highest_common_point, run_ber, write_ber_csv
from .memory import cleanup_memory, get_memory_info
from .modem import ModulationScheme, get_scheme, modulate, slice_symbols
from .optimizer import OptimizerResult, SearchSpace, objective, optimize
from .status import RunStatus, get_run
from .version import get_version

__all__ = [
    "conv_encode",
    "conv_viterbi",
    "free_distance",
    "hamming_decode_hard",
    "hamming_decode_soft",
    "hamming_encode",
    "ChannelSpec",
    "awgn",
    "q_function",
    "rng_substream",
    "uncoded_ber_theory",
    "Codebook",
    "DistanceSpectrum",
    "decoding_radius",
    "distance_spectrum",
    "encode_block",
    "enumerate_codebook",
    "minimum_distance",
    "TrellisGenerator",
    "TrellisSpec",
    "TrellisState",
    "build_trellis_generator",
    "encode_sequence",
    "trellis_output",
    "viterbi_dcc",
    "DetectorConfig",
    "DetectorKind",
    "detect_ml",
    "detect_mmse",
    "detect_reducer",
    "GeneratorMatrix",
    "build_generator",
    "rs_coefficient",
    "rs_matrix",
    "RisDccError",
    "CarrierSpec",
    "MetaAtomLayer",
    "RisStack",
    "ValidationReport",
    "preset_74",
    "preset_repetition_42",
    "preset_systematic_42",
    "validate_stack",
    "BerCurve",
    "BerPoint",
    "StoppingRule",
    "highest_common_point",
    "run_ber",
    "write_ber_csv",
    "cleanup_memory",
    "get_memory_info",
    "ModulationScheme",
    "get_scheme",
    "modulate",
    "slice_symbols",
    "OptimizerResult",
    "SearchSpace",
    "objective",
    "optimize",
    "RunStatus",
    "get_run",
    "get_version",
]
