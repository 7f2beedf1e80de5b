"""
End-to-end link models

A link turns a batch of information bits into transmitted complex frames
and decodes received frames back into bits. Every scheme the harness can
simulate is a link: uncoded, block DCC, trellis DCC, the Hamming and
convolutional baselines and Hamming + DCC concatenation.

Links are plain picklable objects; decoders that are costly to build are
created lazily and cached per process.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from risdcc.core.baseline import conv_encode, conv_viterbi, hamming_decode_hard, hamming_decode_soft, hamming_encode
from risdcc.core.codec_block import encode_block
from risdcc.core.codec_trellis import TrellisGenerator, TrellisSpec, branch_table, encode_sequence, viterbi_dcc
from risdcc.core.detect import DetectorConfig, DetectorKind, LinearDetector, MLDetector, make_detector
from risdcc.core.diffraction import GeneratorMatrix
from risdcc.core.errors import ConfigError
from risdcc.core.modem import ModulationScheme, bits_to_symbols, modulate, slice_symbols, symbols_to_bits

Bits = NDArray[np.int64]
Decoding = Literal["hard", "soft"]


def _bpsk(bits: Bits) -> NDArray[np.complex128]:
    return (1.0 - 2.0 * bits).astype(np.complex128)


def _hard_bits(y: NDArray) -> Bits:
    return (np.real(y) < 0).astype(np.int64)


class Link(ABC):
    """One transmit/receive chain with the labels written to the BER CSV"""

    scheme: str
    detector: str = "none"
    modulation: str = "BPSK"
    geometry_digest: str = "none"

    @property
    @abstractmethod
    def info_bits_per_frame(self) -> int:
        ...

    @property
    @abstractmethod
    def energy_per_frame(self) -> float:
        """Nominal transmitted energy per frame, used for Eb"""

    @abstractmethod
    def transmit(self, bits: Bits) -> NDArray[np.complex128]:
        """(F, info_bits_per_frame) bits -> (F, ...) complex frames"""

    @abstractmethod
    def receive(self, y: NDArray[np.complex128], n0: float) -> Bits:
        """Received frames -> (F, info_bits_per_frame) bit decisions"""


class UncodedLink(Link):
    def __init__(self, m: ModulationScheme, symbols_per_frame: int = 1):
        if symbols_per_frame <= 0:
            raise ConfigError(f"code.symbols_per_frame must be positive, got {symbols_per_frame}")
        self.m = m
        self.symbols_per_frame = symbols_per_frame
        self.scheme = "uncoded"
        self.modulation = m.name

    @property
    def info_bits_per_frame(self) -> int:
        return self.symbols_per_frame * self.m.bits_per_symbol

    @property
    def energy_per_frame(self) -> float:
        return float(self.symbols_per_frame * np.mean(np.abs(self.m.points) ** 2))

    def transmit(self, bits: Bits) -> NDArray[np.complex128]:
        return modulate(bits_to_symbols(bits, self.m), self.m)

    def receive(self, y: NDArray[np.complex128], n0: float) -> Bits:
        return symbols_to_bits(slice_symbols(y, self.m), self.m)


class _BlockDetectors:
    """Per-process cache of the detectors a block code needs"""

    def __init__(self, G: GeneratorMatrix, m: ModulationScheme, kind: DetectorKind):
        self.G = G
        self.m = m
        self.kind = kind
        self._cache: dict[float, MLDetector | LinearDetector] = {}

    def __getstate__(self):
        return {"G": self.G, "m": self.m, "kind": self.kind, "_cache": {}}

    def get(self, n0: float) -> MLDetector | LinearDetector:
        # only MMSE depends on the noise level
        key = n0 if self.kind is DetectorKind.MMSE else 0.0
        if key not in self._cache:
            self._cache[key] = make_detector(DetectorConfig(self.kind, key), self.G, self.m)
        return self._cache[key]


class BlockDccLink(Link):
    """Block DCC: one frame is one K*L-symbol dataword"""

    def __init__(self, G: GeneratorMatrix, m: ModulationScheme, detector: DetectorKind, scheme: str = "dcc"):
        self.G = G
        self.m = m
        self.scheme = scheme
        self.detector = detector.value
        self.modulation = m.name
        self.geometry_digest = G.source_stack_digest or "none"
        self._detectors = _BlockDetectors(G, m, detector)

    @property
    def info_bits_per_frame(self) -> int:
        return self.G.input_dim * self.m.bits_per_symbol

    @property
    def energy_per_frame(self) -> float:
        return self.G.radiated_energy * float(np.mean(np.abs(self.m.points) ** 2))

    def transmit(self, bits: Bits) -> NDArray[np.complex128]:
        return encode_block(self.G, modulate(bits_to_symbols(bits, self.m), self.m))

    def receive(self, y: NDArray[np.complex128], n0: float) -> Bits:
        return symbols_to_bits(self._detectors.get(n0)(y), self.m)


class HammingLink(Link):
    """Hamming(7,4) over BPSK, several codewords per frame"""

    def __init__(self, decoding: Decoding = "hard", codewords_per_frame: int = 16):
        if decoding not in ("hard", "soft"):
            raise ConfigError(f"code.decoding must be 'hard' or 'soft', got {decoding!r}")
        self.decoding = decoding
        self.codewords_per_frame = codewords_per_frame
        self.scheme = f"hamming74_{decoding}"
        self.detector = decoding

    @property
    def info_bits_per_frame(self) -> int:
        return 4 * self.codewords_per_frame

    @property
    def energy_per_frame(self) -> float:
        return 7.0 * self.codewords_per_frame

    def transmit(self, bits: Bits) -> NDArray[np.complex128]:
        f = bits.shape[0]
        return _bpsk(hamming_encode(bits.reshape(f, -1, 4)).reshape(f, -1))

    def receive(self, y: NDArray[np.complex128], n0: float) -> Bits:
        f = y.shape[0]
        blocks = y.reshape(-1, 7)
        if self.decoding == "hard":
            decoded = hamming_decode_hard(_hard_bits(blocks))
        else:
            decoded = hamming_decode_soft(np.real(blocks))
        return decoded.reshape(f, -1)


class ConvLink(Link):
    """(2,1,3) convolutional code over BPSK, one terminated block per frame"""

    def __init__(self, message_bits: int = 128, decoding: Decoding = "hard"):
        if decoding not in ("hard", "soft"):
            raise ConfigError(f"code.decoding must be 'hard' or 'soft', got {decoding!r}")
        if message_bits <= 0:
            raise ConfigError(f"code.message_bits must be positive, got {message_bits}")
        self.message_bits = message_bits
        self.decoding = decoding
        self.scheme = f"conv213_{decoding}"
        self.detector = decoding

    @property
    def info_bits_per_frame(self) -> int:
        return self.message_bits

    @property
    def energy_per_frame(self) -> float:
        return 2.0 * (self.message_bits + 3)

    def transmit(self, bits: Bits) -> NDArray[np.complex128]:
        return _bpsk(conv_encode(bits))

    def receive(self, y: NDArray[np.complex128], n0: float) -> Bits:
        if self.decoding == "hard":
            return conv_viterbi(_hard_bits(y), mode="hard")
        return conv_viterbi(np.real(y), mode="soft")


class TrellisDccLink(Link):
    """Trellis DCC: one frame is a terminated sequence of L data frames"""

    def __init__(self, spec: TrellisSpec, parts: TrellisGenerator, m: ModulationScheme, frames_per_sequence: int = 32):
        if m.bits_per_symbol != spec.b:
            raise ConfigError(f"trellis code uses {spec.b} bits per symbol but modulation {m.name} has {m.bits_per_symbol}")
        if frames_per_sequence <= 0:
            raise ConfigError(f"code.frames_per_sequence must be positive, got {frames_per_sequence}")
        self.spec = spec
        self.parts = parts
        self.m = m
        self.frames_per_sequence = frames_per_sequence
        self.scheme = f"trellis_{spec.variant}"
        self.detector = "viterbi"
        self.modulation = m.name
        self.geometry_digest = parts.source_stack_digest or "none"
        self._table = branch_table(spec, parts, m)
        self._energy = self._expected_energy()

    @property
    def info_bits_per_frame(self) -> int:
        return self.frames_per_sequence * self.spec.k * self.spec.b

    def _expected_energy(self) -> float:
        """Mean energy of a terminated sequence of uniformly random frames"""
        energy = np.sum(np.abs(self._table.outputs) ** 2, axis=-1)
        qf, mu, length = self.spec.frame_inputs, self.spec.mu, self.frames_per_sequence
        # digit i of a state is the frame sent i + 1 stages earlier
        digits = (np.arange(self._table.n_states)[:, None] // qf ** np.arange(mu)) % qf
        total = 0.0
        for t in range(length + mu):
            frame = t - 1 - np.arange(mu)
            zero = (frame < 0) | (frame >= length)
            reachable = np.all(digits[:, zero] == 0, axis=1)
            stage = energy[reachable] if t < length else energy[reachable, :1]
            total += float(np.mean(stage))
        return total

    @property
    def energy_per_frame(self) -> float:
        return self._energy

    def transmit(self, bits: Bits) -> NDArray[np.complex128]:
        f = bits.shape[0]
        frames = bits_to_symbols(bits, self.m).reshape(f, self.frames_per_sequence, self.spec.k)
        return encode_sequence(self.spec, self.parts, self.m, frames, table=self._table)

    def receive(self, y: NDArray[np.complex128], n0: float) -> Bits:
        frames = viterbi_dcc(self.spec, self.parts, self.m, y, noise_var=n0, table=self._table)
        return symbols_to_bits(frames.reshape(frames.shape[0], -1), self.m)


class ConcatenatedLink(Link):
    """
    Outer Hamming(7,4), inner block DCC.

    A frame holds lcm(7, K*L*b) coded bits: lcm/7 Hamming codewords laid out
    back to back over lcm/(K*L*b) DCC datawords, with no interleaving. Hard
    decoding slices the DCC detector output; soft decoding feeds the real
    part of a linear detector's BPSK estimates to the Hamming ML decoder.
    """

    def __init__(self, G: GeneratorMatrix, m: ModulationScheme, detector: DetectorKind, decoding: Decoding = "hard"):
        if decoding not in ("hard", "soft"):
            raise ConfigError(f"code.decoding must be 'hard' or 'soft', got {decoding!r}")
        if decoding == "soft" and (m.bits_per_symbol != 1 or detector is DetectorKind.ML):
            raise ConfigError("soft concatenated decoding needs BPSK and a linear detector (mmse or reducer)")
        self.G = G
        self.m = m
        self.decoding = decoding
        self.scheme = f"hamming74+dcc_{decoding}"
        self.detector = detector.value
        self.modulation = m.name
        self.geometry_digest = G.source_stack_digest or "none"
        self._detectors = _BlockDetectors(G, m, detector)

    @property
    def coded_bits_per_frame(self) -> int:
        return math.lcm(7, self.G.input_dim * self.m.bits_per_symbol)

    @property
    def blocks_per_frame(self) -> int:
        return self.coded_bits_per_frame // (self.G.input_dim * self.m.bits_per_symbol)

    @property
    def info_bits_per_frame(self) -> int:
        return 4 * self.coded_bits_per_frame // 7

    @property
    def energy_per_frame(self) -> float:
        return self.blocks_per_frame * self.G.radiated_energy * float(np.mean(np.abs(self.m.points) ** 2))

    def transmit(self, bits: Bits) -> NDArray[np.complex128]:
        f = bits.shape[0]
        coded = hamming_encode(bits.reshape(f, -1, 4)).reshape(f * self.blocks_per_frame, -1)
        x = encode_block(self.G, modulate(bits_to_symbols(coded, self.m), self.m))
        return x.reshape(f, self.blocks_per_frame, self.G.output_dim)

    def receive(self, y: NDArray[np.complex128], n0: float) -> Bits:
        f = y.shape[0]
        detector = self._detectors.get(n0)
        blocks = y.reshape(-1, self.G.output_dim)
        if self.decoding == "hard":
            coded = symbols_to_bits(detector(blocks), self.m).reshape(-1, 7)
            decoded = hamming_decode_hard(coded)
        else:
            estimates = np.real(detector.estimate(blocks)).reshape(-1, 7)
            decoded = hamming_decode_soft(estimates)
        return decoded.reshape(f, -1)
