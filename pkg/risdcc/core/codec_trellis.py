"""
Trellis DCC

Three ways of giving a diffractive code memory:

- ``after_memory``: a memory RIS after the encoding hop applies unit-modulus
  phases driven by the previous frame's bits.
- ``ahead_memory``: a memory layer ahead of the data layer radiates the
  binary sum of the current and the previous frame; the data layer then
  imposes the current frame's phases before the encoding hop.
- ``extra_atoms``: layer 1 carries k*(mu+1) atoms driven by the current and
  the mu previous frames directly.

A frame is a dataword of k symbols; as a trellis input it is the integer
with the first symbol most significant.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from risdcc.config import Config
from risdcc.core.diffraction import rs_matrix
from risdcc.core.errors import DimensionMismatch, StateSpaceTooLarge, UnknownVariant
from risdcc.core.geometry import RisStack, ensure_valid, stack_digest
from risdcc.core.modem import ModulationScheme, modulate, symbols_to_bits
from risdcc.core.trellis import Trellis, viterbi

Variant = Literal["after_memory", "ahead_memory", "extra_atoms"]
VARIANTS = ("after_memory", "ahead_memory", "extra_atoms")


@dataclass(frozen=True)
class TrellisSpec:
    variant: str
    k: int
    n: int
    mu: int
    b: int = 1

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise UnknownVariant(f"unknown trellis variant {self.variant!r}; expected one of {', '.join(VARIANTS)}")
        if self.k <= 0 or self.n <= 0 or self.b <= 0:
            raise DimensionMismatch(f"k, n and b must be positive, got k={self.k} n={self.n} b={self.b}")
        if self.mu < 0:
            raise DimensionMismatch(f"memory depth must be non-negative, got {self.mu}")

    @property
    def frame_inputs(self) -> int:
        """Distinct frames, 2^(k*b)"""
        return 2 ** (self.k * self.b)

    @property
    def state_count(self) -> int:
        return 2 ** (self.k * self.b * self.mu)

    @property
    def layer1_atoms(self) -> int:
        return self.k * (self.mu + 1) if self.variant == "extra_atoms" else self.k

    @property
    def rate(self) -> float:
        return self.k / self.n


@dataclass(frozen=True, eq=False)
class TrellisGenerator:
    """
    Diffraction matrices of a trellis code.

    ``G`` is the encoding hop (n x layer1_atoms); ``D`` is the k x k
    memory-to-data hop, present only for ``ahead_memory``.
    """

    G: NDArray[np.complex128]
    D: NDArray[np.complex128] | None = None
    source_stack_digest: str = ""


@dataclass(frozen=True)
class TrellisState:
    """Previous frames, most recent first"""

    frames: tuple[tuple[int, ...], ...]

    @classmethod
    def zero(cls, spec: TrellisSpec) -> TrellisState:
        return cls(tuple((0,) * spec.k for _ in range(spec.mu)))


def _unit_frobenius(matrix: NDArray[np.complex128]) -> NDArray[np.complex128]:
    return matrix * (np.sqrt(matrix.shape[0]) / np.linalg.norm(matrix, "fro"))


def build_trellis_generator(stack: RisStack, spec: TrellisSpec, memory_separation_m: float | None = None) -> TrellisGenerator:
    """
    Assemble the trellis matrices from a stack.

    Layer 1 must carry ``spec.layer1_atoms`` atoms and layer 2 ``spec.n``.
    G is scaled so that ||G||_F^2 = n. For ``ahead_memory`` the memory layer
    is layer 1 translated upstream by ``memory_separation_m`` (default: the
    stack separation) and D is scaled so that ||D||_F^2 = k.
    """
    if stack.input_dim != spec.layer1_atoms:
        raise DimensionMismatch(f"{spec.variant} needs {spec.layer1_atoms} layer-1 atoms, stack has {stack.input_dim}")
    if stack.output_dim != spec.n:
        raise DimensionMismatch(f"trellis needs {spec.n} layer-2 atoms, stack has {stack.output_dim}")
    ensure_valid(stack, require_expansion=False)

    G = _unit_frobenius(rs_matrix(stack.layer1.positions, stack.layer2.positions, stack.wavelength_m))
    D = None
    if spec.variant == "ahead_memory":
        gap = stack.separation_m if memory_separation_m is None else memory_separation_m
        memory_layer = stack.layer1.positions - np.array([0.0, 0.0, gap])
        D = _unit_frobenius(rs_matrix(memory_layer, stack.layer1.positions, stack.wavelength_m))
    return TrellisGenerator(G, D, stack_digest(stack))


def _check_parts(spec: TrellisSpec, parts: TrellisGenerator):
    if parts.G.shape != (spec.n, spec.layer1_atoms):
        raise DimensionMismatch(f"G must be {spec.n}x{spec.layer1_atoms}, got {parts.G.shape}")
    if spec.variant == "ahead_memory" and (parts.D is None or parts.D.shape != (spec.k, spec.k)):
        raise DimensionMismatch(f"ahead_memory needs a {spec.k}x{spec.k} memory matrix D")


def trellis_output(spec: TrellisSpec, parts: TrellisGenerator, m: ModulationScheme,
                   state: TrellisState, d_t: ArrayLike) -> NDArray[np.complex128]:
    """Branch output (length n) for the current frame ``d_t`` given the previous frames"""
    _check_parts(spec, parts)
    if m.bits_per_symbol != spec.b:
        raise DimensionMismatch(f"spec uses {spec.b} bits per symbol, {m.name} has {m.bits_per_symbol}")
    d_t = np.asarray(d_t, dtype=np.int64)
    previous = np.asarray(state.frames, dtype=np.int64).reshape(-1, spec.k) if spec.mu else np.zeros((0, spec.k), np.int64)
    if d_t.shape != (spec.k,) or previous.shape != (spec.mu, spec.k):
        raise DimensionMismatch(f"expected a {spec.k}-symbol frame and {spec.mu} previous frames")

    if spec.variant == "extra_atoms":
        u = modulate(np.concatenate([d_t[None], previous]).ravel(), m)
        return parts.G @ u

    if spec.variant == "after_memory":
        v = parts.G @ modulate(d_t, m)
        if spec.mu == 0:
            return v
        # only the most recent frame drives the memory RIS
        memory_bits = symbols_to_bits(previous[0], m)
        phases = 1 - 2 * memory_bits[np.arange(spec.n) % memory_bits.size]
        return phases * v

    # ahead_memory
    combined = d_t ^ previous[0] if spec.mu else d_t
    s_mem = modulate(combined, m)
    data_phase = np.exp(1j * np.angle(modulate(d_t, m)))
    return parts.G @ (data_phase * (parts.D @ s_mem))


def frame_to_index(frame: ArrayLike, spec: TrellisSpec) -> int:
    q = 2**spec.b
    return int(sum(int(s) * q ** (spec.k - 1 - i) for i, s in enumerate(frame)))


def index_to_frame(index: int, spec: TrellisSpec) -> tuple[int, ...]:
    q = 2**spec.b
    return tuple((index // q ** (spec.k - 1 - i)) % q for i in range(spec.k))


def state_from_index(index: int, spec: TrellisSpec) -> TrellisState:
    qf = spec.frame_inputs
    return TrellisState(tuple(index_to_frame((index // qf**i) % qf, spec) for i in range(spec.mu)))


def branch_table(spec: TrellisSpec, parts: TrellisGenerator, m: ModulationScheme) -> Trellis:
    """Trellis of every (state, frame) branch output"""
    if spec.state_count > Config.STATE_LIMIT:
        raise StateSpaceTooLarge(f"{spec.state_count} states exceed the limit of {Config.STATE_LIMIT}")
    if spec.mu < 1:
        raise DimensionMismatch("a trellis needs memory depth of at least 1; use block encoding for mu = 0")
    outputs = np.empty((spec.state_count, spec.frame_inputs, spec.n), dtype=np.complex128)
    for s in range(spec.state_count):
        state = state_from_index(s, spec)
        for f in range(spec.frame_inputs):
            outputs[s, f] = trellis_output(spec, parts, m, state, index_to_frame(f, spec))
    return Trellis(spec.frame_inputs, spec.mu, outputs)


def _frames_to_indices(frames: NDArray[np.int64], spec: TrellisSpec) -> NDArray[np.int64]:
    q = 2**spec.b
    powers = q ** np.arange(spec.k - 1, -1, -1)
    return frames @ powers


def _indices_to_frames(indices: NDArray[np.int64], spec: TrellisSpec) -> NDArray[np.int64]:
    q = 2**spec.b
    powers = q ** np.arange(spec.k - 1, -1, -1)
    return (indices[..., None] // powers) % q


def encode_sequence(spec: TrellisSpec, parts: TrellisGenerator, m: ModulationScheme, frames: ArrayLike,
                    table: Trellis | None = None) -> NDArray[np.complex128]:
    """
    Encode (F, L, k) or (L, k) frame sequences from the zero state, adding
    mu zero flush frames; returns (F, L + mu, n) codewords.
    """
    table = branch_table(spec, parts, m) if table is None else table
    frames = np.asarray(frames, dtype=np.int64)
    if frames.ndim == 2:
        frames = frames[None]
    if frames.shape[-1] != spec.k:
        raise DimensionMismatch(f"frames must have {spec.k} symbols, got {frames.shape[-1]}")
    return table.encode(_frames_to_indices(frames, spec))


def viterbi_dcc(spec: TrellisSpec, parts: TrellisGenerator, m: ModulationScheme, y: ArrayLike,
                noise_var: float | None = None, table: Trellis | None = None) -> NDArray[np.int64]:
    """
    Sequence ML decoding of received (F, L + mu, n) or (L + mu, n) blocks.

    Returns (F, L, k) frames minimizing the summed squared Euclidean
    distance; the noise variance does not change the argmin under AWGN.
    """
    table = branch_table(spec, parts, m) if table is None else table
    y = np.asarray(y, dtype=np.complex128)
    squeeze = y.ndim == 2
    decoded = _indices_to_frames(viterbi(table, y, metric="euclidean"), spec)
    return decoded[0] if squeeze else decoded


def write_trellis_csv(table: Trellis, spec: TrellisSpec, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["state", "input", "next_state", "output_index", "re", "im"])
    for s in range(table.n_states):
        for f in range(table.n_inputs):
            ns = int(table.next_state(s, f))
            for i, w in enumerate(table.outputs[s, f]):
                writer.writerow([s, f, ns, i, f"{w.real:.17g}", f"{w.imag:.17g}"])
