"""
Gray-labelled constellations, modulation and per-symbol slicing

Symbols are integers in [0, 2^b); bits group into symbols big-endian. BPSK
maps bit 0 to +1 and bit 1 to -1. Every constellation has unit average
energy.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cache
from typing import IO, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from risdcc.core.errors import SymbolOutOfRange

SchemeName = Literal["BPSK", "QPSK", "QAM16", "PSK8"]
SCHEME_NAMES = ("BPSK", "QPSK", "QAM16", "PSK8")

Dataword = NDArray[np.int64]
UncodedSignal = NDArray[np.complex128]


@dataclass(frozen=True, eq=False)
class ModulationScheme:
    """A constellation indexed by symbol label"""

    name: str
    bits_per_symbol: int
    points: NDArray[np.complex128]

    @property
    def order(self) -> int:
        return 2**self.bits_per_symbol

    def bit_label(self, symbol: int) -> str:
        return format(symbol, f"0{self.bits_per_symbol}b")


def _gray(k: int) -> int:
    return k ^ (k >> 1)


def _pam4_gray(b_hi: int, b_lo: int) -> int:
    # 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
    return {(0, 0): -3, (0, 1): -1, (1, 1): 1, (1, 0): 3}[(b_hi, b_lo)]


@cache
def get_scheme(name: str) -> ModulationScheme:
    """Look up a constellation by name"""
    if name == "BPSK":
        points = np.array([1.0, -1.0], dtype=np.complex128)
        b = 1
    elif name == "QPSK":
        points = np.array(
            [((1 - 2 * (s >> 1)) + 1j * (1 - 2 * (s & 1))) / np.sqrt(2) for s in range(4)],
            dtype=np.complex128,
        )
        b = 2
    elif name == "QAM16":
        points = np.array(
            [
                (_pam4_gray((s >> 3) & 1, (s >> 2) & 1) + 1j * _pam4_gray((s >> 1) & 1, s & 1)) / np.sqrt(10)
                for s in range(16)
            ],
            dtype=np.complex128,
        )
        b = 4
    elif name == "PSK8":
        points = np.empty(8, dtype=np.complex128)
        for k in range(8):
            points[_gray(k)] = np.exp(2j * np.pi * k / 8)
        b = 3
    else:
        raise ValueError(f"unknown modulation {name!r}; expected one of {', '.join(SCHEME_NAMES)}")
    points.flags.writeable = False
    return ModulationScheme(name, b, points)


def modulate(d: ArrayLike, m: ModulationScheme) -> UncodedSignal:
    """Elementwise constellation lookup"""
    d = np.asarray(d, dtype=np.int64)
    if d.size and (d.min() < 0 or d.max() >= m.order):
        raise SymbolOutOfRange(f"{m.name} symbols must lie in [0, {m.order}), got range [{d.min()}, {d.max()}]")
    return m.points[d]


def slice_symbols(y: ArrayLike, m: ModulationScheme) -> Dataword:
    """Nearest constellation point per entry; ties go to the smaller symbol"""
    y = np.asarray(y, dtype=np.complex128)
    dist = np.abs(y[..., None] - m.points) ** 2
    return np.argmin(dist, axis=-1).astype(np.int64)


def bits_to_symbols(bits: ArrayLike, m: ModulationScheme) -> Dataword:
    """Group the last axis of a bit array into symbols, big-endian"""
    bits = np.asarray(bits, dtype=np.int64)
    b = m.bits_per_symbol
    if bits.shape[-1] % b:
        raise ValueError(f"bit count {bits.shape[-1]} is not a multiple of {b}")
    grouped = bits.reshape(*bits.shape[:-1], bits.shape[-1] // b, b)
    weights = 1 << np.arange(b - 1, -1, -1)
    return grouped @ weights


def symbols_to_bits(symbols: ArrayLike, m: ModulationScheme) -> NDArray[np.int64]:
    """Expand the last axis of a symbol array into bits, big-endian"""
    symbols = np.asarray(symbols, dtype=np.int64)
    b = m.bits_per_symbol
    shifts = np.arange(b - 1, -1, -1)
    bits = (symbols[..., None] >> shifts) & 1
    return bits.reshape(*symbols.shape[:-1], symbols.shape[-1] * b)


def bits_to_dataword(bitstream: ArrayLike, m: ModulationScheme, block_len: int) -> tuple[Dataword, int]:
    """
    Segment a bit stream into datawords of ``block_len`` symbols.

    The final block is zero-padded; returns (blocks, pad_bits) with blocks of
    shape (n_blocks, block_len).
    """
    bits = np.asarray(bitstream, dtype=np.int64).ravel()
    per_block = m.bits_per_symbol * block_len
    pad = (-bits.size) % per_block
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.int64)])
    return bits_to_symbols(bits.reshape(-1, per_block), m), pad


def dataword_to_bits(datawords: ArrayLike, m: ModulationScheme, pad_bits: int = 0) -> NDArray[np.int64]:
    """Inverse of bits_to_dataword, dropping the recorded padding"""
    bits = symbols_to_bits(np.atleast_2d(datawords), m).ravel()
    return bits[: bits.size - pad_bits] if pad_bits else bits


def write_constellation_csv(m: ModulationScheme, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["symbol", "re", "im", "bit_label"])
    for s, p in enumerate(m.points):
        writer.writerow([s, f"{p.real:.17g}", f"{p.imag:.17g}", m.bit_label(s)])
