"""
Classical comparison codes

Hamming(7,4) in systematic form [d1 d2 d3 d4 p1 p2 p3] with
p1 = d1^d2^d4, p2 = d1^d3^d4, p3 = d2^d3^d4, and the rate-1/2 (2,1,3)
convolutional code with generators (13, 17) octal, i.e. 1 + D^2 + D^3 and
1 + D + D^2 + D^3. Both are pinned by the test vectors in tests/.
"""

from __future__ import annotations

import itertools
from functools import cache
from pathlib import Path
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from risdcc.core.trellis import Trellis, viterbi

Bits = NDArray[np.int64]

HAMMING_P = np.array([[1, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]], dtype=np.int64)
HAMMING_G = np.hstack([np.eye(4, dtype=np.int64), HAMMING_P])
HAMMING_H = np.hstack([HAMMING_P.T, np.eye(3, dtype=np.int64)])

CONV_GENERATORS = (0o13, 0o17)
CONV_MEMORY = 3


def _bpsk(bits: ArrayLike) -> NDArray[np.float64]:
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


# Hamming(7,4)

def hamming_encode(d: ArrayLike) -> Bits:
    """Encode 4-bit words; a leading batch axis is allowed"""
    return (np.asarray(d, dtype=np.int64) @ HAMMING_G) % 2


@cache
def _hamming_codebook() -> tuple[Bits, Bits]:
    words = np.array(list(itertools.product((0, 1), repeat=4)), dtype=np.int64)
    return words, hamming_encode(words)


@cache
def _syndrome_table() -> NDArray[np.int64]:
    """Syndrome (as integer p1 p2 p3) -> bit position to flip, -1 for none"""
    table = np.full(8, -1, dtype=np.int64)
    for pos in range(7):
        col = HAMMING_H[:, pos]
        table[col[0] * 4 + col[1] * 2 + col[2]] = pos
    return table


def hamming_syndrome(r: ArrayLike) -> Bits:
    return (np.asarray(r, dtype=np.int64) @ HAMMING_H.T) % 2


def hamming_decode_hard(r: ArrayLike) -> Bits:
    """Syndrome decoding; corrects any single bit flip"""
    r = np.array(r, dtype=np.int64)
    single = r.ndim == 1
    r = np.atleast_2d(r)
    syn = hamming_syndrome(r)
    pos = _syndrome_table()[syn @ np.array([4, 2, 1])]
    rows = np.nonzero(pos >= 0)[0]
    r[rows, pos[rows]] ^= 1
    return r[0, :4] if single else r[:, :4]


def hamming_decode_soft(y: ArrayLike) -> Bits:
    """ML over the 16 codewords for real BPSK observations; ties to the lower index"""
    y = np.real(np.asarray(y))
    single = y.ndim == 1
    y = np.atleast_2d(y)
    words, codewords = _hamming_codebook()
    dist = np.sum((y[:, None, :] - _bpsk(codewords)[None]) ** 2, axis=-1)
    out = words[np.argmin(dist, axis=1)]
    return out[0] if single else out


def hamming_min_distance() -> int:
    _, codewords = _hamming_codebook()
    return int(min(np.sum(a != b) for a, b in itertools.combinations(codewords, 2)))


def hamming_ber_hard_exact(p: float) -> float:
    """
    Information-bit error rate after syndrome decoding on a BSC with
    crossover p, by enumerating all 128 error patterns on the zero codeword.
    """
    total = 0.0
    for pattern in itertools.product((0, 1), repeat=7):
        e = np.array(pattern, dtype=np.int64)
        w = int(e.sum())
        errors = int(hamming_decode_hard(e).sum())
        total += p**w * (1 - p) ** (7 - w) * errors
    return total / 4


# Convolutional (2,1,3)

def _parity(x: int) -> int:
    return bin(x).count("1") & 1


@cache
def conv_trellis(kind: Literal["bits", "bpsk"] = "bits") -> Trellis:
    """Trellis of the (13, 17) code; outputs as bits or as BPSK amplitudes"""
    states = 2**CONV_MEMORY
    outputs = np.empty((states, 2, 2), dtype=np.int64)
    for s in range(states):
        for u in (0, 1):
            # register bit 3 is the current input, bit 0 the oldest
            reg = (u << 3) | ((s & 1) << 2) | (((s >> 1) & 1) << 1) | ((s >> 2) & 1)
            outputs[s, u] = [_parity(reg & g) for g in CONV_GENERATORS]
    if kind == "bpsk":
        return Trellis(2, CONV_MEMORY, _bpsk(outputs))
    return Trellis(2, CONV_MEMORY, outputs)


def conv_encode(bits: ArrayLike) -> Bits:
    """
    Rate-1/2 encoding with 3 zero flush bits appended; (L,) -> (2(L+3),)
    or (F, L) -> (F, 2(L+3)).
    """
    bits = np.asarray(bits, dtype=np.int64)
    single = bits.ndim == 1
    out = conv_trellis().encode(np.atleast_2d(bits))
    out = out.reshape(out.shape[0], -1)
    return out[0] if single else out


def conv_viterbi(y: ArrayLike, mode: Literal["hard", "soft"] = "hard") -> Bits:
    """
    ML decoding of a terminated stream. ``hard`` takes received bits and
    uses Hamming distance; ``soft`` takes real BPSK observations and uses
    Euclidean distance. Ties resolve toward the zero branch.
    """
    y = np.asarray(y)
    single = y.ndim == 1
    y = np.atleast_2d(y)
    pairs = y.reshape(y.shape[0], -1, 2)
    if mode == "hard":
        decoded = viterbi(conv_trellis("bits"), pairs.astype(np.int64), metric="hamming")
    elif mode == "soft":
        decoded = viterbi(conv_trellis("bpsk"), np.real(pairs), metric="euclidean")
    else:
        raise ValueError(f"mode must be 'hard' or 'soft', got {mode!r}")
    return decoded[0] if single else decoded


def free_distance(max_length: int = 12) -> int:
    """Minimum output weight over all terminated paths leaving state 0 with a 1"""
    best = None
    for length in range(1, max_length + 1):
        for tail in itertools.product((0, 1), repeat=length - 1):
            w = int(conv_encode(np.array((1, *tail))).sum())
            best = w if best is None else min(best, w)
    return best


def format_conformance_vectors(n_random: int = 16, seed: int = 0) -> str:
    """Text lines "input_bits output_bits" for both baseline encoders"""
    rng = np.random.default_rng(seed)
    lines = ["# hamming74"]
    words, codewords = _hamming_codebook()
    for d, c in zip(words, codewords, strict=True):
        lines.append(f"{''.join(map(str, d))} {''.join(map(str, c))}")
    lines.append("# conv213")
    for _ in range(n_random):
        msg = rng.integers(0, 2, size=int(rng.integers(1, 21)))
        lines.append(f"{''.join(map(str, msg))} {''.join(map(str, conv_encode(msg)))}")
    return "\n".join(lines) + "\n"


def write_conformance_vectors(path: str | Path, n_random: int = 16, seed: int = 0) -> None:
    Path(path).write_text(format_conformance_vectors(n_random, seed), encoding="utf-8")
