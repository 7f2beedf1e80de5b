"""
Block DCC: encoding, codebook enumeration and Euclidean distance analysis
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.distance import cdist, pdist

from risdcc.config import Config
from risdcc.core.diffraction import GeneratorMatrix
from risdcc.core.errors import DimensionMismatch, SearchSpaceTooLarge, ZeroDistance
from risdcc.core.modem import ModulationScheme, modulate, symbols_to_bits

Codeword = NDArray[np.complex128]

# Largest codebook whose full pairwise multiset is materialized
EXACT_PAIR_LIMIT = 4096
# Relative to the largest codeword norm
ZERO_DISTANCE_RTOL = 1e-12


def encode_block(G: GeneratorMatrix, s: ArrayLike) -> Codeword:
    """v = G s; a leading batch axis on s is allowed"""
    s = np.asarray(s, dtype=np.complex128)
    if s.shape[-1] != G.input_dim:
        raise DimensionMismatch(f"signal length {s.shape[-1]} does not match {G.input_dim} generator columns")
    return s @ G.entries.T


def code_rate(G: GeneratorMatrix) -> float:
    return G.rate


def _as_real(v: NDArray[np.complex128]) -> NDArray[np.float64]:
    return np.concatenate([v.real, v.imag], axis=-1)


@dataclass(frozen=True, eq=False)
class Codebook:
    """All (dataword, codeword) pairs in lexicographic dataword order"""

    datawords: NDArray[np.int64]
    codewords: NDArray[np.complex128]
    scheme: ModulationScheme

    def __len__(self) -> int:
        return len(self.datawords)

    def label(self, index: int) -> str:
        return "".join(map(str, symbols_to_bits(self.datawords[index], self.scheme)))


def all_datawords(length: int, m: ModulationScheme, bit_limit: int | None = None) -> NDArray[np.int64]:
    """Every dataword of ``length`` symbols, first symbol most significant"""
    bit_limit = Config.CODEBOOK_BIT_LIMIT if bit_limit is None else bit_limit
    total_bits = length * m.bits_per_symbol
    if total_bits > bit_limit:
        raise SearchSpaceTooLarge(
            f"{length} symbols x {m.bits_per_symbol} bits = {total_bits} bits exceeds the exhaustive bound of {bit_limit}"
        )
    index = np.arange(2**total_bits, dtype=np.int64)
    powers = m.order ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return (index[:, None] // powers) % m.order


def enumerate_codebook(G: GeneratorMatrix, m: ModulationScheme, bit_limit: int | None = None) -> Codebook:
    datawords = all_datawords(G.input_dim, m, bit_limit)
    return Codebook(datawords, encode_block(G, modulate(datawords, m)), m)


@dataclass(frozen=True, eq=False)
class DistanceSpectrum:
    """
    Pairwise codeword distances in (a, b), a < b order.

    ``estimated`` marks spectra built from sampled pairs rather than the
    full codebook.
    """

    distances: NDArray[np.float64]
    pairs: NDArray[np.int64]
    d_min: float
    argmin_pair: tuple[int, int]
    n_codewords: int
    scale: float
    estimated: bool = False

    @property
    def d_max(self) -> float:
        return float(np.max(self.distances))


def distance_spectrum(codebook: Codebook) -> DistanceSpectrum:
    """Exact spectrum over all C(|codebook|, 2) pairs"""
    c = len(codebook)
    if c < 2:
        raise ValueError("distance spectrum needs at least two codewords")
    if c > EXACT_PAIR_LIMIT:
        raise SearchSpaceTooLarge(
            f"{c} codewords exceed the exact pairwise limit of {EXACT_PAIR_LIMIT}; use sample_distance_spectrum"
        )
    distances = pdist(_as_real(codebook.codewords))
    a, b = np.triu_indices(c, 1)
    k = int(np.argmin(distances))
    return DistanceSpectrum(
        distances=distances,
        pairs=np.column_stack([a, b]),
        d_min=float(distances[k]),
        argmin_pair=(int(a[k]), int(b[k])),
        n_codewords=c,
        scale=float(np.max(np.linalg.norm(codebook.codewords, axis=1))),
    )


def minimum_distance(codebook: Codebook, chunk: int = 512) -> tuple[float, tuple[int, int]]:
    """d_min and its lexicographically first pair, without storing the multiset"""
    real = _as_real(codebook.codewords)
    c = len(real)
    if c < 2:
        raise ValueError("minimum distance needs at least two codewords")
    best, best_pair = np.inf, (0, 1)
    for start in range(0, c - 1, chunk):
        stop = min(start + chunk, c)
        block = cdist(real[start:stop], real)
        rows = np.arange(start, stop)[:, None]
        block[np.arange(c)[None, :] <= rows] = np.inf
        k = int(np.argmin(block))
        i, j = divmod(k, c)
        if block[i, j] < best:
            best, best_pair = float(block[i, j]), (start + i, j)
    return best, best_pair


def sample_distance_spectrum(G: GeneratorMatrix, m: ModulationScheme, n_pairs: int,
                             rng: np.random.Generator) -> DistanceSpectrum:
    """Monte-Carlo estimate of the spectrum from random distinct dataword pairs"""
    k = G.input_dim
    da = rng.integers(0, m.order, size=(n_pairs, k))
    db = rng.integers(0, m.order, size=(n_pairs, k))
    same = np.all(da == db, axis=1)
    # force distinct pairs by changing the first symbol
    db[same, 0] = (db[same, 0] + 1) % m.order
    va = encode_block(G, modulate(da, m))
    vb = encode_block(G, modulate(db, m))
    distances = np.linalg.norm(va - vb, axis=1)
    i = int(np.argmin(distances))
    scale = float(max(np.max(np.linalg.norm(va, axis=1)), np.max(np.linalg.norm(vb, axis=1))))
    return DistanceSpectrum(
        distances=distances,
        pairs=np.empty((0, 2), dtype=np.int64),
        d_min=float(distances[i]),
        # index of the sample that achieved d_min
        argmin_pair=(i, i),
        n_codewords=m.order**k,
        scale=scale,
        estimated=True,
    )


def decoding_radius(spec: DistanceSpectrum) -> float:
    """Radius of the non-overlapping decoding spheres"""
    if spec.d_min <= ZERO_DISTANCE_RTOL * max(spec.scale, 1e-300):
        raise ZeroDistance(f"two codewords coincide (d_min = {spec.d_min:.3g}); the code is not injective")
    return spec.d_min / 2


def write_distance_csv(spec: DistanceSpectrum, codebook: Codebook, stream: IO[str]) -> None:
    if spec.estimated:
        raise ValueError("sampled spectra have no dataword pair listing")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["dataword_a", "dataword_b", "distance"])
    for (a, b), d in zip(spec.pairs, spec.distances, strict=True):
        writer.writerow([codebook.label(a), codebook.label(b), f"{d:.17g}"])
