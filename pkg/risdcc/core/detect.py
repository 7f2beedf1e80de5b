"""
Receiver detectors

Receiver type 1 estimates the dataword straight from the M*N received
entries (exhaustive ML or linear MMSE). Receiver type 2 first reduces the
dimension back to K*L; its multi-layer diffractive reducer is idealized
here as the exact left pseudo-inverse of G, the best linear reducer, so
its results bound what a trained reducer can reach.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.distance import cdist

from risdcc.core.codec_block import Codebook, enumerate_codebook
from risdcc.core.diffraction import GeneratorMatrix
from risdcc.core.errors import DetectorError, DimensionMismatch, NumericalSingularity, RankDeficient
from risdcc.core.modem import Dataword, ModulationScheme, slice_symbols

CONDITION_LIMIT = 1e12


class DetectorKind(Enum):
    """Detector enumeration"""
    ML = "ml"
    MMSE = "mmse"
    REDUCER = "reducer"


@dataclass(frozen=True)
class DetectorConfig:
    kind: DetectorKind
    noise_variance: float = 0.0

    def __post_init__(self):
        if not self.noise_variance >= 0:
            raise DetectorError(f"noise variance must be non-negative, got {self.noise_variance}")


def _check_received(G: GeneratorMatrix, y: NDArray) -> NDArray[np.complex128]:
    y = np.asarray(y, dtype=np.complex128)
    if y.shape[-1] != G.output_dim:
        raise DimensionMismatch(f"received length {y.shape[-1]} does not match {G.output_dim} generator rows")
    return y


def _as_real(v: NDArray[np.complex128]) -> NDArray[np.float64]:
    return np.concatenate([v.real, v.imag], axis=-1)


class MLDetector:
    """Exhaustive codebook search; ties resolve to the lexicographically smaller dataword"""

    def __init__(self, G: GeneratorMatrix, m: ModulationScheme, codebook: Codebook | None = None):
        self.G = G
        self.m = m
        self.codebook = codebook if codebook is not None else enumerate_codebook(G, m)
        self._real_codewords = _as_real(self.codebook.codewords)

    def __call__(self, y: ArrayLike, chunk: int = 4096) -> Dataword:
        y = _check_received(self.G, y)
        single = y.ndim == 1
        rows = np.atleast_2d(y)
        out = np.empty((len(rows), self.G.input_dim), dtype=np.int64)
        for start in range(0, len(rows), chunk):
            dist = cdist(_as_real(rows[start:start + chunk]), self._real_codewords, "sqeuclidean")
            out[start:start + chunk] = self.codebook.datawords[np.argmin(dist, axis=1)]
        return out[0] if single else out


class LinearDetector:
    """Apply a fixed K*L x M*N estimator, then slice per symbol"""

    def __init__(self, G: GeneratorMatrix, m: ModulationScheme, W: NDArray[np.complex128]):
        self.G = G
        self.m = m
        self.W = W

    def estimate(self, y: ArrayLike) -> NDArray[np.complex128]:
        y = _check_received(self.G, y)
        return y @ self.W.T

    def __call__(self, y: ArrayLike) -> Dataword:
        return slice_symbols(self.estimate(y), self.m)


def _condition_check(matrix: NDArray, what: str):
    cond = np.linalg.cond(matrix)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise NumericalSingularity(f"{what} condition number {cond:.3g} exceeds {CONDITION_LIMIT:.0e}")


def mmse_detector(G: GeneratorMatrix, m: ModulationScheme, N0: float) -> LinearDetector:
    """
    s_hat = G^H (G G^H + N0 I)^-1 y, computed in the equivalent K*L-sized
    form (G^H G + N0 I)^-1 G^H y.
    """
    if not N0 > 0:
        raise DetectorError(f"MMSE detection needs N0 > 0, got {N0}")
    A = G.entries
    gram = A.conj().T @ A + N0 * np.eye(G.input_dim)
    _condition_check(gram, "regularized Gram matrix")
    W = np.linalg.solve(gram, A.conj().T)
    return LinearDetector(G, m, W)


def reducer_detector(G: GeneratorMatrix, m: ModulationScheme) -> LinearDetector:
    """Left pseudo-inverse (G^H G)^-1 G^H via least squares"""
    A = G.entries
    if np.linalg.matrix_rank(A) < G.input_dim:
        raise RankDeficient(f"generator rank {np.linalg.matrix_rank(A)} < {G.input_dim} columns")
    _condition_check(A, "generator")
    W, *_ = np.linalg.lstsq(A, np.eye(G.output_dim, dtype=np.complex128), rcond=None)
    return LinearDetector(G, m, W)


def detect_ml(G: GeneratorMatrix, m: ModulationScheme, y: ArrayLike) -> Dataword:
    return MLDetector(G, m)(y)


def detect_mmse(G: GeneratorMatrix, m: ModulationScheme, y: ArrayLike, N0: float) -> Dataword:
    return mmse_detector(G, m, N0)(y)


def detect_reducer(G: GeneratorMatrix, m: ModulationScheme, y: ArrayLike) -> Dataword:
    return reducer_detector(G, m)(y)


def make_detector(config: DetectorConfig, G: GeneratorMatrix, m: ModulationScheme):
    """Build a callable detector; MMSE at N0 = 0 falls back to the pseudo-inverse"""
    if config.kind is DetectorKind.ML:
        return MLDetector(G, m)
    if config.kind is DetectorKind.MMSE:
        if config.noise_variance == 0:
            return reducer_detector(G, m)
        return mmse_detector(G, m, config.noise_variance)
    return reducer_detector(G, m)
