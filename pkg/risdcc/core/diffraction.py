"""
Rayleigh-Sommerfeld propagation and generator matrix assembly
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from typing import IO, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from risdcc.core.errors import DegenerateGeometry, DimensionMismatch, FileFormatError
from risdcc.core.geometry import RisStack, ensure_valid, stack_digest

Normalization = Literal["raw", "unit_frobenius"]
NORMALIZATIONS = ("raw", "unit_frobenius")

CSV_HEADER = ["row", "col", "re", "im"]


def rs_coefficient(p: ArrayLike, q: ArrayLike, wavelength: float) -> complex:
    """
    Propagation factor from source point p to observation point q.

    w = (dz / r^2) * (1 / (2 pi r) + 1 / (j lambda)) * exp(j 2 pi r / lambda)
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if wavelength <= 0:
        raise DegenerateGeometry(f"wavelength must be positive, got {wavelength}")
    dz = float(q[2] - p[2])
    r = float(np.linalg.norm(q - p))
    if r == 0.0 or dz <= 0.0:
        raise DegenerateGeometry(f"observation point must lie downstream of the source (r={r}, dz={dz})")
    return complex((dz / r**2) * (1 / (2 * np.pi * r) + 1 / (1j * wavelength)) * np.exp(2j * np.pi * r / wavelength))


def rs_matrix(sources: ArrayLike, targets: ArrayLike, wavelength: float) -> NDArray[np.complex128]:
    """(len(targets), len(sources)) matrix of propagation factors"""
    sources = np.atleast_2d(np.asarray(sources, dtype=np.float64))
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    if wavelength <= 0:
        raise DegenerateGeometry(f"wavelength must be positive, got {wavelength}")
    diff = targets[:, None, :] - sources[None, :, :]
    r = np.linalg.norm(diff, axis=-1)
    dz = diff[..., 2]
    if np.any(r == 0.0) or np.any(dz <= 0.0):
        raise DegenerateGeometry("every target must lie strictly downstream of every source")
    return (dz / r**2) * (1 / (2 * np.pi * r) + 1 / (1j * wavelength)) * np.exp(2j * np.pi * r / wavelength)


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Complex (M*N) x (K*L) generator with its normalization metadata"""

    entries: NDArray[np.complex128]
    normalization: Normalization = "raw"
    source_stack_digest: str = ""
    insertion_loss_db: float = 0.0

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.complex128)
        if entries.ndim != 2:
            raise DimensionMismatch(f"generator must be 2-D, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise DegenerateGeometry("generator entries must be finite")
        if self.insertion_loss_db < 0:
            raise ValueError(f"insertion_loss_db must be non-negative, got {self.insertion_loss_db}")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @property
    def output_dim(self) -> int:
        return self.entries.shape[0]

    @property
    def input_dim(self) -> int:
        return self.entries.shape[1]

    @property
    def rate(self) -> float:
        return self.input_dim / self.output_dim

    @property
    def amplitude_factor(self) -> float:
        return 10 ** (-self.insertion_loss_db / 20)

    @property
    def radiated_energy(self) -> float:
        """Mean codeword energy for unit-energy symbols, before insertion loss"""
        return float(np.sum(np.abs(self.entries) ** 2)) / self.amplitude_factor**2

    @property
    def digest(self) -> str:
        return generator_digest(self)

    def scaled(self, factor: float) -> GeneratorMatrix:
        return GeneratorMatrix(self.entries * factor, "raw", self.source_stack_digest, self.insertion_loss_db)

    @classmethod
    def from_entries(cls, entries: ArrayLike, normalization: Normalization = "raw",
                     insertion_loss_db: float = 0.0) -> GeneratorMatrix:
        raw = np.asarray(entries, dtype=np.complex128)
        return cls(_normalize(raw, normalization, insertion_loss_db), normalization,
                   "matrix:" + _hash_entries(raw), insertion_loss_db)


def _normalize(raw: NDArray[np.complex128], normalization: Normalization,
               insertion_loss_db: float) -> NDArray[np.complex128]:
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")
    g = raw
    if normalization == "unit_frobenius":
        norm = np.linalg.norm(raw, "fro")
        if norm == 0:
            raise DegenerateGeometry("cannot normalize an all-zero generator")
        g = raw * (np.sqrt(raw.shape[0]) / norm)
    return g * 10 ** (-insertion_loss_db / 20)


def build_generator(stack: RisStack, normalization: Normalization = "unit_frobenius",
                    insertion_loss_db: float = 0.0, require_expansion: bool = True) -> GeneratorMatrix:
    """
    Generator matrix of a stack: entry (i, j) is the propagation factor from
    layer-1 atom j to layer-2 atom i.
    """
    ensure_valid(stack, require_expansion)
    raw = rs_matrix(stack.layer1.positions, stack.layer2.positions, stack.wavelength_m)
    return GeneratorMatrix(_normalize(raw, normalization, insertion_loss_db), normalization,
                           stack_digest(stack), insertion_loss_db)


def _hash_entries(entries: NDArray[np.complex128]) -> str:
    h = hashlib.sha256()
    h.update(np.array(entries.shape, dtype=np.int64).tobytes())
    h.update(np.ascontiguousarray(entries, dtype=np.complex128).tobytes())
    return h.hexdigest()[:16]


def generator_digest(G: GeneratorMatrix) -> str:
    """Stable fingerprint of the entries at full precision"""
    return _hash_entries(G.entries)


def write_generator_csv(G: GeneratorMatrix, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for (i, j), w in np.ndenumerate(G.entries):
        writer.writerow([i, j, f"{w.real:.17g}", f"{w.imag:.17g}"])


def read_generator_csv(stream: IO[str]) -> NDArray[np.complex128]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != CSV_HEADER:
        raise FileFormatError(f"expected header {','.join(CSV_HEADER)}, got {header}")
    cells = {}
    for lineno, row in enumerate(reader, start=2):
        try:
            i, j, re, im = int(row[0]), int(row[1]), float(row[2]), float(row[3])
        except (ValueError, IndexError):
            raise FileFormatError(f"line {lineno}: malformed row {row}") from None
        cells[(i, j)] = complex(re, im)
    if not cells:
        raise FileFormatError("generator CSV has no entries")
    rows = max(i for i, _ in cells) + 1
    cols = max(j for _, j in cells) + 1
    if len(cells) != rows * cols:
        raise FileFormatError(f"expected {rows * cols} entries, got {len(cells)}")
    out = np.empty((rows, cols), dtype=np.complex128)
    for (i, j), w in cells.items():
        out[i, j] = w
    return out


def distinct_entries(G: GeneratorMatrix, rtol: float = 1e-12) -> NDArray[np.complex128]:
    """Entries that differ by more than rtol times the largest magnitude, in order of first appearance"""
    tol = rtol * float(np.max(np.abs(G.entries)))
    found: list[complex] = []
    for w in G.entries.ravel():
        if all(abs(w - v) > tol for v in found):
            found.append(complex(w))
    return np.array(found, dtype=np.complex128)
