"""
Carrier, meta-atom layers and two-layer RIS stacks

Coordinates are absolute 3-D positions in meters. Layers are planar and
parallel to the xy-plane; layer 2 sits downstream of layer 1 along +z.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.distance import cdist, pdist, squareform

from risdcc.core.errors import ConstraintViolation, DegenerateGeometry, GeometryError

SPEED_OF_LIGHT = 299792458.0

# Intra-layer nearest-neighbour pitch bounds, in wavelengths
MIN_SPACING_WL = 0.1
MAX_SPACING_WL = 0.5
# Below this separation the Rayleigh-Sommerfeld point model is unreliable
MIN_SEPARATION_WL = 10.0

_BOUND_RTOL = 1e-9


@dataclass(frozen=True)
class CarrierSpec:
    """Carrier frequency and the wavelength derived from it"""

    frequency_hz: float

    def __post_init__(self):
        if not (np.isfinite(self.frequency_hz) and self.frequency_hz > 0):
            raise GeometryError(f"frequency_hz must be positive, got {self.frequency_hz}")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_hz

    @classmethod
    def from_wavelength(cls, wavelength_m: float) -> CarrierSpec:
        if wavelength_m <= 0:
            raise GeometryError(f"wavelength_m must be positive, got {wavelength_m}")
        return cls(SPEED_OF_LIGHT / wavelength_m)


@dataclass(frozen=True, eq=False)
class MetaAtomLayer:
    """
    One planar layer of meta-atoms.

    Positions are stored row-major as an (rows*cols, 3) read-only array.
    """

    positions: NDArray[np.float64]
    rows: int
    cols: int
    plane_z: float

    def __post_init__(self):
        positions = np.array(self.positions, dtype=np.float64)
        if positions.ndim != 2 or positions.shape[1] != 3:
            raise GeometryError(f"positions must have shape (n, 3), got {positions.shape}")
        if self.rows <= 0 or self.cols <= 0:
            raise GeometryError(f"rows and cols must be positive, got {self.rows}x{self.cols}")
        if self.rows * self.cols != positions.shape[0]:
            raise GeometryError(
                f"rows*cols = {self.rows * self.cols} does not match {positions.shape[0]} positions"
            )
        if not np.all(np.isfinite(positions)):
            raise GeometryError("positions must be finite")
        if np.any(positions[:, 2] != self.plane_z):
            raise GeometryError(f"every atom must lie exactly on plane z = {self.plane_z}")
        if positions.shape[0] > 1 and np.min(pdist(positions)) == 0.0:
            raise DegenerateGeometry("atom positions must be pairwise distinct")
        positions.flags.writeable = False
        object.__setattr__(self, "positions", positions)

    @property
    def size(self) -> int:
        return self.rows * self.cols

    @classmethod
    def from_xy(cls, xy: ArrayLike, plane_z: float, rows: int | None = None, cols: int | None = None) -> MetaAtomLayer:
        """Build a layer from in-plane coordinates; a single row unless a shape is given"""
        xy = np.atleast_2d(np.asarray(xy, dtype=np.float64))
        n = xy.shape[0]
        rows = rows if rows is not None else 1
        cols = cols if cols is not None else n // rows
        positions = np.column_stack([xy, np.full(n, float(plane_z))])
        return cls(positions, rows, cols, float(plane_z))

    def nearest_neighbor_pairs(self) -> list[tuple[int, int, float]]:
        """Distinct (i, j, distance) nearest-neighbour pairs, i < j, in index order"""
        if self.size < 2:
            return []
        dist = squareform(pdist(self.positions[:, :2]))
        np.fill_diagonal(dist, np.inf)
        pairs = {}
        for i in range(self.size):
            j = int(np.argmin(dist[i]))
            key = (min(i, j), max(i, j))
            pairs[key] = float(dist[i, j])
        return [(i, j, d) for (i, j), d in sorted(pairs.items())]


@dataclass(frozen=True)
class RisStack:
    """Two parallel meta-atom layers and the carrier that illuminates them"""

    carrier: CarrierSpec
    layer1: MetaAtomLayer
    layer2: MetaAtomLayer
    allow_near_field: bool = False

    def __post_init__(self):
        if self.separation_m <= 0:
            raise DegenerateGeometry(
                f"layer 2 must sit downstream of layer 1, separation {self.separation_m} m"
            )

    @property
    def separation_m(self) -> float:
        return self.layer2.plane_z - self.layer1.plane_z

    @property
    def wavelength_m(self) -> float:
        return self.carrier.wavelength_m

    @property
    def input_dim(self) -> int:
        return self.layer1.size

    @property
    def output_dim(self) -> int:
        return self.layer2.size

    def replace(
        self,
        layer1_xy: ArrayLike | None = None,
        layer2_xy: ArrayLike | None = None,
        separation_m: float | None = None,
    ) -> RisStack:
        """Copy with new in-plane coordinates and/or layer separation; shapes are kept"""
        xy1 = self.layer1.positions[:, :2] if layer1_xy is None else np.asarray(layer1_xy, dtype=np.float64)
        xy2 = self.layer2.positions[:, :2] if layer2_xy is None else np.asarray(layer2_xy, dtype=np.float64)
        z1 = self.layer1.plane_z
        z2 = z1 + (self.separation_m if separation_m is None else float(separation_m))
        return RisStack(
            carrier=self.carrier,
            layer1=MetaAtomLayer.from_xy(xy1, z1, self.layer1.rows, self.layer1.cols),
            layer2=MetaAtomLayer.from_xy(xy2, z2, self.layer2.rows, self.layer2.cols),
            allow_near_field=self.allow_near_field,
        )

    def scaled(self, factor: float) -> RisStack:
        """Scale every coordinate and the wavelength together"""
        if factor <= 0:
            raise GeometryError(f"scale factor must be positive, got {factor}")
        layer1 = MetaAtomLayer(self.layer1.positions * factor, self.layer1.rows, self.layer1.cols,
                               self.layer1.plane_z * factor)
        layer2 = MetaAtomLayer(self.layer2.positions * factor, self.layer2.rows, self.layer2.cols,
                               self.layer2.plane_z * factor)
        return RisStack(CarrierSpec(self.carrier.frequency_hz / factor), layer1, layer2,
                        self.allow_near_field)


@dataclass(frozen=True)
class Violation:
    """One breached constraint"""

    constraint: str
    atoms: tuple[tuple[int, int], ...]
    value: float
    detail: str

    def to_text(self) -> str:
        return f"{self.constraint}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    """Constraint violations of a stack; empty means valid"""

    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def constraint_ids(self) -> list[str]:
        return [v.constraint for v in self.violations]

    def to_text(self) -> str:
        return "".join(v.to_text() + "\n" for v in self.violations)

    def __len__(self) -> int:
        return len(self.violations)


def _layer_violations(layer: MetaAtomLayer, layer_index: int, wavelength: float) -> list[Violation]:
    lo = MIN_SPACING_WL * wavelength
    hi = MAX_SPACING_WL * wavelength
    found = []
    for i, j, d in layer.nearest_neighbor_pairs():
        atoms = ((layer_index, i), (layer_index, j))
        if d < lo * (1 - _BOUND_RTOL):
            found.append(Violation(
                "spacing_below_min", atoms, d,
                f"layer {layer_index} atoms {i},{j} spaced {d / wavelength:.6g} wavelengths ({d:.6g} m) < {MIN_SPACING_WL}",
            ))
        elif d > hi * (1 + _BOUND_RTOL):
            found.append(Violation(
                "spacing_above_max", atoms, d,
                f"layer {layer_index} atoms {i},{j} spaced {d / wavelength:.6g} wavelengths ({d:.6g} m) > {MAX_SPACING_WL}",
            ))
    return found


def validate_stack(stack: RisStack, require_expansion: bool = True) -> ValidationReport:
    """
    Check a stack against the physical constraints.

    Nearest-neighbour pitch within each layer must lie in [λ/10, λ/2]; the
    separation must be at least 10λ unless the stack allows near-field
    operation; block codes must expand dimension (K·L < M·N). Trellis
    stacks pass ``require_expansion=False``.
    """
    wavelength = stack.wavelength_m
    found = _layer_violations(stack.layer1, 1, wavelength)
    found += _layer_violations(stack.layer2, 2, wavelength)

    sep = stack.separation_m
    if not stack.allow_near_field and sep < MIN_SEPARATION_WL * wavelength * (1 - _BOUND_RTOL):
        found.append(Violation(
            "separation_below_rs_validity", (), sep,
            f"separation {sep / wavelength:.6g} wavelengths ({sep:.6g} m) < {MIN_SEPARATION_WL}",
        ))

    if require_expansion and stack.input_dim >= stack.output_dim:
        found.append(Violation(
            "dimension_not_expanding", (), float(stack.input_dim),
            f"layer 1 has {stack.input_dim} atoms, layer 2 has {stack.output_dim}; K*L must be < M*N",
        ))
    return ValidationReport(tuple(found))


def ensure_valid(stack: RisStack, require_expansion: bool = True) -> RisStack:
    """Return the stack, or raise ConstraintViolation carrying the report"""
    report = validate_stack(stack, require_expansion)
    if not report.ok:
        raise ConstraintViolation(
            "geometry violates constraints: " + ", ".join(report.constraint_ids), report
        )
    return stack


def cross_layer_distances(stack: RisStack) -> NDArray[np.float64]:
    """(M*N, K*L) matrix of layer-2 to layer-1 atom distances"""
    return cdist(stack.layer2.positions, stack.layer1.positions)


def encoding_latency_s(stack: RisStack) -> float:
    """Time for the wave to cross the longest layer-1 to layer-2 path"""
    return float(np.max(cross_layer_distances(stack))) / SPEED_OF_LIGHT


def stack_digest(stack: RisStack) -> str:
    """Content hash of the geometry at full precision"""
    h = hashlib.sha256()
    h.update(np.float64(stack.carrier.frequency_hz).tobytes())
    for layer in (stack.layer1, stack.layer2):
        h.update(np.array([layer.rows, layer.cols], dtype=np.int64).tobytes())
        h.update(np.ascontiguousarray(layer.positions).tobytes())
    h.update(b"nf" if stack.allow_near_field else b"ff")
    return h.hexdigest()[:16]


def _require_positive(**params: float):
    for name, value in params.items():
        if not (np.isfinite(value) and value > 0):
            raise ConstraintViolation(f"{name} must be positive, got {value}")


def preset_repetition_42(carrier: CarrierSpec, a: float, h: float, dz: float) -> RisStack:
    """
    (4,2) repetition-type block code.

    Layer 1 holds two atoms at x = ±a/2; layer 2 holds four atoms at
    (±a/2, ±h), ordered row-major from +y to -y. The stack is mirror
    symmetric, so only two cross-layer distances occur and rows 3, 4 of the
    generator repeat rows 1, 2.
    """
    _require_positive(a=a, h=h, dz=dz)
    layer1 = MetaAtomLayer.from_xy([[-a / 2, 0.0], [a / 2, 0.0]], 0.0)
    layer2 = MetaAtomLayer.from_xy(
        [[-a / 2, h], [a / 2, h], [-a / 2, -h], [a / 2, -h]], dz, rows=2, cols=2
    )
    return ensure_valid(RisStack(carrier, layer1, layer2))


def preset_systematic_42(carrier: CarrierSpec, d: float, dz: float) -> RisStack:
    """
    (4,2) systematic-type block code.

    Four layer-2 atoms on a line at pitch d; the two layer-1 atoms are
    aligned with the inner pair, giving three distinct propagation factors.
    """
    _require_positive(d=d, dz=dz)
    layer1 = MetaAtomLayer.from_xy([[-0.5 * d, 0.0], [0.5 * d, 0.0]], 0.0)
    layer2 = MetaAtomLayer.from_xy(
        [[-1.5 * d, 0.0], [-0.5 * d, 0.0], [0.5 * d, 0.0], [1.5 * d, 0.0]], dz
    )
    return ensure_valid(RisStack(carrier, layer1, layer2))


def evenly_spaced_stack(carrier: CarrierSpec, n_in: int, n_out: int, pitch: float, dz: float,
                        require_expansion: bool = True) -> RisStack:
    """Two centred lines of atoms along x at a common pitch"""
    _require_positive(pitch=pitch, dz=dz)
    x1 = (np.arange(n_in) - (n_in - 1) / 2) * pitch
    x2 = (np.arange(n_out) - (n_out - 1) / 2) * pitch
    layer1 = MetaAtomLayer.from_xy(np.column_stack([x1, np.zeros(n_in)]), 0.0)
    layer2 = MetaAtomLayer.from_xy(np.column_stack([x2, np.zeros(n_out)]), dz)
    return ensure_valid(RisStack(carrier, layer1, layer2), require_expansion)


def preset_74(carrier: CarrierSpec, variant: str, pitch: float | None = None, dz: float | None = None,
              path: str | None = None) -> RisStack:
    """
    (7,4) block code stand-in geometries.

    ``evenly_spaced`` places 4 and 7 atoms on centred lines at ``pitch``;
    ``from_file`` loads a geometry file and checks it is a (7,4) stack.
    """
    if variant == "evenly_spaced":
        if pitch is None or dz is None:
            raise ConstraintViolation("evenly_spaced requires pitch and dz")
        return evenly_spaced_stack(carrier, 4, 7, pitch, dz)
    if variant == "from_file":
        from risdcc.core.geofile import read_geometry

        if path is None:
            raise ConstraintViolation("from_file requires a path")
        stack = read_geometry(path)
        ensure_valid(stack)
        if (stack.input_dim, stack.output_dim) != (4, 7):
            raise ConstraintViolation(
                f"(7,4) geometry needs 4 and 7 atoms, got {stack.input_dim} and {stack.output_dim}"
            )
        return stack
    raise ConstraintViolation(f"unknown (7,4) variant {variant!r}")
