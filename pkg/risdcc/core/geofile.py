"""
Plain-text geometry files

    frequency_hz 25000000000.0
    allow_near_field 0
    shape 1 1 2
    shape 2 2 2
    1 -0.003 0.0 0.0
    ...

Header lines first, then one atom per line "layer_index x y z" in meters.
Floats are written in shortest round-trip form so a write/read cycle is
bit-exact. Lines starting with '#' are ignored.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from risdcc.core.errors import FileFormatError, GeometryError
from risdcc.core.geometry import CarrierSpec, MetaAtomLayer, RisStack


def format_geometry(stack: RisStack) -> str:
    lines = [
        f"frequency_hz {stack.carrier.frequency_hz!r}",
        f"allow_near_field {int(stack.allow_near_field)}",
        f"shape 1 {stack.layer1.rows} {stack.layer1.cols}",
        f"shape 2 {stack.layer2.rows} {stack.layer2.cols}",
    ]
    for index, layer in ((1, stack.layer1), (2, stack.layer2)):
        for x, y, z in layer.positions:
            lines.append(f"{index} {float(x)!r} {float(y)!r} {float(z)!r}")
    return "\n".join(lines) + "\n"


def write_geometry(stack: RisStack, path: str | Path) -> None:
    Path(path).write_text(format_geometry(stack), encoding="utf-8")


def parse_geometry(text: str, source: str = "<string>") -> RisStack:
    frequency = None
    near_field = False
    shapes: dict[int, tuple[int, int]] = {}
    atoms: dict[int, list[tuple[float, float, float]]] = {1: [], 2: []}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "frequency_hz" and len(parts) == 2:
                frequency = float(parts[1])
            elif parts[0] == "allow_near_field" and len(parts) == 2:
                near_field = bool(int(parts[1]))
            elif parts[0] == "shape" and len(parts) == 4:
                shapes[int(parts[1])] = (int(parts[2]), int(parts[3]))
            elif len(parts) == 4 and parts[0] in ("1", "2"):
                atoms[int(parts[0])].append((float(parts[1]), float(parts[2]), float(parts[3])))
            else:
                raise ValueError(f"unrecognized line {line!r}")
        except ValueError as e:
            raise FileFormatError(f"{source}:{lineno}: {e}") from None

    if frequency is None:
        raise FileFormatError(f"{source}: missing frequency_hz header")
    for index in (1, 2):
        if not atoms[index]:
            raise FileFormatError(f"{source}: layer {index} has no atoms")

    layers = []
    for index in (1, 2):
        positions = np.array(atoms[index], dtype=np.float64)
        rows, cols = shapes.get(index, (1, len(positions)))
        try:
            layers.append(MetaAtomLayer(positions, rows, cols, float(positions[0, 2])))
        except GeometryError as e:
            raise FileFormatError(f"{source}: layer {index}: {e}") from None
    try:
        return RisStack(CarrierSpec(frequency), layers[0], layers[1], near_field)
    except GeometryError as e:
        raise FileFormatError(f"{source}: {e}") from None


def read_geometry(path: str | Path) -> RisStack:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise FileFormatError(f"cannot read geometry file {path}: {e}") from None
    return parse_geometry(text, str(path))
