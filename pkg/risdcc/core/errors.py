"""
Exception hierarchy

Every error knows the CLI exit code it maps to, so the command layer can
translate failures in a single place.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from risdcc.core.geometry import ValidationReport


class RisDccError(Exception):
    """Base class for all toolkit errors"""

    exit_code = 1


class ConfigError(RisDccError):
    """Malformed or inconsistent experiment configuration"""

    exit_code = 2


class ConstraintViolation(RisDccError):
    """Geometry breaches a physical constraint"""

    exit_code = 3

    def __init__(self, message: str, report: ValidationReport | None = None):
        super().__init__(message)
        self.report = report


class InfeasibleSpace(RisDccError):
    """Optimizer bounds admit no valid geometry"""

    exit_code = 4


class GeometryError(RisDccError):
    """Structurally malformed layer or stack"""


class DegenerateGeometry(GeometryError):
    """Coincident points or non-positive propagation distance"""


class FileFormatError(RisDccError):
    """Unparseable geometry or matrix file"""


class DimensionMismatch(RisDccError):
    """Vector or matrix dimensions do not agree"""


class SearchSpaceTooLarge(RisDccError):
    """Exhaustive enumeration exceeds its bound"""


class StateSpaceTooLarge(RisDccError):
    """Trellis state count exceeds its bound"""


class UnknownVariant(RisDccError):
    """Unrecognized trellis variant"""


class ZeroDistance(RisDccError):
    """Two codewords coincide"""


class SymbolOutOfRange(RisDccError):
    """Dataword symbol outside the constellation alphabet"""


class DetectorError(RisDccError):
    """Detector precondition not met"""


class NumericalSingularity(DetectorError):
    """Linear system too ill-conditioned to solve"""


class RankDeficient(DetectorError):
    """Generator matrix lacks full column rank"""
