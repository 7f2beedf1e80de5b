"""
Pydantic models for experiment configuration and command results
"""

from .requests import (
    CodeConfig,
    DetectorSection,
    EncodeConfig,
    ExperimentConfig,
    GeometryConfig,
    GeometryParams,
    OptimizerConfig,
    StoppingConfig,
    SweepConfig,
)
from .responses import (
    BerPointResponse,
    BerResponse,
    DistanceResponse,
    EncodeResponse,
    MatrixResponse,
    OptimizeResponse,
    ValidationResponse,
    ViolationModel,
)

__all__ = [
    "CodeConfig",
    "DetectorSection",
    "EncodeConfig",
    "ExperimentConfig",
    "GeometryConfig",
    "GeometryParams",
    "OptimizerConfig",
    "StoppingConfig",
    "SweepConfig",
    "BerPointResponse",
    "BerResponse",
    "DistanceResponse",
    "EncodeResponse",
    "MatrixResponse",
    "OptimizeResponse",
    "ValidationResponse",
    "ViolationModel",
]
