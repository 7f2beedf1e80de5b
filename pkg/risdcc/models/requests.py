"""
Experiment configuration models
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Preset = Literal["repetition_42", "systematic_42", "evenly_spaced_74", "evenly_spaced", "file"]
CodeType = Literal["uncoded", "block", "trellis", "hamming", "conv", "concatenated"]

_PRESET_PARAMS = {
    "repetition_42": ("a", "h", "dz"),
    "systematic_42": ("d", "dz"),
    "evenly_spaced_74": ("pitch", "dz"),
    "evenly_spaced": ("pitch", "dz"),
    "file": (),
}


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GeometryParams(_Section):
    """Preset dimensions, in the geometry's units"""

    a: float | None = Field(None, gt=0, description="Layer-1 atom spacing (repetition)")
    h: float | None = Field(None, gt=0, description="Layer-2 row offset (repetition)")
    d: float | None = Field(None, gt=0, description="Layer-2 pitch (systematic)")
    pitch: float | None = Field(None, gt=0, description="Common pitch (evenly spaced)")
    dz: float | None = Field(None, gt=0, description="Layer separation")


class GeometryConfig(_Section):
    """Which stack to build"""

    preset: Preset
    frequency_hz: float = Field(25e9, gt=0)
    units: Literal["wavelength", "m"] = "wavelength"
    params: GeometryParams = GeometryParams()
    file: str | None = None
    # presets always enforce the 10-wavelength minimum; files may opt out
    allow_near_field: bool = False
    n_in: int | None = Field(None, gt=0, description="Layer-1 atoms (evenly_spaced)")
    n_out: int | None = Field(None, gt=0, description="Layer-2 atoms (evenly_spaced)")

    @model_validator(mode="after")
    def check_preset_inputs(self):
        if self.preset == "file":
            if not self.file:
                raise ValueError("preset 'file' requires geometry.file")
            return self
        missing = [p for p in _PRESET_PARAMS[self.preset] if getattr(self.params, p) is None]
        if missing:
            raise ValueError(f"preset {self.preset!r} requires geometry.params.{', geometry.params.'.join(missing)}")
        return self


class CodeConfig(_Section):
    type: CodeType = "block"
    normalization: Literal["unit_frobenius", "raw"] = "unit_frobenius"
    insertion_loss_db: float = Field(0.0, ge=0)
    variant: Literal["after_memory", "ahead_memory", "extra_atoms"] | None = None
    k: int | None = Field(None, gt=0)
    n: int | None = Field(None, gt=0)
    mu: int = Field(1, ge=1)
    frames_per_sequence: int = Field(32, gt=0)
    decoding: Literal["hard", "soft"] = "hard"
    message_bits: int = Field(128, gt=0)
    symbols_per_frame: int = Field(1, gt=0)

    @model_validator(mode="after")
    def check_trellis(self):
        if self.type == "trellis" and self.variant is None:
            raise ValueError("code.variant is required for trellis codes")
        return self


class DetectorSection(_Section):
    kind: Literal["ml", "mmse", "reducer"] = "ml"


class SweepConfig(_Section):
    """Eb/N0 points, either as a range or listed"""

    start_db: float | None = None
    stop_db: float | None = None
    step_db: float | None = Field(None, gt=0)
    points: list[float] | None = None

    @model_validator(mode="after")
    def check_range(self):
        if self.points is not None:
            if not self.points:
                raise ValueError("sweep.points must not be empty")
            return self
        if self.start_db is None or self.stop_db is None or self.step_db is None:
            raise ValueError("sweep needs start_db, stop_db and step_db, or points")
        if self.stop_db < self.start_db:
            raise ValueError(f"sweep.stop_db {self.stop_db} is below start_db {self.start_db}")
        return self


class StoppingConfig(_Section):
    target_errors: int = Field(100, gt=0)
    max_bits: int = Field(10_000_000, gt=0)
    frames_per_batch: int = Field(2000, gt=0)


class OptimizerConfig(_Section):
    method: Literal["multistart_direct_search", "grid"] = "multistart_direct_search"
    budget: int = Field(200, ge=1)
    restarts: int = Field(8, ge=1)
    free: list[str] = ["separation"]
    z_max: float | None = Field(None, gt=0)
    aperture: float | None = Field(None, gt=0)
    trace_output: str | None = None

    @field_validator("free")
    @classmethod
    def validate_free(cls, v):
        allowed = ("separation", "layer1.x", "layer1.y", "layer2.x", "layer2.y")
        bad = [p for p in v if p not in allowed]
        if bad or not v:
            raise ValueError(f"free parameters must be a non-empty subset of: {', '.join(allowed)}")
        return v


class EncodeConfig(_Section):
    datawords: list[list[int]] = []


class ExperimentConfig(_Section):
    """One experiment file, after command-line overrides"""

    seed: int = Field(0, ge=0)
    output: str | None = None
    label: str | None = None
    modulation: Literal["BPSK", "QPSK", "QAM16", "PSK8"] = "BPSK"
    geometry: GeometryConfig | None = None
    code: CodeConfig = CodeConfig()
    detector: DetectorSection = DetectorSection()
    sweep: SweepConfig | None = None
    stopping: StoppingConfig = StoppingConfig()
    optimizer: OptimizerConfig = OptimizerConfig()
    encode: EncodeConfig = EncodeConfig()

    @field_validator("label")
    @classmethod
    def validate_label(cls, v):
        if v is not None and (not v.strip() or "," in v):
            raise ValueError("label must be non-empty and contain no commas")
        return v.strip() if v else v

    @model_validator(mode="after")
    def check_combination(self):
        if self.code.type in ("block", "trellis", "concatenated") and self.geometry is None:
            raise ValueError(f"code type {self.code.type!r} requires a [geometry] section")
        if self.code.type in ("hamming", "conv") and self.modulation != "BPSK":
            raise ValueError(f"the {self.code.type} baseline runs on BPSK, got modulation {self.modulation}")
        return self
