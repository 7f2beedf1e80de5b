"""
Command result summaries
"""

from pydantic import BaseModel


class ViolationModel(BaseModel):
    constraint: str
    detail: str
    value: float


class ValidationResponse(BaseModel):
    """Outcome of the validate command"""

    ok: bool
    geometry_digest: str
    input_dim: int
    output_dim: int
    separation_wavelengths: float
    encoding_latency_s: float
    violations: list[ViolationModel] = []


class MatrixResponse(BaseModel):
    rows: int
    cols: int
    normalization: str
    frobenius_norm_sq: float
    distinct_entries: int
    digest: str


class DistanceResponse(BaseModel):
    n_codewords: int
    pairs: int
    d_min: float
    d_max: float
    argmin_pair: tuple[str, str]
    estimated: bool = False


class EncodeResponse(BaseModel):
    scheme: str
    datawords: int
    codeword_length: int


class BerPointResponse(BaseModel):
    eb_n0_db: float
    frames: int
    bit_errors: int
    ber: float
    ci95: float


class BerResponse(BaseModel):
    scheme: str
    detector: str
    modulation: str
    seed: int
    points: list[BerPointResponse]
    duration_seconds: float | None = None
    memory_mb: float | None = None


class OptimizeResponse(BaseModel):
    method: str
    best_d_min: float
    evaluations: int
    seed: int
    geometry_digest: str
    duration_seconds: float | None = None
