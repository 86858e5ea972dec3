"""Request/response models for the HTTP service.

Endpoints exchange JSON only; image and k-space payloads stay on disk and
are referenced by path, as the service and its clients share a filesystem.
"""

from pydantic import BaseModel, Field

from ..trajectory import TrajectoryKind


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorPayload(BaseModel):
    kind: str  # "validation" or "io"
    code: str
    message: str


class PhantomRequest(BaseModel):
    n: int = 64
    out_path: str
    png: bool = False


class PhantomResponse(BaseModel):
    path: str
    n: int


class CoilsRequest(BaseModel):
    n: int = 64
    n_coils: int = 4
    out_path: str


class CoilsResponse(BaseModel):
    path: str
    n_coils: int


class SimulateRequest(BaseModel):
    clean_path: str | None = None  # default: generate a phantom of size n
    n: int = 64
    shots: int = 8
    trajectory: TrajectoryKind = TrajectoryKind.RANDOM
    max_rotation_deg: float = 5.0
    max_translation_px: float = 0.0
    n_coils: int = 4
    seed: int = 0
    out_dir: str


class SimulateResponse(BaseModel):
    kspace_path: str
    coils_path: str
    clean_path: str
    schedule: list[dict]
    sampled_positions: int


class ReconstructRequest(BaseModel):
    kspace_path: str
    coils_path: str
    out_path: str
    max_iters: int = 50
    tol: float = Field(default=1e-8, gt=0, lt=1)
    precondition: bool = True


class ReconstructResponse(BaseModel):
    path: str
    iterations: int
    converged: bool
    residuals: list[float]


class MetricsRequest(BaseModel):
    ref_path: str
    test_path: str


class MetricsResponse(BaseModel):
    psnr_db: float | None  # None when the images are identical
    psnr_infinite: bool = False
    ssim: float
    artifact_power: float


class ManifestMetricsRequest(BaseModel):
    manifest_path: str


class ManifestMetricsResponse(BaseModel):
    csv: str
    rows: int


class DatasetRequest(BaseModel):
    n: int = 64
    shots: int = 16
    trajectory: TrajectoryKind = TrajectoryKind.RANDOM
    max_rotation_deg: float = 5.0
    max_translation_px: float = 0.0
    n_coils: int = 4
    source: str = "phantom"
    samples: int = 20
    repeats: int = 1
    train_frac: float = 0.7
    seed: int
    out_dir: str


class DatasetResponse(BaseModel):
    manifest_path: str
    samples: int
    train_samples: int
    test_samples: int


class MasksRequest(BaseModel):
    kind: TrajectoryKind
    n: int = 64
    shots: int = 8
    seed: int = 0
    out_dir: str


class MasksResponse(BaseModel):
    paths: list[str]
