"""Per-shot rigid transforms and the forward corruption model.

A rigid transform rotates the object counter-clockwise (as displayed, row 0
on top) about the pixel (N/2, N/2) and then shifts it by (tx, ty) pixels,
where +tx moves content toward higher column indices and +ty toward higher
row indices. Resampling is bilinear with zero fill outside the FOV, so
right-angle rotations and integer shifts are exact index permutations.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import map_coordinates

from .core import as_grid, fft2c
from .errors import ValidationError
from .phantom import CoilSensitivities
from .sense import KSpaceData
from .trajectory import ShotTrajectory

__all__ = ["RigidMotionSchedule", "apply_rigid", "forward_corrupt"]

MAX_ROTATION_DEG = 45.0  # schedule bound; beyond this the object leaves the FOV


@dataclass(frozen=True)
class RigidMotionSchedule:
    """Per-shot rigid transform parameters: (rotation degrees, tx, ty) rows."""

    params: np.ndarray = field(repr=False)  # (S, 3) float

    def __post_init__(self):
        params = np.ascontiguousarray(self.params, dtype=np.float64)
        if params.ndim != 2 or params.shape[1] != 3:
            raise ValidationError("bad-shape", f"schedule must be (S, 3), got {params.shape}")
        if params.shape[0] < 1:
            raise ValidationError("empty-schedule", "schedule needs at least one shot")
        if not np.all(np.isfinite(params)):
            raise ValidationError("non-finite", "schedule contains NaN or Inf values")
        if np.any(np.abs(params[:, 0]) > MAX_ROTATION_DEG):
            raise ValidationError(
                "rotation-bound", f"per-shot rotation must satisfy |theta| <= {MAX_ROTATION_DEG} degrees"
            )
        object.__setattr__(self, "params", params)

    @classmethod
    def identity(cls, n_shots: int) -> "RigidMotionSchedule":
        return cls(np.zeros((n_shots, 3)))

    @classmethod
    def from_rows(cls, rows) -> "RigidMotionSchedule":
        return cls(np.array([[r["theta_deg"], r["tx"], r["ty"]] for r in rows], dtype=np.float64))

    @property
    def n_shots(self) -> int:
        return self.params.shape[0]

    def to_rows(self) -> list[dict]:
        return [
            {"theta_deg": float(t), "tx": float(tx), "ty": float(ty)}
            for t, tx, ty in self.params
        ]


def _check_translation(n: int, tx: float, ty: float) -> None:
    bound = n / 4.0
    if abs(tx) > bound or abs(ty) > bound:
        raise ValidationError(
            "translation-bound", f"translations must satisfy |tx|, |ty| <= N/4 = {bound}, got ({tx}, {ty})"
        )


def apply_rigid(img, theta_deg: float, tx: float, ty: float) -> np.ndarray:
    """Resample an image under rotation about the grid center, then translation.

    Any rotation angle is accepted (right-angle rotations are needed as exact
    references); translations are limited to |tx|, |ty| <= N/4.
    """
    img = as_grid(img, "image")
    n = img.shape[0]
    for name, value in (("theta", theta_deg), ("tx", tx), ("ty", ty)):
        if not math.isfinite(value):
            raise ValidationError("non-finite", f"{name} is not finite")
    _check_translation(n, tx, ty)

    if theta_deg == 0.0 and tx == 0.0 and ty == 0.0:
        return img.copy()

    c = n / 2.0
    theta = math.radians(theta_deg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    rows_o, cols_o = np.meshgrid(np.arange(n, dtype=np.float64), np.arange(n, dtype=np.float64), indexing="ij")
    # Invert translate-after-rotate: undo the shift, rotate back by -theta.
    a = (cols_o - c) - tx
    b = (c - rows_o) + ty
    col_src = c + a * cos_t + b * sin_t
    row_src = c - (-a * sin_t + b * cos_t)
    coords = np.stack([row_src, col_src])
    # grid-constant: out-of-FOV neighbors contribute zeros to the bilinear blend
    out_re = map_coordinates(img.real, coords, order=1, mode="grid-constant", cval=0.0)
    out_im = map_coordinates(img.imag, coords, order=1, mode="grid-constant", cval=0.0)
    return out_re + 1j * out_im


def forward_corrupt(
    x,
    coils: CoilSensitivities,
    traj: ShotTrajectory,
    motion: RigidMotionSchedule,
) -> KSpaceData:
    """Simulate motion-corrupted multishot acquisition.

    For every shot the object is moved to its per-shot pose, weighted by each
    coil map, Fourier transformed, and the shot's k-space segment is kept;
    segments accumulate into full per-coil grids.
    """
    x = as_grid(x, "image")
    n = x.shape[0]
    if coils.n != n or traj.n != n:
        raise ValidationError(
            "shape-mismatch", f"image N={n}, coils N={coils.n}, trajectory N={traj.n} must agree"
        )
    if motion.n_shots != traj.n_shots:
        raise ValidationError(
            "shot-count-mismatch",
            f"schedule has {motion.n_shots} shots, trajectory has {traj.n_shots}",
        )

    grids = np.zeros((coils.n_coils, n, n), dtype=np.complex128)
    for s in range(traj.n_shots):
        theta, tx, ty = motion.params[s]
        moved = apply_rigid(x, theta, tx, ty)
        mask = traj.masks[s]
        for c in range(coils.n_coils):
            grids[c] += mask * fft2c(coils.maps[c] * moved)
    return KSpaceData(grids=grids, sampling_mask=traj.union_mask())
