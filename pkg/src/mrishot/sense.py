"""Sensitivity encoding: the forward operator, its adjoint, and the CG solver.

The encoding operator maps an image to per-coil sampled k-space:
coil-weight, centered FFT, then sampling mask. Reconstruction solves the
least-squares problem on the normal equations with conjugate gradients.
The solver knows nothing about motion; feeding it motion-corrupted data
yields the artifact-laden image that downstream correction trains on.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import as_grid, fft2c, ifft2c
from .errors import ValidationError
from .phantom import CoilSensitivities

__all__ = ["KSpaceData", "ReconConfig", "ConvergenceReport", "encode", "adjoint", "cg_sense"]

# Pixels where the summed squared sensitivity is below this are left
# uncorrected in the initial estimate instead of being divided by ~0.
INTENSITY_FLOOR = 1e-6


@dataclass(frozen=True)
class KSpaceData:
    """Per-coil k-space grids plus the sampling mask that produced them."""

    grids: np.ndarray = field(repr=False)  # (n_coils, N, N) complex
    sampling_mask: np.ndarray = field(repr=False)  # (N, N) bool

    def __post_init__(self):
        grids = np.ascontiguousarray(self.grids, dtype=np.complex128)
        if grids.ndim != 3 or grids.shape[1] != grids.shape[2]:
            raise ValidationError("bad-shape", f"grids must be (n_coils, N, N), got {grids.shape}")
        if not np.all(np.isfinite(grids.view(np.float64))):
            raise ValidationError("non-finite", "k-space grids contain NaN or Inf values")
        mask = np.ascontiguousarray(self.sampling_mask, dtype=bool)
        if mask.shape != grids.shape[1:]:
            raise ValidationError("shape-mismatch", f"mask shape {mask.shape} does not match grids")
        if np.any(grids[:, ~mask] != 0):
            raise ValidationError("unsampled-data", "grids must be zero outside the sampling mask")
        object.__setattr__(self, "grids", grids)
        object.__setattr__(self, "sampling_mask", mask)

    @property
    def n_coils(self) -> int:
        return self.grids.shape[0]

    @property
    def n(self) -> int:
        return self.grids.shape[1]

    @property
    def n_k(self) -> int:
        """Number of sampled k-space positions per coil."""
        return int(self.sampling_mask.sum())


@dataclass(frozen=True)
class ReconConfig:
    max_iters: int = 50
    tol: float = 1e-8
    precondition: bool = True

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValidationError("bad-config", f"max_iters must be >= 1, got {self.max_iters}")
        if not 0.0 < self.tol < 1.0:
            raise ValidationError("bad-config", f"tol must be in (0, 1), got {self.tol}")


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-iteration convergence log; index 0 is the starting point.

    ``residuals`` holds relative data-space residuals ||Ex - y|| / ||y||,
    the quantity CG drives down monotonically (in exact arithmetic) on the
    normal equations. ``normal_residuals`` holds the relative
    normal-equation residuals used by the stopping rule; those may
    oscillate between iterations.
    """

    residuals: tuple
    normal_residuals: tuple
    converged: bool

    @property
    def iterations(self) -> int:
        return len(self.residuals) - 1

    def to_log(self) -> str:
        return "\n".join(f"{i},{r:.12e}" for i, r in enumerate(self.residuals))


def _check_coils(coils: CoilSensitivities, n: int) -> None:
    if coils.n != n:
        raise ValidationError("shape-mismatch", f"coil maps are N={coils.n}, data is N={n}")


def encode(x, coils: CoilSensitivities, mask) -> KSpaceData:
    """Forward operator: per coil, mask * fft2c(coil * x)."""
    x = as_grid(x, "image")
    _check_coils(coils, x.shape[0])
    mask = np.ascontiguousarray(mask, dtype=bool)
    if mask.shape != x.shape:
        raise ValidationError("shape-mismatch", f"mask shape {mask.shape} does not match image {x.shape}")
    grids = np.stack([mask * fft2c(coils.maps[c] * x) for c in range(coils.n_coils)])
    return KSpaceData(grids=grids, sampling_mask=mask)


def adjoint(y: KSpaceData, coils: CoilSensitivities) -> np.ndarray:
    """Adjoint operator: sum over coils of conj(coil) * ifft2c(mask * data)."""
    _check_coils(coils, y.n)
    if coils.n_coils != y.n_coils:
        raise ValidationError("shape-mismatch", f"{coils.n_coils} coil maps for {y.n_coils} data coils")
    out = np.zeros((y.n, y.n), dtype=np.complex128)
    for c in range(y.n_coils):
        out += np.conj(coils.maps[c]) * ifft2c(y.sampling_mask * y.grids[c])
    return out


def _forward_op(x: np.ndarray, coils: CoilSensitivities, mask: np.ndarray) -> np.ndarray:
    """Apply the encoding operator without re-validating intermediates."""
    return np.stack([mask * fft2c(coils.maps[c] * x) for c in range(coils.n_coils)])


def _normal_op(x: np.ndarray, coils: CoilSensitivities, mask: np.ndarray) -> np.ndarray:
    """Apply adjoint(encode(x)) without re-validating intermediates."""
    out = np.zeros_like(x)
    for c in range(coils.n_coils):
        k = mask * fft2c(coils.maps[c] * x)
        out += np.conj(coils.maps[c]) * ifft2c(k)
    return out


def cg_sense(y: KSpaceData, coils: CoilSensitivities, cfg: ReconConfig = ReconConfig()):
    """Reconstruct the least-squares image from sampled multi-coil k-space.

    Runs conjugate gradients on the normal equations, stopping once the
    relative residual drops to ``cfg.tol`` or ``cfg.max_iters`` is reached.
    Non-convergence is reported, not raised.

    Returns
    -------
    (np.ndarray, ConvergenceReport)
        The reconstructed complex image and the per-iteration residual log.
    """
    _check_coils(coils, y.n)
    if coils.n_coils != y.n_coils:
        raise ValidationError("shape-mismatch", f"{coils.n_coils} coil maps for {y.n_coils} data coils")

    mask = y.sampling_mask
    b = adjoint(y, coils)
    b_norm = float(np.linalg.norm(b))
    y_norm = float(np.linalg.norm(y.grids))
    if b_norm == 0.0:
        start = 1.0 if y_norm > 0.0 else 0.0
        return np.zeros_like(b), ConvergenceReport(
            residuals=(start,), normal_residuals=(start,), converged=True
        )

    if cfg.precondition:
        weight = np.sum(np.abs(coils.maps) ** 2, axis=0)
        x = b / np.maximum(weight, INTENSITY_FLOOR)
    else:
        x = np.zeros_like(b)

    def data_residual(img):
        return float(np.linalg.norm(_forward_op(img, coils, mask) - y.grids)) / y_norm

    r = b - _normal_op(x, coils, mask)
    p = r.copy()
    rs = float(np.real(np.vdot(r, r)))
    residuals = [data_residual(x)]
    normal_residuals = [float(np.sqrt(rs)) / b_norm]
    converged = normal_residuals[-1] <= cfg.tol

    for _ in range(cfg.max_iters):
        if converged:
            break
        q = _normal_op(p, coils, mask)
        pq = float(np.real(np.vdot(p, q)))
        if pq <= 0.0:
            # Normal operator is positive semidefinite; a vanishing curvature
            # means p is in its null space and CG cannot progress.
            break
        alpha = rs / pq
        x = x + alpha * p
        r = r - alpha * q
        rs_new = float(np.real(np.vdot(r, r)))
        residuals.append(data_residual(x))
        normal_residuals.append(float(np.sqrt(rs_new)) / b_norm)
        converged = normal_residuals[-1] <= cfg.tol
        p = r + (rs_new / rs) * p
        rs = rs_new

    return x, ConvergenceReport(
        residuals=tuple(residuals), normal_residuals=tuple(normal_residuals), converged=converged
    )
