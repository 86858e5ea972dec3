"""Shot-partitioning schemes: how the k-space grid is split across shots.

All four kinds produce a full-sampling partition: the per-shot masks are
pairwise disjoint and together cover every grid point exactly once.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

__all__ = ["TrajectoryKind", "ShotTrajectory", "make_trajectory", "segment_extract"]


class TrajectoryKind(str, enum.Enum):
    CARTESIAN_SEQUENTIAL = "cartesian-sequential"
    CARTESIAN_PARALLEL_1D = "cartesian-parallel-1d"
    CARTESIAN_PARALLEL_2D = "cartesian-parallel-2d"
    RANDOM = "random"


ROW_KINDS = (TrajectoryKind.CARTESIAN_SEQUENTIAL, TrajectoryKind.CARTESIAN_PARALLEL_1D)


@dataclass(frozen=True)
class ShotTrajectory:
    """Partition of an N x N k-space grid into per-shot boolean masks."""

    kind: TrajectoryKind
    masks: np.ndarray = field(repr=False)  # (S, N, N) bool
    seed: int = 0

    def __post_init__(self):
        masks = np.ascontiguousarray(self.masks, dtype=bool)
        if masks.ndim != 3 or masks.shape[1] != masks.shape[2]:
            raise ValidationError("bad-shape", f"masks must be (S, N, N), got {masks.shape}")
        counts = masks.sum(axis=0)
        if not np.all(counts == 1):
            raise ValidationError("not-a-partition", "shot masks must cover every grid point exactly once")
        object.__setattr__(self, "masks", masks)

    @property
    def n_shots(self) -> int:
        return self.masks.shape[0]

    @property
    def n(self) -> int:
        return self.masks.shape[1]

    def union_mask(self) -> np.ndarray:
        return self.masks.any(axis=0)


def _is_power_of_two(s: int) -> bool:
    return s >= 1 and (s & (s - 1)) == 0


def make_trajectory(kind, n: int, s: int, seed: int = 0) -> ShotTrajectory:
    """Build a shot partition of the given kind.

    Parameters
    ----------
    kind : TrajectoryKind or str
        One of the four supported schemes.
    n : int
        Grid size; even, >= 2.
    s : int
        Shot count; must be a power of two. Row-based kinds additionally
        require s <= n; point-based kinds require s <= n*n.
    seed : int
        Permutation seed, used by the random kind only.
    """
    kind = TrajectoryKind(kind)
    if n < 2 or n % 2 != 0:
        raise ValidationError("bad-size", f"grid size must be even and >= 2, got {n}")
    if not _is_power_of_two(s):
        raise ValidationError("bad-shot-count", f"shot count must be a power of two, got {s}")
    if kind in ROW_KINDS and s > n:
        raise ValidationError("bad-shot-count", f"{kind.value} needs s <= n, got s={s}, n={n}")
    if s > n * n:
        raise ValidationError("bad-shot-count", f"cannot split {n * n} points into {s} shots")
    if seed < 0:
        raise ValidationError("bad-seed", f"seed must be non-negative, got {seed}")

    assign = np.empty((n, n), dtype=np.int64)
    rows = np.arange(n)
    cols = np.arange(n)
    if kind is TrajectoryKind.CARTESIAN_SEQUENTIAL:
        # Contiguous blocks of phase-encode rows, row r in shot floor(r*s/n).
        assign[:] = (rows * s // n)[:, None]
    elif kind is TrajectoryKind.CARTESIAN_PARALLEL_1D:
        assign[:] = (rows % s)[:, None]
    elif kind is TrajectoryKind.CARTESIAN_PARALLEL_2D:
        root = math.isqrt(s)
        if root * root == s:
            assign[:] = (rows[:, None] * root + cols[None, :]) % s
        else:
            # Largest divisor of s not exceeding sqrt(s); s is a power of two.
            step = 1
            while step * 2 <= math.isqrt(s):
                step *= 2
            assign[:] = (rows[:, None] + cols[None, :] * step) % s
    else:  # random
        rng = np.random.default_rng(seed)
        order = rng.permutation(n * n)
        flat = np.empty(n * n, dtype=np.int64)
        for shot, chunk in enumerate(np.array_split(order, s)):
            flat[chunk] = shot
        assign = flat.reshape(n, n)

    masks = assign[None, :, :] == np.arange(s)[:, None, None]
    return ShotTrajectory(kind=kind, masks=masks, seed=seed)


def segment_extract(k: np.ndarray, traj: ShotTrajectory, s: int) -> np.ndarray:
    """Keep only the k-space samples belonging to shot ``s``, zeros elsewhere."""
    k = np.asarray(k)
    if k.shape != (traj.n, traj.n):
        raise ValidationError("shape-mismatch", f"k-space shape {k.shape} does not match trajectory N={traj.n}")
    if not 0 <= s < traj.n_shots:
        raise ValidationError("bad-shot-index", f"shot index {s} out of range [0, {traj.n_shots})")
    return k * traj.masks[s]
