"""Experiment orchestration: motion sampling, paired-sample generation, and
dataset export for the downstream corrector.

Datasets are bit-reproducible: the per-sample RNG stream is derived as
``seed XOR sample_index``, so workers can generate samples in any order, and
rotation draws are scale-coupled (a uniform draw in [-1, 1] multiplied by the
rotation bound), so the same seed produces geometrically identical motion at
different severity levels.
"""

import json
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import imageio
from .errors import DataIOError, ValidationError
from .metrics import MetricReport, evaluate
from .motion import RigidMotionSchedule, apply_rigid, forward_corrupt
from .phantom import CoilSensitivities, shepp_logan, simulate_coils
from .sense import KSpaceData, ReconConfig, cg_sense
from .trajectory import TrajectoryKind, make_trajectory

__all__ = [
    "ExperimentConfig",
    "ManifestEntry",
    "DatasetManifest",
    "GeneratedPair",
    "phantom_slices",
    "sample_motion",
    "generate_pair",
    "run_dataset",
    "load_manifest",
    "run_metrics",
    "run_reconstruct",
]

FORMAT_VERSION = 1
ROTATION_PRESETS_DEG = (0.0, 2.0, 5.0, 8.0, 10.0, 12.0, 14.0)
PHANTOM_SOURCE = "phantom"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that defines one dataset run, except the output location."""

    n: int = 64
    shots: int = 16
    trajectory: TrajectoryKind = TrajectoryKind.RANDOM
    max_rotation_deg: float = 5.0
    max_translation_px: float = 0.0
    n_coils: int = 4
    source: str = PHANTOM_SOURCE
    samples: int = 20
    repeats: int = 1
    train_frac: float = 0.7
    seed: int = 0
    recon: ReconConfig = field(default_factory=ReconConfig)

    def __post_init__(self):
        object.__setattr__(self, "trajectory", TrajectoryKind(self.trajectory))
        if self.n < 4 or self.n % 2 != 0:
            raise ValidationError("bad-size", f"grid size must be even and >= 4, got {self.n}")
        if self.shots < 2 or self.shots > 128 or self.shots & (self.shots - 1):
            raise ValidationError("bad-shot-count", f"shots must be a power of two in [2, 128], got {self.shots}")
        if not 0.0 <= self.max_rotation_deg <= 45.0:
            raise ValidationError(
                "rotation-bound", f"max rotation must be in [0, 45] degrees, got {self.max_rotation_deg}"
            )
        if self.max_rotation_deg not in ROTATION_PRESETS_DEG:
            warnings.warn(
                f"max rotation {self.max_rotation_deg} deg is not one of the standard presets "
                f"{ROTATION_PRESETS_DEG[1:]}",
                stacklevel=2,
            )
        if not 0.0 <= self.max_translation_px <= self.n / 4.0:
            raise ValidationError(
                "translation-bound", f"max translation must be in [0, N/4], got {self.max_translation_px}"
            )
        if self.n_coils < 1:
            raise ValidationError("no-coils", f"n_coils must be >= 1, got {self.n_coils}")
        if self.samples < 1:
            raise ValidationError("bad-config", f"samples must be >= 1, got {self.samples}")
        if self.repeats < 1:
            raise ValidationError("bad-config", f"repeats must be >= 1, got {self.repeats}")
        if not 0.0 < self.train_frac < 1.0:
            raise ValidationError("bad-config", f"train fraction must be in (0, 1), got {self.train_frac}")
        if self.seed < 0:
            raise ValidationError("bad-seed", f"seed must be non-negative, got {self.seed}")

    def snapshot(self) -> dict:
        out = asdict(self)
        out["trajectory"] = self.trajectory.value
        return out

    @classmethod
    def from_snapshot(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        recon = data.pop("recon", None)
        cfg_recon = ReconConfig(**recon) if recon else ReconConfig()
        return cls(recon=cfg_recon, **data)


def phantom_slices(n: int, count: int, seed: int) -> list[np.ndarray]:
    """Deterministic stack of phantom variants: the canonical phantom plus
    rigidly perturbed copies, all reproducible from the seed."""
    base = shepp_logan(n)
    rng = np.random.default_rng(seed)
    slices = [base]
    while len(slices) < count:
        theta = rng.uniform(-30.0, 30.0)
        shift = rng.uniform(-n / 8.0, n / 8.0, size=2)
        slices.append(apply_rigid(base, theta, shift[0], shift[1]))
    return slices[:count]


def sample_motion(cfg: ExperimentConfig, rng: np.random.Generator) -> RigidMotionSchedule:
    """Draw one per-shot motion realization; the first shot stays at identity
    to anchor the reference frame."""
    params = np.zeros((cfg.shots, 3))
    if cfg.shots > 1:
        params[1:, 0] = cfg.max_rotation_deg * rng.uniform(-1.0, 1.0, cfg.shots - 1)
        params[1:, 1] = cfg.max_translation_px * rng.uniform(-1.0, 1.0, cfg.shots - 1)
        params[1:, 2] = cfg.max_translation_px * rng.uniform(-1.0, 1.0, cfg.shots - 1)
    return RigidMotionSchedule(params)


class GeneratedPair(NamedTuple):
    clean: np.ndarray
    corrupted: np.ndarray
    schedule: RigidMotionSchedule
    recon_iterations: int


def generate_pair(x_clean: np.ndarray, cfg: ExperimentConfig, rng: np.random.Generator) -> GeneratedPair:
    """Corrupt a clean image with sampled inter-shot motion and reconstruct it
    without motion knowledge, yielding one supervised training pair."""
    coils = simulate_coils(cfg.n, cfg.n_coils)
    traj = make_trajectory(cfg.trajectory, cfg.n, cfg.shots, seed=cfg.seed)
    schedule = sample_motion(cfg, rng)
    kspace = forward_corrupt(x_clean, coils, traj, schedule)
    recon, report = cg_sense(kspace, coils, cfg.recon)
    return GeneratedPair(clean=x_clean, corrupted=recon, schedule=schedule, recon_iterations=report.iterations)


@dataclass(frozen=True)
class ManifestEntry:
    index: int
    slice_index: int
    split: str
    clean: str
    corrupt: str
    schedule: list
    metrics: dict

    def to_json(self) -> str:
        return json.dumps(
            {
                "index": self.index,
                "slice": self.slice_index,
                "split": self.split,
                "clean": self.clean,
                "corrupt": self.corrupt,
                "schedule": self.schedule,
                "metrics": self.metrics,
            },
            sort_keys=True,
            separators=(",", ":"),
        )


@dataclass(frozen=True)
class DatasetManifest:
    path: Path
    config: dict
    entries: list

    @property
    def root(self) -> Path:
        return self.path.parent


def _load_source_slices(cfg: ExperimentConfig) -> list[np.ndarray]:
    if cfg.source == PHANTOM_SOURCE:
        n_slices = max(1, cfg.samples // cfg.repeats)
        return phantom_slices(cfg.n, n_slices, cfg.seed)
    src = Path(cfg.source)
    if not src.is_dir():
        raise DataIOError("missing-source", f"source directory does not exist: {src}")
    files = sorted(p for p in src.iterdir() if p.suffix.lower() in (".mrif", ".png", ".pgm", ".bmp"))
    if not files:
        raise DataIOError("empty-source", f"no importable images in {src}")
    slices = []
    for p in files:
        img = imageio.load_image(p)
        if img.shape != (cfg.n, cfg.n):
            raise ValidationError("bad-size", f"{p}: expected {cfg.n}x{cfg.n}, got {img.shape}")
        slices.append(img)
    return slices


def run_dataset(cfg: ExperimentConfig, out_dir) -> DatasetManifest:
    """Generate the full paired dataset and write it under ``out_dir``.

    Layout: ``clean/sample_NNNN.mrif``, ``corrupt/sample_NNNN.mrif`` and a
    ``manifest.jsonl`` whose first line is a header with the format version
    and config snapshot. Paths in the manifest are relative to ``out_dir``,
    so two runs with the same config and seed are byte-identical trees.
    """
    slices = _load_source_slices(cfg)
    n_slices = len(slices)
    n_train = int(n_slices * cfg.train_frac)
    total = n_slices * cfg.repeats

    out = Path(out_dir)
    (out / "clean").mkdir(parents=True, exist_ok=True)
    (out / "corrupt").mkdir(parents=True, exist_ok=True)

    entries = []
    for slice_idx in range(n_slices):
        for rep in range(cfg.repeats):
            index = slice_idx * cfg.repeats + rep
            rng = np.random.default_rng(cfg.seed ^ index)
            pair = generate_pair(slices[slice_idx], cfg, rng)

            clean_rel = f"clean/sample_{index:04d}.mrif"
            corrupt_rel = f"corrupt/sample_{index:04d}.mrif"
            clean_mag = np.abs(pair.clean).astype(np.float32)
            corrupt_mag = np.abs(pair.corrupted).astype(np.float32)
            imageio.save_planes(out / clean_rel, clean_mag[None])
            imageio.save_planes(out / corrupt_rel, corrupt_mag[None])

            report = evaluate(clean_mag, corrupt_mag)
            entries.append(
                ManifestEntry(
                    index=index,
                    slice_index=slice_idx,
                    split="train" if slice_idx < n_train else "test",
                    clean=clean_rel,
                    corrupt=corrupt_rel,
                    schedule=pair.schedule.to_rows(),
                    metrics={
                        "psnr_db": report.psnr_db,
                        "ssim": report.ssim,
                        "artifact_power": report.artifact_power,
                    },
                )
            )

    manifest_path = out / "manifest.jsonl"
    header = json.dumps(
        {"format_version": FORMAT_VERSION, "config": cfg.snapshot(), "samples": total},
        sort_keys=True,
        separators=(",", ":"),
    )
    with open(manifest_path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for entry in entries:
            fh.write(entry.to_json() + "\n")

    return DatasetManifest(path=manifest_path, config=cfg.snapshot(), entries=entries)


def load_manifest(path, check_files: bool = True) -> DatasetManifest:
    """Parse a manifest and optionally verify every referenced file loads."""
    path = Path(path)
    if not path.is_file():
        raise DataIOError("missing-file", f"no such manifest: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise DataIOError("malformed-file", f"{path}: empty manifest")
    try:
        header = json.loads(lines[0])
        raw_entries = [json.loads(line) for line in lines[1:] if line.strip()]
    except json.JSONDecodeError as exc:
        raise DataIOError("malformed-file", f"{path}: invalid JSON ({exc})") from exc
    if header.get("format_version") != FORMAT_VERSION:
        raise DataIOError("bad-version", f"{path}: unsupported format version {header.get('format_version')}")

    entries = []
    for raw in raw_entries:
        entry = ManifestEntry(
            index=raw["index"],
            slice_index=raw["slice"],
            split=raw["split"],
            clean=raw["clean"],
            corrupt=raw["corrupt"],
            schedule=raw["schedule"],
            metrics=raw["metrics"],
        )
        RigidMotionSchedule.from_rows(entry.schedule)  # bounds check
        if check_files:
            imageio.load_image(path.parent / entry.clean)
            imageio.load_image(path.parent / entry.corrupt)
        entries.append(entry)
    return DatasetManifest(path=path, config=header.get("config", {}), entries=entries)


def run_metrics(pairs) -> str:
    """Score (reference, test) file pairs; returns CSV text with a header row.

    ``pairs`` is an iterable of (ref_path, test_path) tuples, or a manifest
    path whose clean/corrupt pairs are scored.
    """
    if isinstance(pairs, (str, Path)):
        manifest = load_manifest(pairs, check_files=False)
        root = manifest.root
        pairs = [(root / e.clean, root / e.corrupt) for e in manifest.entries]
    rows = [MetricReport.csv_header()]
    for ref_path, test_path in pairs:
        report = evaluate(imageio.load_image(ref_path), imageio.load_image(test_path))
        rows.append(report.csv_row())
    return "\n".join(rows) + "\n"


def run_reconstruct(kspace_path, coils_path, cfg: ReconConfig, out_path):
    """Reconstruct saved k-space with saved coil maps; writes the magnitude
    image and returns the convergence report."""
    grids, mask = imageio.load_kspace_bundle(kspace_path)
    maps = imageio.load_coils(coils_path)
    data = KSpaceData(grids=grids, sampling_mask=mask)
    recon, report = cg_sense(data, CoilSensitivities(maps), cfg)
    imageio.save_image(out_path, recon)
    return report
