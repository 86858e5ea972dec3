"""Multishot MRI motion simulation, CG-SENSE reconstruction, and dataset export."""

__version__ = "0.1.0"

from .core import fft2c, ifft2c
from .errors import DataIOError, MriShotError, ValidationError
from .metrics import MetricReport, artifact_power, evaluate, psnr, ssim
from .motion import RigidMotionSchedule, apply_rigid, forward_corrupt
from .phantom import CoilSensitivities, shepp_logan, simulate_coils
from .pipeline import ExperimentConfig, generate_pair, run_dataset, sample_motion
from .sense import ConvergenceReport, KSpaceData, ReconConfig, adjoint, cg_sense, encode
from .trajectory import ShotTrajectory, TrajectoryKind, make_trajectory, segment_extract

__all__ = [
    "__version__",
    "fft2c",
    "ifft2c",
    "MriShotError",
    "ValidationError",
    "DataIOError",
    "MetricReport",
    "psnr",
    "ssim",
    "artifact_power",
    "evaluate",
    "RigidMotionSchedule",
    "apply_rigid",
    "forward_corrupt",
    "CoilSensitivities",
    "shepp_logan",
    "simulate_coils",
    "ExperimentConfig",
    "sample_motion",
    "generate_pair",
    "run_dataset",
    "KSpaceData",
    "ReconConfig",
    "ConvergenceReport",
    "encode",
    "adjoint",
    "cg_sense",
    "ShotTrajectory",
    "TrajectoryKind",
    "make_trajectory",
    "segment_extract",
]
