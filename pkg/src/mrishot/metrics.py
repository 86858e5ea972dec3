"""Image-quality scores: PSNR, SSIM, and artifact power.

All three compare magnitude images. Artifact power is the squared magnitude
difference normalized by the reference energy,
sum((|ref| - |test|)^2) / sum(|ref|^2) — the paper-reported values use an
unstated formula, so this standard definition is a documented convention.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate

from .errors import ValidationError

__all__ = ["MetricReport", "psnr", "ssim", "artifact_power", "evaluate"]

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _magnitudes(ref, test):
    ref = np.abs(np.asarray(ref, dtype=np.complex128))
    test = np.abs(np.asarray(test, dtype=np.complex128))
    if ref.shape != test.shape:
        raise ValidationError("shape-mismatch", f"shapes differ: {ref.shape} vs {test.shape}")
    return ref, test


def psnr(ref, test) -> float:
    """Peak signal-to-noise ratio in dB; +inf for identical inputs."""
    ref, test = _magnitudes(ref, test)
    peak = float(ref.max())
    if peak == 0.0:
        raise ValidationError("zero-reference", "PSNR undefined for an all-zero reference")
    mse = float(np.mean((ref - test) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak**2 / mse)


def _gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2.0
    x = np.arange(size) - half
    g = np.exp(-(x**2) / (2.0 * sigma**2))
    kernel = np.outer(g, g)
    return kernel / kernel.sum()


def ssim(ref, test, data_range: float | None = None) -> float:
    """Mean local structural similarity with an 11x11 Gaussian window.

    Both magnitude images are normalized by ``data_range`` (the reference
    maximum when not given), so passing an explicit range makes the score
    symmetric in its arguments.
    """
    ref, test = _magnitudes(ref, test)
    if data_range is None:
        data_range = float(ref.max())
    if data_range <= 0.0:
        raise ValidationError("zero-reference", "SSIM needs a positive normalization range")
    a = ref / data_range
    b = test / data_range

    c1 = SSIM_K1**2
    c2 = SSIM_K2**2
    kernel = _gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA)

    def smooth(img):
        return correlate(img, kernel, mode="reflect")

    mu_a = smooth(a)
    mu_b = smooth(b)
    var_a = smooth(a * a) - mu_a**2
    var_b = smooth(b * b) - mu_b**2
    cov = smooth(a * b) - mu_a * mu_b

    score = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / ((mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2))
    return float(score.mean())


def artifact_power(ref, test) -> float:
    """Normalized squared magnitude difference; 0 for identical inputs."""
    ref, test = _magnitudes(ref, test)
    energy = float(np.sum(ref**2))
    if energy == 0.0:
        raise ValidationError("zero-reference", "artifact power undefined for an all-zero reference")
    return float(np.sum((ref - test) ** 2)) / energy


@dataclass(frozen=True)
class MetricReport:
    psnr_db: float
    ssim: float
    artifact_power: float

    def csv_row(self) -> str:
        return f"{self.psnr_db},{self.ssim},{self.artifact_power}"

    @staticmethod
    def csv_header() -> str:
        return "psnr_db,ssim,artifact_power"


def evaluate(ref, test) -> MetricReport:
    """All three scores in one report."""
    return MetricReport(psnr_db=psnr(ref, test), ssim=ssim(ref, test), artifact_power=artifact_power(ref, test))
