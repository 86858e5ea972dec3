"""Motion-free ground-truth sources: analytic head phantom and simulated coil maps.

Everything here is deterministic — same inputs give bit-identical outputs.
Pixel (row, col) maps to phantom coordinates x = (col - N/2)/(N/2),
y = (N/2 - row)/(N/2), so the pixel at (N/2, N/2) sits exactly at the
origin, consistent with the centered FFT convention in :mod:`mrishot.core`.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

__all__ = ["SHEPP_LOGAN_ELLIPSES", "shepp_logan", "CoilSensitivities", "simulate_coils"]

# Modified (Toft) Shepp-Logan ellipse table; columns are
# (additive intensity, semi-axis a, semi-axis b, center x, center y, tilt degrees).
# Summed intensities stay within [0, 1] over the whole head.
SHEPP_LOGAN_ELLIPSES = (
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
)


def _pixel_grid(n: int):
    """Phantom-space coordinates of every pixel center, row 0 at the top."""
    half = n / 2.0
    cols = (np.arange(n) - half) / half
    rows = (half - np.arange(n)) / half
    return np.meshgrid(cols, rows)  # x, y with shape (n, n)


def shepp_logan(n: int) -> np.ndarray:
    """Generate the 10-ellipse Shepp-Logan phantom as a complex image.

    Parameters
    ----------
    n : int
        Grid size; must be even and at least 16.

    Returns
    -------
    np.ndarray
        (n, n) complex128 array, real-valued with intensities in [0, 1].
    """
    if n < 16:
        raise ValidationError("too-small", f"phantom size must be >= 16, got {n}")
    if n % 2 != 0:
        raise ValidationError("odd-size", f"phantom size must be even, got {n}")

    x, y = _pixel_grid(n)
    img = np.zeros((n, n), dtype=np.float64)
    for value, a, b, x0, y0, phi_deg in SHEPP_LOGAN_ELLIPSES:
        phi = np.deg2rad(phi_deg)
        xr = (x - x0) * np.cos(phi) + (y - y0) * np.sin(phi)
        yr = -(x - x0) * np.sin(phi) + (y - y0) * np.cos(phi)
        img[(xr / a) ** 2 + (yr / b) ** 2 <= 1.0] += value
    # summed intensities are in [0, 1] analytically; clamp float cancellation dust
    np.clip(img, 0.0, 1.0, out=img)
    return img.astype(np.complex128)


@dataclass(frozen=True)
class CoilSensitivities:
    """Stack of complex receiver-coil sensitivity maps, shape (n_coils, N, N)."""

    maps: np.ndarray = field(repr=False)

    def __post_init__(self):
        maps = np.ascontiguousarray(self.maps, dtype=np.complex128)
        if maps.ndim != 3 or maps.shape[1] != maps.shape[2]:
            raise ValidationError("bad-shape", f"coil maps must be (n_coils, N, N), got {maps.shape}")
        if maps.shape[0] < 1:
            raise ValidationError("no-coils", "at least one coil map required")
        if not np.all(np.isfinite(maps.view(np.float64))):
            raise ValidationError("non-finite", "coil maps contain NaN or Inf values")
        rss = np.sqrt(np.sum(np.abs(maps) ** 2, axis=0))
        if np.any(rss <= 0):
            raise ValidationError("zero-sensitivity", "root-sum-of-squares must be positive everywhere")
        object.__setattr__(self, "maps", maps)

    @property
    def n_coils(self) -> int:
        return self.maps.shape[0]

    @property
    def n(self) -> int:
        return self.maps.shape[1]

    def rss(self) -> np.ndarray:
        return np.sqrt(np.sum(np.abs(self.maps) ** 2, axis=0))


# Coil geometry: centers equally spaced on a ring of radius 0.55*N around the
# FOV center, Gaussian falloff with sigma = 0.4*N, plus a gentle linear phase
# ramp oriented toward each coil.
COIL_RING_RADIUS = 0.55
COIL_SIGMA = 0.4
COIL_PHASE_SLOPE = 0.5 * np.pi  # radians of phase across the full FOV


def simulate_coils(n: int, n_coils: int) -> CoilSensitivities:
    """Analytic Gaussian coil maps, normalized so the pixelwise RSS is 1.

    Parameters
    ----------
    n : int
        Grid size; even, >= 2.
    n_coils : int
        Number of receiver coils, >= 1.
    """
    if n < 2 or n % 2 != 0:
        raise ValidationError("bad-size", f"grid size must be even and >= 2, got {n}")
    if n_coils < 1:
        raise ValidationError("no-coils", f"n_coils must be >= 1, got {n_coils}")

    center = n / 2.0
    rows = np.arange(n)[:, None] - center
    cols = np.arange(n)[None, :] - center
    sigma = COIL_SIGMA * n
    radius = COIL_RING_RADIUS * n

    maps = np.empty((n_coils, n, n), dtype=np.complex128)
    for k in range(n_coils):
        angle = 2.0 * np.pi * k / n_coils
        dr = rows - radius * np.sin(angle)
        dc = cols - radius * np.cos(angle)
        magnitude = np.exp(-(dr**2 + dc**2) / (2.0 * sigma**2))
        phase = (COIL_PHASE_SLOPE / n) * (np.cos(angle) * cols + np.sin(angle) * rows)
        maps[k] = magnitude * np.exp(1j * phase)

    rss = np.sqrt(np.sum(np.abs(maps) ** 2, axis=0))
    maps /= rss
    return CoilSensitivities(maps)
