"""File formats: the raw-f32 ".mrif" container and 8-bit grayscale raster import.

The .mrif container is little-endian: 4-byte magic "MRIF", u32 grid size N,
u32 channel count, then N*N*channels float32 values row-major, one plane per
channel. Plane conventions used by this package:

* image file      — 1 channel (magnitude)
* complex stack   — 2 channels per complex plane (real, imag)
* coil maps       — 2 * n_coils channels
* k-space bundle  — 2 * n_coils channels followed by one 0/1 sampling-mask
                    channel (odd channel count marks the bundle)
"""

import struct
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DataIOError, ValidationError

__all__ = [
    "save_planes",
    "load_planes",
    "save_image",
    "load_image",
    "save_coils",
    "load_coils",
    "save_kspace_bundle",
    "load_kspace_bundle",
    "export_mask_png",
]

MAGIC = b"MRIF"
_HEADER = struct.Struct("<4sII")


def save_planes(path, planes: np.ndarray) -> None:
    """Write a (channels, N, N) float32 stack to a .mrif file."""
    planes = np.asarray(planes, dtype=np.float32)
    if planes.ndim == 2:
        planes = planes[None]
    if planes.ndim != 3 or planes.shape[1] != planes.shape[2]:
        raise ValidationError("bad-shape", f"planes must be (channels, N, N), got {planes.shape}")
    n = planes.shape[1]
    if n < 2 or n % 2 != 0:
        raise ValidationError("odd-size", f"grid size must be even and >= 2, got {n}")
    if not np.all(np.isfinite(planes)):
        raise ValidationError("non-finite", "planes contain NaN or Inf values")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, n, planes.shape[0]))
        fh.write(np.ascontiguousarray(planes, dtype="<f4").tobytes())


def load_planes(path) -> np.ndarray:
    """Read a .mrif file back as a (channels, N, N) float32 stack."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise DataIOError("missing-file", f"no such file: {path}") from None
    except OSError as exc:
        raise DataIOError("io-failure", f"cannot read {path}: {exc}") from exc
    if len(raw) < _HEADER.size:
        raise DataIOError("truncated", f"{path}: shorter than the 12-byte header")
    magic, n, channels = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise DataIOError("bad-magic", f"{path}: not a MRIF file")
    if channels < 1:
        raise DataIOError("malformed-file", f"{path}: channel count must be >= 1")
    if n < 2 or n % 2 != 0:
        raise DataIOError("odd-size", f"{path}: grid size must be even and >= 2, got {n}")
    expected = _HEADER.size + 4 * n * n * channels
    if len(raw) < expected:
        raise DataIOError("truncated", f"{path}: expected {expected} bytes, got {len(raw)}")
    if len(raw) > expected:
        raise DataIOError("malformed-file", f"{path}: {len(raw) - expected} trailing bytes")
    data = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size)
    return data.reshape(channels, n, n).copy()


def save_image(path, img) -> None:
    """Write the magnitude of an image as a single-channel .mrif file."""
    mag = np.abs(np.asarray(img, dtype=np.complex128))
    save_planes(path, mag[None].astype(np.float32))


def load_image(path) -> np.ndarray:
    """Load a ground-truth image from .mrif or an 8-bit grayscale raster.

    Returns a complex128 array with zero imaginary part. Raster pixel
    values are rescaled so 255 -> 1.0 and 0 -> 0.0; .mrif float values
    are taken as stored.
    """
    path = Path(path)
    if path.suffix.lower() == ".mrif":
        planes = load_planes(path)
        if planes.shape[0] != 1:
            raise DataIOError(
                "bad-channels", f"{path}: expected a 1-channel image, got {planes.shape[0]} channels"
            )
        return planes[0].astype(np.complex128)
    return _load_raster(path)


def _load_raster(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as im:
            if im.mode != "L":
                raise DataIOError("bad-mode", f"{path}: expected single-channel 8-bit grayscale, got mode {im.mode}")
            arr = np.asarray(im, dtype=np.float64)
    except FileNotFoundError:
        raise DataIOError("missing-file", f"no such file: {path}") from None
    except UnidentifiedImageError:
        raise DataIOError("malformed-file", f"{path}: not a recognized raster file") from None
    except OSError as exc:
        raise DataIOError("truncated", f"{path}: {exc}") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DataIOError("non-square", f"{path}: image must be square, got {arr.shape}")
    if arr.shape[0] % 2 != 0:
        raise DataIOError("odd-size", f"{path}: image size must be even, got {arr.shape[0]}")
    return (arr / 255.0).astype(np.complex128)


def _complex_to_planes(stack: np.ndarray) -> np.ndarray:
    planes = np.empty((2 * stack.shape[0], stack.shape[1], stack.shape[2]), dtype=np.float32)
    planes[0::2] = stack.real
    planes[1::2] = stack.imag
    return planes


def _planes_to_complex(planes: np.ndarray) -> np.ndarray:
    return planes[0::2].astype(np.float64) + 1j * planes[1::2].astype(np.float64)


def save_coils(path, maps: np.ndarray) -> None:
    """Write complex coil maps (n_coils, N, N) as interleaved real/imag planes."""
    maps = np.asarray(maps, dtype=np.complex128)
    if maps.ndim != 3:
        raise ValidationError("bad-shape", f"coil maps must be (n_coils, N, N), got {maps.shape}")
    save_planes(path, _complex_to_planes(maps))


def load_coils(path) -> np.ndarray:
    planes = load_planes(path)
    if planes.shape[0] % 2 != 0:
        raise DataIOError("bad-channels", f"{path}: coil file needs an even channel count")
    return _planes_to_complex(planes)


def save_kspace_bundle(path, grids: np.ndarray, mask: np.ndarray) -> None:
    """Write per-coil k-space grids plus the sampling mask as one .mrif file."""
    grids = np.asarray(grids, dtype=np.complex128)
    if grids.ndim != 3:
        raise ValidationError("bad-shape", f"k-space grids must be (n_coils, N, N), got {grids.shape}")
    mask = np.asarray(mask)
    if mask.shape != grids.shape[1:]:
        raise ValidationError("shape-mismatch", f"mask shape {mask.shape} does not match grids {grids.shape[1:]}")
    planes = np.concatenate(
        [_complex_to_planes(grids), mask.astype(np.float32)[None]], axis=0
    )
    save_planes(path, planes)


def load_kspace_bundle(path):
    planes = load_planes(path)
    if planes.shape[0] % 2 != 1 or planes.shape[0] < 3:
        raise DataIOError("bad-channels", f"{path}: k-space bundle needs 2*n_coils+1 channels")
    grids = _planes_to_complex(planes[:-1])
    mask = planes[-1] > 0.5
    return grids, mask


def export_mask_png(path, mask: np.ndarray) -> None:
    """Write a binary mask as an 8-bit raster, sampled points white."""
    mask = np.asarray(mask).astype(bool)
    img = Image.fromarray((mask * np.uint8(255)), mode="L")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    img.save(path)
