"""Complex-image / k-space value conventions and centered Fourier transforms.

Images and k-space grids are square, even-sized, complex128 numpy arrays.
The DC component of a k-space grid lives at index (N/2, N/2) and all
transforms are unitary (norm="ortho"), so ``fft2c``/``ifft2c`` are exact
adjoints of each other and energy is preserved.
"""

import numpy as np

from .errors import ValidationError

__all__ = [
    "as_grid",
    "fft2c",
    "ifft2c",
    "add",
    "sub",
    "scale",
    "hadamard",
    "conj_hadamard",
    "inner_product",
    "l2_norm",
]


def as_grid(data, name: str = "image") -> np.ndarray:
    """Validate and coerce to a square, even-sized, finite complex128 array.

    Raises
    ------
    ValidationError
        If the array is not 2-D square with even N >= 2, or contains
        NaN/Inf values.
    """
    arr = np.asarray(data)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError("non-square", f"{name} must be a square 2-D array, got shape {arr.shape}")
    n = arr.shape[0]
    if n < 2:
        raise ValidationError("too-small", f"{name} size must be >= 2, got {n}")
    if n % 2 != 0:
        raise ValidationError("odd-size", f"{name} size must be even, got {n}")
    arr = np.ascontiguousarray(arr, dtype=np.complex128)
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValidationError("non-finite", f"{name} contains NaN or Inf values")
    return arr


def fft2c(img) -> np.ndarray:
    """Centered, unitary 2-D DFT: image -> k-space with DC at (N/2, N/2)."""
    img = as_grid(img, "image")
    return np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(img), norm="ortho"))


def ifft2c(k) -> np.ndarray:
    """Inverse of :func:`fft2c`: k-space -> image."""
    k = as_grid(k, "k-space")
    return np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(k), norm="ortho"))


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValidationError("shape-mismatch", f"shapes differ: {a.shape} vs {b.shape}")


def add(a, b) -> np.ndarray:
    a, b = np.asarray(a), np.asarray(b)
    _check_same_shape(a, b)
    return a + b


def sub(a, b) -> np.ndarray:
    a, b = np.asarray(a), np.asarray(b)
    _check_same_shape(a, b)
    return a - b


def scale(a, factor: complex) -> np.ndarray:
    return np.asarray(a) * factor


def hadamard(a, b) -> np.ndarray:
    """Elementwise product a * b."""
    a, b = np.asarray(a), np.asarray(b)
    _check_same_shape(a, b)
    return a * b


def conj_hadamard(a, b) -> np.ndarray:
    """Elementwise product conj(a) * b."""
    a, b = np.asarray(a), np.asarray(b)
    _check_same_shape(a, b)
    return np.conj(a) * b


def inner_product(a, b) -> complex:
    """Complex inner product <a, b> with the first argument conjugated."""
    a, b = np.asarray(a), np.asarray(b)
    _check_same_shape(a, b)
    return complex(np.vdot(a, b))


def l2_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a)))
