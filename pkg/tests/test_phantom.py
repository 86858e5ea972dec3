import math

import numpy as np
import pytest

from mrishot.errors import ValidationError
from mrishot.phantom import CoilSensitivities, shepp_logan, simulate_coils

# Canonical modified Shepp-Logan ellipse table, kept separately here so the
# point-evaluation oracle below does not share code with the implementation.
CANONICAL_ELLIPSES = (
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


def ellipse_sum_at(x: float, y: float) -> float:
    """Oracle: evaluate the ten canonical ellipse equations at one point."""
    total = 0.0
    for value, a, b, x0, y0, phi_deg in CANONICAL_ELLIPSES:
        phi = math.radians(phi_deg)
        xr = (x - x0) * math.cos(phi) + (y - y0) * math.sin(phi)
        yr = -(x - x0) * math.sin(phi) + (y - y0) * math.cos(phi)
        if (xr / a) ** 2 + (yr / b) ** 2 <= 1.0:
            total += value
    return total


def pixel_to_xy(row: int, col: int, n: int):
    half = n / 2.0
    return (col - half) / half, (half - row) / half


class TestSheppLogan:
    def test_range_and_corners(self):
        img = shepp_logan(64)
        assert np.all(img.imag == 0)
        vals = img.real
        assert vals.min() >= 0.0 and vals.max() <= 1.0
        for corner in [(0, 0), (0, 63), (63, 0), (63, 63)]:
            assert vals[corner] == 0.0

    def test_center_value_matches_ellipse_oracle(self):
        img = shepp_logan(64)
        x, y = pixel_to_xy(32, 32, 64)
        assert (x, y) == (0.0, 0.0)
        expected = ellipse_sum_at(0.0, 0.0)
        assert abs(img[32, 32].real - expected) < 1e-12

    def test_mirror_symmetry_off_tilted_ellipses(self):
        # Pixels at x = -0.125 and +0.125 inside the upper feature ellipse;
        # both sit outside the two tilted ellipses, so the canonical set is
        # mirror-symmetric there.
        n = 64
        img = shepp_logan(n)
        row, col_l, col_r = 21, 28, 36
        xl, yl = pixel_to_xy(row, col_l, n)
        xr, yr = pixel_to_xy(row, col_r, n)
        assert xl == -xr and yl == yr
        assert abs(img[row, col_l].real - ellipse_sum_at(xl, yl)) < 1e-12
        assert abs(img[row, col_r].real - ellipse_sum_at(xr, yr)) < 1e-12
        assert abs(img[row, col_l].real - img[row, col_r].real) < 1e-12

    def test_deterministic(self):
        a = shepp_logan(32)
        b = shepp_logan(32)
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("n", [15, 14, 8, 0])
    def test_rejects_bad_sizes(self, n):
        with pytest.raises(ValidationError):
            shepp_logan(n)


def gaussian_coil_magnitude(k, n_coils, n):
    """Oracle: the stated coil model evaluated from its closed form."""
    center = n / 2.0
    sigma = 0.4 * n
    radius = 0.55 * n
    rows = np.arange(n)[:, None] - center
    cols = np.arange(n)[None, :] - center
    angle = 2 * math.pi * k / n_coils
    dr = rows - radius * math.sin(angle)
    dc = cols - radius * math.cos(angle)
    return np.exp(-(dr**2 + dc**2) / (2 * sigma**2))


class TestSimulateCoils:
    def test_single_coil_has_unit_magnitude(self):
        coils = simulate_coils(16, 1)
        np.testing.assert_allclose(np.abs(coils.maps[0]), 1.0, atol=1e-12)

    @pytest.mark.parametrize("n,n_coils", [(16, 1), (16, 4), (32, 3), (64, 8)])
    def test_rss_is_one(self, n, n_coils):
        coils = simulate_coils(n, n_coils)
        assert np.max(np.abs(coils.rss() - 1.0)) <= 1e-10

    def test_opposite_coils_point_symmetric(self):
        n, n_coils = 32, 4
        coils = simulate_coils(n, n_coils)
        raw = np.stack([gaussian_coil_magnitude(k, n_coils, n) for k in range(n_coils)])
        rss = np.sqrt(np.sum(raw**2, axis=0))
        expected = raw / rss
        for k in range(n_coils):
            np.testing.assert_allclose(np.abs(coils.maps[k]), expected[k], atol=1e-10)
        # magnitude of coil k at p equals magnitude of coil k+2 at the mirror of p
        for i, j in [(5, 9), (20, 27), (16, 16), (1, 30)]:
            mi, mj = n - i, n - j
            for k in range(2):
                assert abs(np.abs(coils.maps[k][i, j]) - np.abs(coils.maps[k + 2][mi, mj])) < 1e-10

    def test_deterministic(self):
        a = simulate_coils(16, 4).maps
        b = simulate_coils(16, 4).maps
        assert np.array_equal(a, b)

    def test_rejects_bad_args(self):
        with pytest.raises(ValidationError):
            simulate_coils(16, 0)
        with pytest.raises(ValidationError):
            simulate_coils(15, 2)

    def test_sensitivities_type_validates(self):
        with pytest.raises(ValidationError):
            CoilSensitivities(np.zeros((2, 8, 8), dtype=complex))  # zero RSS
        with pytest.raises(ValidationError):
            CoilSensitivities(np.ones((2, 8, 6), dtype=complex))  # non-square
