import math

import numpy as np
import pytest

from mrishot.errors import ValidationError
from mrishot.metrics import MetricReport, artifact_power, evaluate, psnr, ssim
from mrishot.phantom import shepp_logan


def noisy_phantom(sigma, seed=1234):
    ref = shepp_logan(64).real
    rng = np.random.default_rng(seed)
    test = np.clip(ref + sigma * rng.standard_normal(ref.shape), 0.0, 1.0)
    return ref, test


class TestPsnr:
    def test_identical_inputs_flagged_infinite(self):
        x = shepp_logan(32)
        assert math.isinf(psnr(x, x))

    def test_uniform_offset_closed_form(self):
        ref = np.linspace(0.0, 1.0, 64).reshape(8, 8)  # max exactly 1
        test = ref + 0.1
        assert abs(psnr(ref, test) - 20.0) < 1e-12

    def test_matches_direct_mse_oracle(self):
        ref, test = noisy_phantom(0.05)
        # two-line oracle, written independently of the implementation
        mse = np.mean((np.abs(ref) - np.abs(test)) ** 2)
        expected = 10.0 * math.log10(np.abs(ref).max() ** 2 / mse)
        assert abs(psnr(ref, test) - expected) < 1e-10

    def test_decreases_with_noise_level(self):
        values = [psnr(*noisy_phantom(sigma)) for sigma in (0.01, 0.05, 0.1)]
        assert values[0] > values[1] > values[2]

    def test_zero_reference_rejected(self):
        with pytest.raises(ValidationError) as err:
            psnr(np.zeros((8, 8)), np.ones((8, 8)))
        assert err.value.code == "zero-reference"

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            psnr(np.ones((8, 8)), np.ones((16, 16)))


class TestSsim:
    def test_identical_inputs_give_one(self):
        x = shepp_logan(64)
        assert ssim(x, x) == 1.0

    def test_inverted_image_scores_below_one(self):
        x = shepp_logan(64).real
        assert ssim(x, 1.0 - x) < 1.0

    def test_constant_images_closed_form(self):
        a, b = 0.5, 0.25
        c1 = 0.01**2
        expected = (2 * a * b + c1) / (a * a + b * b + c1)
        got = ssim(np.full((32, 32), a), np.full((32, 32), b), data_range=1.0)
        assert abs(got - expected) < 1e-12

    def test_symmetric_with_shared_range(self):
        rng = np.random.default_rng(7)
        a = rng.random((32, 32))
        b = rng.random((32, 32))
        assert abs(ssim(a, b, data_range=1.0) - ssim(b, a, data_range=1.0)) < 1e-12

    def test_never_exceeds_one(self):
        rng = np.random.default_rng(8)
        for trial in range(5):
            a = rng.random((16, 16))
            b = rng.random((16, 16))
            assert ssim(a, b, data_range=1.0) <= 1.0


class TestArtifactPower:
    def test_identical_inputs_give_zero(self):
        x = shepp_logan(32)
        assert artifact_power(x, x) == 0.0

    def test_zero_test_gives_one(self):
        x = shepp_logan(32)
        assert abs(artifact_power(x, np.zeros_like(x)) - 1.0) < 1e-15

    @pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 0.9, 1.0])
    def test_scaling_law(self, alpha):
        x = shepp_logan(32)
        assert abs(artifact_power(x, alpha * x) - (1 - alpha) ** 2) < 1e-12

    def test_zero_reference_rejected(self):
        with pytest.raises(ValidationError):
            artifact_power(np.zeros((8, 8)), np.ones((8, 8)))


class TestMetricReport:
    def test_csv_round(self):
        ref, test = noisy_phantom(0.05)
        report = evaluate(ref, test)
        row = report.csv_row()
        assert MetricReport.csv_header() == "psnr_db,ssim,artifact_power"
        parts = row.split(",")
        assert len(parts) == 3
        assert abs(float(parts[0]) - report.psnr_db) < 1e-12
        assert report.ssim <= 1.0 and report.artifact_power >= 0.0
