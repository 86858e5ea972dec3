import itertools
import math

import numpy as np
import pytest

from mrishot.core import fft2c, ifft2c
from mrishot.errors import ValidationError
from mrishot.motion import RigidMotionSchedule, forward_corrupt
from mrishot.phantom import CoilSensitivities, shepp_logan, simulate_coils
from mrishot.sense import ConvergenceReport, KSpaceData, ReconConfig, adjoint, cg_sense, encode
from mrishot.trajectory import TrajectoryKind, make_trajectory


def random_image(n, seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_kspace(mask, n_coils, seed=0):
    rng = np.random.default_rng(seed)
    n = mask.shape[0]
    grids = rng.standard_normal((n_coils, n, n)) + 1j * rng.standard_normal((n_coils, n, n))
    return KSpaceData(grids=grids * mask, sampling_mask=mask)


def unit_coil(n):
    return CoilSensitivities(np.ones((1, n, n), dtype=complex))


# --- dense reference built from the closed-form DFT entries ---------------

def dense_centered_dft(n):
    idx = np.arange(n) - n // 2
    f1 = np.exp(-2j * np.pi * np.outer(idx, idx) / n) / math.sqrt(n)
    return np.kron(f1, f1)


def dense_encode_matrix(coils, mask):
    """Materialize the encoding operator as an (n_coils*N^2, N^2) matrix."""
    n = mask.shape[0]
    f2 = dense_centered_dft(n)
    m = mask.ravel().astype(float)
    return np.vstack([m[:, None] * (f2 @ np.diag(coils.maps[c].ravel())) for c in range(coils.n_coils)])


class TestEncode:
    def test_unit_coil_full_mask_reduces_to_fft(self):
        n = 8
        x = random_image(n, seed=1)
        data = encode(x, unit_coil(n), np.ones((n, n), bool))
        np.testing.assert_allclose(data.grids[0], fft2c(x), atol=1e-13)

    def test_zero_image_gives_zero_data(self):
        n = 8
        data = encode(np.zeros((n, n)), simulate_coils(n, 3), np.ones((n, n), bool))
        assert np.all(data.grids == 0)

    def test_matches_dense_matrix(self):
        n = 4
        x = random_image(n, seed=2)
        coils = simulate_coils(n, 2)
        mask = make_trajectory(TrajectoryKind.CARTESIAN_PARALLEL_1D, n, 2).masks[0]
        e_dense = dense_encode_matrix(coils, mask)
        got = encode(x, coils, mask).grids.reshape(2 * n * n)
        np.testing.assert_allclose(got, e_dense @ x.ravel(), atol=1e-12)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            encode(np.ones((8, 8)), simulate_coils(4, 2), np.ones((8, 8), bool))


class TestAdjoint:
    def test_unit_coil_full_mask_reduces_to_ifft(self):
        n = 8
        y = random_kspace(np.ones((n, n), bool), 1, seed=3)
        np.testing.assert_allclose(adjoint(y, unit_coil(n)), ifft2c(y.grids[0]), atol=1e-13)

    def test_matches_dense_conjugate_transpose(self):
        n = 4
        coils = simulate_coils(n, 2)
        mask = make_trajectory(TrajectoryKind.CARTESIAN_PARALLEL_1D, n, 2).masks[0]
        y = random_kspace(mask, 2, seed=4)
        e_dense = dense_encode_matrix(coils, mask)
        expected = (e_dense.conj().T @ y.grids.reshape(2 * n * n)).reshape(n, n)
        np.testing.assert_allclose(adjoint(y, coils), expected, atol=1e-12)

    @pytest.mark.parametrize("kind", list(TrajectoryKind))
    @pytest.mark.parametrize("n_coils", [1, 2, 4])
    def test_adjointness(self, kind, n_coils):
        n = 8
        coils = simulate_coils(n, n_coils)
        mask = make_trajectory(kind, n, 2, seed=1).masks[0]
        for trial in range(5):
            x = random_image(n, seed=10 + trial)
            y = random_kspace(mask, n_coils, seed=20 + trial)
            lhs = np.vdot(y.grids, encode(x, coils, mask).grids)
            rhs = np.vdot(adjoint(y, coils), x)
            scale = np.linalg.norm(x) * np.linalg.norm(y.grids)
            assert abs(lhs - rhs) <= 1e-10 * scale

    def test_coil_count_mismatch_rejected(self):
        n = 8
        y = random_kspace(np.ones((n, n), bool), 2, seed=5)
        with pytest.raises(ValidationError):
            adjoint(y, simulate_coils(n, 3))


class TestKSpaceData:
    def test_counts_sampled_positions(self):
        mask = np.zeros((4, 4), bool)
        mask[0] = True
        data = KSpaceData(grids=np.zeros((1, 4, 4), complex), sampling_mask=mask)
        assert data.n_k == 4

    def test_rejects_data_outside_mask(self):
        mask = np.zeros((4, 4), bool)
        mask[0] = True
        grids = np.ones((1, 4, 4), complex)
        with pytest.raises(ValidationError) as err:
            KSpaceData(grids=grids, sampling_mask=mask)
        assert err.value.code == "unsampled-data"

    def test_rejects_non_finite(self):
        mask = np.ones((4, 4), bool)
        grids = np.ones((1, 4, 4), complex)
        grids[0, 0, 0] = np.nan
        with pytest.raises(ValidationError):
            KSpaceData(grids=grids, sampling_mask=mask)


class TestReconConfig:
    def test_validates(self):
        with pytest.raises(ValidationError):
            ReconConfig(max_iters=0)
        with pytest.raises(ValidationError):
            ReconConfig(tol=1.5)


FULL_RANK_CASES = list(itertools.product([4, 8], [2, 4], list(TrajectoryKind)))


class TestCgSense:
    def test_exact_recovery_from_zero_motion_data(self):
        n = 16
        x = shepp_logan(n)
        coils = simulate_coils(n, 4)
        traj = make_trajectory(TrajectoryKind.RANDOM, n, 2, seed=2)
        data = forward_corrupt(x, coils, traj, RigidMotionSchedule.identity(2))
        recon, report = cg_sense(data, coils, ReconConfig(max_iters=20, tol=1e-10))
        assert np.linalg.norm(recon - x) <= 1e-6 * np.linalg.norm(x)
        assert report.iterations <= 20
        assert report.converged

    def test_zero_data_returns_zero_immediately(self):
        n = 8
        mask = np.ones((n, n), bool)
        data = KSpaceData(grids=np.zeros((2, n, n), complex), sampling_mask=mask)
        recon, report = cg_sense(data, simulate_coils(n, 2))
        assert np.all(recon == 0)
        assert report.iterations == 0
        assert report.converged

    @pytest.mark.parametrize("n,s,kind", FULL_RANK_CASES)
    def test_matches_dense_pseudo_inverse(self, n, s, kind):
        coils = simulate_coils(n, 4)
        traj = make_trajectory(kind, n, s, seed=5)
        mask = ~traj.masks[0]  # drop one shot: undersampled but full rank
        y = random_kspace(mask, 4, seed=6)

        e_dense = dense_encode_matrix(coils, mask)
        reference, *_ = np.linalg.lstsq(e_dense, y.grids.reshape(-1), rcond=None)

        recon, report = cg_sense(y, coils, ReconConfig(max_iters=500, tol=1e-13))
        err = np.linalg.norm(recon.ravel() - reference) / np.linalg.norm(reference)
        assert err <= 1e-8

    @pytest.mark.parametrize("n,s,kind", FULL_RANK_CASES)
    def test_residuals_monotone_non_increasing(self, n, s, kind):
        coils = simulate_coils(n, 4)
        traj = make_trajectory(kind, n, s, seed=7)
        mask = ~traj.masks[0]
        y = random_kspace(mask, 4, seed=8)
        _, report = cg_sense(y, coils, ReconConfig(max_iters=200, tol=1e-12))
        res = np.array(report.residuals)
        assert np.all(res[1:] <= res[:-1] + 1e-12)
        assert len(report.normal_residuals) == len(res)

    def test_consistency_idempotence(self):
        n, s = 8, 2
        coils = simulate_coils(n, 4)
        traj = make_trajectory(TrajectoryKind.RANDOM, n, s, seed=9)
        mask = ~traj.masks[0]
        y = encode(random_image(n, seed=10), coils, mask)
        recon, _ = cg_sense(y, coils, ReconConfig(max_iters=500, tol=1e-13))
        again = encode(recon, coils, mask)
        num = np.linalg.norm((again.grids - y.grids)[:, mask])
        assert num <= 1e-8 * np.linalg.norm(y.grids[:, mask])

    def test_non_convergence_is_reported_not_raised(self):
        n = 8
        coils = simulate_coils(n, 4)
        mask = ~make_trajectory(TrajectoryKind.CARTESIAN_SEQUENTIAL, n, 2, seed=1).masks[0]
        y = random_kspace(mask, 4, seed=11)
        _, report = cg_sense(y, coils, ReconConfig(max_iters=1, tol=1e-15))
        assert not report.converged
        assert report.iterations == 1

    def test_precondition_speeds_convergence_on_invertible_case(self):
        n = 16
        x = shepp_logan(n)
        coils = simulate_coils(n, 4)
        data = encode(x, coils, np.ones((n, n), bool))
        _, with_pc = cg_sense(data, coils, ReconConfig(max_iters=30, tol=1e-10, precondition=True))
        _, without_pc = cg_sense(data, coils, ReconConfig(max_iters=30, tol=1e-10, precondition=False))
        assert with_pc.iterations <= without_pc.iterations

    def test_report_log_format(self):
        report = ConvergenceReport(residuals=(1.0, 0.25), normal_residuals=(1.0, 0.5), converged=False)
        lines = report.to_log().splitlines()
        assert lines[0].startswith("0,") and lines[1].startswith("1,")
        assert report.iterations == 1
