import numpy as np
import pytest

from mrishot.errors import ValidationError
from mrishot.trajectory import ShotTrajectory, TrajectoryKind, make_trajectory, segment_extract

ALL_KINDS = list(TrajectoryKind)
POINT_KINDS = [TrajectoryKind.CARTESIAN_PARALLEL_2D, TrajectoryKind.RANDOM]


def valid_combo(kind, n, s):
    if kind in (TrajectoryKind.CARTESIAN_SEQUENTIAL, TrajectoryKind.CARTESIAN_PARALLEL_1D):
        return s <= n
    return s <= n * n


class TestDefinitionalSplits:
    def test_sequential_blocks(self):
        traj = make_trajectory(TrajectoryKind.CARTESIAN_SEQUENTIAL, 4, 2)
        assert np.array_equal(traj.masks[0], np.array([[1, 1, 1, 1], [1, 1, 1, 1], [0, 0, 0, 0], [0, 0, 0, 0]], bool))
        assert np.array_equal(traj.masks[1], np.array([[0, 0, 0, 0], [0, 0, 0, 0], [1, 1, 1, 1], [1, 1, 1, 1]], bool))

    def test_parallel_1d_interleave(self):
        traj = make_trajectory(TrajectoryKind.CARTESIAN_PARALLEL_1D, 4, 2)
        assert np.array_equal(traj.masks[0], np.array([[1, 1, 1, 1], [0, 0, 0, 0], [1, 1, 1, 1], [0, 0, 0, 0]], bool))
        assert np.array_equal(traj.masks[1], ~traj.masks[0])

    def test_parallel_2d_checkerboard_two_shots(self):
        traj = make_trajectory(TrajectoryKind.CARTESIAN_PARALLEL_2D, 4, 2)
        rows, cols = np.indices((4, 4))
        assert np.array_equal(traj.masks[0], (rows + cols) % 2 == 0)

    def test_parallel_2d_perfect_square_tiling(self):
        traj = make_trajectory(TrajectoryKind.CARTESIAN_PARALLEL_2D, 8, 4)
        rows, cols = np.indices((8, 8))
        for s in range(4):
            assert np.array_equal(traj.masks[s], (rows * 2 + cols) % 4 == s)

    def test_random_mask_audit(self):
        # exhaustive audit: exact per-shot counts, full-grid union, disjoint
        traj = make_trajectory(TrajectoryKind.RANDOM, 8, 4, seed=42)
        seen = np.zeros((8, 8), dtype=int)
        for s in range(4):
            assert int(traj.masks[s].sum()) == 16
            seen += traj.masks[s].astype(int)
        assert np.all(seen == 1)


class TestPartitionInvariants:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    @pytest.mark.parametrize("n", [8, 64])
    @pytest.mark.parametrize("s", [2, 4, 8, 16])
    def test_partition_and_balance(self, kind, n, s):
        if not valid_combo(kind, n, s):
            pytest.skip("shot count unsupported for this kind/size")
        traj = make_trajectory(kind, n, s, seed=7)
        total = traj.masks.sum(axis=0)
        assert np.all(total == 1), "masks must partition the grid"
        target = n * n / s
        bound = n if kind not in POINT_KINDS else 1
        for mask in traj.masks:
            assert abs(int(mask.sum()) - target) <= bound

    def test_random_seed_determinism(self):
        a = make_trajectory(TrajectoryKind.RANDOM, 16, 4, seed=123)
        b = make_trajectory(TrajectoryKind.RANDOM, 16, 4, seed=123)
        c = make_trajectory(TrajectoryKind.RANDOM, 16, 4, seed=124)
        assert np.array_equal(a.masks, b.masks)
        assert not np.array_equal(a.masks, c.masks)

    def test_non_random_kinds_ignore_seed(self):
        a = make_trajectory(TrajectoryKind.CARTESIAN_SEQUENTIAL, 8, 2, seed=1)
        b = make_trajectory(TrajectoryKind.CARTESIAN_SEQUENTIAL, 8, 2, seed=99)
        assert np.array_equal(a.masks, b.masks)


class TestValidation:
    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValidationError) as err:
            make_trajectory(TrajectoryKind.RANDOM, 8, 3)
        assert err.value.code == "bad-shot-count"

    def test_rejects_too_many_rows(self):
        with pytest.raises(ValidationError):
            make_trajectory(TrajectoryKind.CARTESIAN_SEQUENTIAL, 8, 16)

    def test_rejects_odd_grid(self):
        with pytest.raises(ValidationError):
            make_trajectory(TrajectoryKind.RANDOM, 9, 2)

    def test_trajectory_type_requires_partition(self):
        masks = np.zeros((2, 4, 4), dtype=bool)
        masks[0, 0, 0] = True  # not a partition
        with pytest.raises(ValidationError) as err:
            ShotTrajectory(kind=TrajectoryKind.RANDOM, masks=masks)
        assert err.value.code == "not-a-partition"


class TestSegmentExtract:
    def test_segments_sum_to_original(self):
        rng = np.random.default_rng(5)
        k = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        traj = make_trajectory(TrajectoryKind.RANDOM, 8, 4, seed=9)
        total = sum(segment_extract(k, traj, s) for s in range(4))
        np.testing.assert_allclose(total, k, atol=1e-15)

    def test_zero_kspace(self):
        traj = make_trajectory(TrajectoryKind.CARTESIAN_PARALLEL_1D, 8, 2)
        out = segment_extract(np.zeros((8, 8), dtype=complex), traj, 0)
        assert np.all(out == 0)

    def test_idempotent(self):
        rng = np.random.default_rng(6)
        k = rng.standard_normal((8, 8)) * (1 + 1j)
        traj = make_trajectory(TrajectoryKind.CARTESIAN_SEQUENTIAL, 8, 2)
        once = segment_extract(k, traj, 1)
        twice = segment_extract(once, traj, 1)
        np.testing.assert_array_equal(once, twice)

    def test_index_out_of_range(self):
        traj = make_trajectory(TrajectoryKind.CARTESIAN_SEQUENTIAL, 8, 2)
        with pytest.raises(ValidationError) as err:
            segment_extract(np.zeros((8, 8)), traj, 2)
        assert err.value.code == "bad-shot-index"
