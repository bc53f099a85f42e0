import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankrecover.errors import (
    DegenerateGroundTruthError,
    NoiseCalibrationError,
    RoiLayoutError,
    ValidationError,
)
from rankrecover.simulate import (
    ParamDesignConfig,
    SimConfig,
    _linear_target_with_scale,
    default_roi_origins,
    gaussian_kernel,
    gen_param_design,
    gen_recovery_dataset,
    gen_smooth_noise_volumes,
    linear_target,
    make_ground_truth,
    response_curve,
    sigmoid_warp,
    smooth_volumes,
)


def direct_smooth_oracle(rows, grid, sigma):
    """O(p^2) dense application of the separable smoothing operator.

    Builds the same unit-sum kernel and applies it along each axis by
    explicit edge-repeating reflected indexing; no shared code with the
    separable fast path beyond the kernel definition.
    """
    k = gaussian_kernel(sigma)
    radius = (len(k) - 1) // 2

    def reflect(idx, n):
        # half-sample symmetric extension: ...b a | a b c | c b...
        period = 2 * n
        idx = idx % period
        idx = np.where(idx < 0, idx + period, idx)
        return np.where(idx >= n, period - 1 - idx, idx)

    def axis_matrix(n):
        M = np.zeros((n, n))
        for out in range(n):
            for t in range(-radius, radius + 1):
                src = int(reflect(np.array(out + t), n))
                M[out, src] += k[t + radius]
        return M

    gx, gy, gz = grid
    out = []
    for row in np.asarray(rows, dtype=float):
        v = row.reshape(grid)
        v = np.einsum("ij,jkl->ikl", axis_matrix(gx), v)
        v = np.einsum("ij,kjl->kil", axis_matrix(gy), v)
        v = np.einsum("ij,klj->kli", axis_matrix(gz), v)
        out.append(v.ravel())
    return np.asarray(out)


def lag1_autocorr(rows, grid):
    """Mean correlation between axis-neighbor voxels, per axis."""
    vols = rows.reshape((-1,) + grid)
    cors = []
    for axis in (1, 2, 3):
        a = np.moveaxis(vols, axis, -1)
        x = a[..., :-1].ravel()
        y = a[..., 1:].ravel()
        cors.append(float(np.corrcoef(x, y)[0, 1]))
    return cors


class TestSmoothing:
    def test_sigma_zero_is_identity(self):
        rows = gen_smooth_noise_volumes(4, (3, 3, 3), sigma=0.0, seed=1)
        raw = gen_smooth_noise_volumes(4, (3, 3, 3), sigma=0.0, seed=1)
        assert np.array_equal(rows, raw)
        # and equals the unsmoothed draw: smoothing with the 1-tap kernel
        assert np.array_equal(smooth_volumes(rows, (3, 3, 3), 0.0), rows)

    def test_separable_matches_direct_oracle(self):
        rng = np.random.default_rng(0)
        rows = rng.standard_normal((3, 5**3))
        fast = smooth_volumes(rows, (5, 5, 5), 2.0)
        slow = direct_smooth_oracle(rows, (5, 5, 5), 2.0)
        assert np.allclose(fast, slow, atol=1e-10)

    def test_lag1_autocorrelation_vs_oracle(self):
        grid = (5, 5, 5)
        rows = gen_smooth_noise_volumes(1000, grid, sigma=2.0, seed=42)
        got = lag1_autocorr(rows, grid)
        oracle_rows = direct_smooth_oracle(
            np.random.default_rng(777).standard_normal((1000, 125)), grid, 2.0
        )
        want = lag1_autocorr(oracle_rows, grid)
        for g, w in zip(got, want):
            assert abs(g - w) <= 0.05

    def test_deterministic(self):
        a = gen_smooth_noise_volumes(5, (4, 4, 4), 1.5, seed=9)
        b = gen_smooth_noise_volumes(5, (4, 4, 4), 1.5, seed=9)
        assert np.array_equal(a, b)

    def test_mean_preserved(self):
        rows = np.random.default_rng(3).standard_normal((6, 7**3))
        sm = smooth_volumes(rows, (7, 7, 7), 2.0)
        assert np.allclose(sm.mean(axis=1), rows.mean(axis=1), atol=1e-12)

    def test_kernel_unit_sum_and_truncation(self):
        k = gaussian_kernel(2.0)
        assert len(k) == 17  # radius 8 = 4 sigma
        assert abs(k.sum() - 1.0) < 1e-12


class TestGroundTruth:
    def test_default_layout_norm(self):
        gt = make_ground_truth((5, 5, 5), (2, 2, 2), (1, 1, -1, -1),
                               default_roi_origins((5, 5, 5), (2, 2, 2)))
        assert float(gt.weights @ gt.weights) == 32.0  # 4 ROIs x 8 voxels x 1^2
        assert len(gt.support) == 32

    def test_zero_value_single_roi_degenerate(self):
        with pytest.raises(DegenerateGroundTruthError):
            make_ground_truth((5, 5, 5), (2, 2, 2), (0.0,), [(0, 0, 0)])

    def test_overlap_rejected(self):
        with pytest.raises(RoiLayoutError):
            make_ground_truth((5, 5, 5), (2, 2, 2), (1, 1), [(0, 0, 0), (1, 1, 1)])

    def test_out_of_bounds_rejected(self):
        with pytest.raises(RoiLayoutError):
            make_ground_truth((5, 5, 5), (2, 2, 2), (1.0,), [(4, 0, 0)])


class TestLinearTarget:
    def setup_method(self):
        self.gt = make_ground_truth((3, 3, 3), (2, 2, 2), (1.0,), [(0, 0, 0)])
        self.X = gen_smooth_noise_volumes(20, (3, 3, 3), 1.0, seed=5)

    def test_exact_snr(self):
        y = linear_target(self.X, self.gt, snr=0.05, seed=1)
        eps = y - self.X @ self.gt.weights
        signal = np.linalg.norm(self.X @ self.gt.weights)
        assert abs(np.linalg.norm(eps) / signal - 0.05) < 1e-12

    def test_noiseless_limit(self):
        y = linear_target(self.X, self.gt, snr=0.0, seed=1)
        assert np.array_equal(y, self.X @ self.gt.weights)

    def test_zero_signal_rejected(self):
        with pytest.raises(NoiseCalibrationError):
            linear_target(np.zeros_like(self.X), self.gt, snr=0.05, seed=1)

    def test_same_seed_noise_is_scalar_multiple_across_snr(self):
        y1, s1 = _linear_target_with_scale(self.X, self.gt, 0.02, seed=9)
        y2, s2 = _linear_target_with_scale(self.X, self.gt, 0.10, seed=9)
        e1 = y1 - self.X @ self.gt.weights
        e2 = y2 - self.X @ self.gt.weights
        ratio = e2 / e1
        assert np.allclose(ratio, ratio[0]) and ratio[0] > 0
        assert np.isclose(s2 / s1, ratio[0])


class TestSigmoidWarp:
    def test_origin(self):
        assert sigmoid_warp(np.array([0.0]))[0] == 0.5

    def test_monotone(self):
        y = np.linspace(-5, 5, 50)
        out = sigmoid_warp(y)
        assert np.all(np.diff(out) > 0)

    def test_extreme_values_exact_tails(self):
        out = sigmoid_warp(np.array([40.0, -40.0]))
        assert abs(out[0] - 1.0) <= 1e-15
        assert abs(out[1] - 0.0) <= 1e-15
        assert np.all(np.isfinite(out))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-36, 36), min_size=1, max_size=20))
    def test_bijection_into_unit_interval(self, values):
        # strict (0, 1) bounds hold wherever float64 can express them;
        # beyond |y| ~ 37 the correctly rounded value saturates
        out = sigmoid_warp(np.asarray(values))
        assert np.all((out > 0) & (out < 1))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-700, 700), min_size=2, max_size=20))
    def test_rank_order_preserved(self, values):
        arr = np.asarray(values)
        order = np.argsort(arr, kind="stable")
        assert np.all(np.diff(sigmoid_warp(arr)[order]) >= 0)


class TestRecoveryDataset:
    def test_seven_cube_feature_count(self):
        ds, _ = gen_recovery_dataset(SimConfig(grid=(7, 7, 7), n_samples=3, seed=1))
        assert ds.p == 343

    def test_sigmoid_targets_monotone_in_score(self):
        cfg = SimConfig(grid=(5, 5, 5), n_samples=30, snr=0.0, warp="sigmoid", seed=2)
        ds, gt = gen_recovery_dataset(cfg)
        assert np.all((ds.targets > 0) & (ds.targets < 1))
        score = ds.features @ gt.weights
        order = np.argsort(score)
        assert np.all(np.diff(ds.targets[order]) >= 0)

    def test_deterministic(self):
        cfg = SimConfig(n_samples=10, seed=33)
        a, _ = gen_recovery_dataset(cfg)
        b, _ = gen_recovery_dataset(cfg)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.targets, b.targets)

    def test_targets_depend_on_x_only_through_score(self):
        # permuting an off-support column changes X but not the targets
        cfg = SimConfig(grid=(5, 5, 5), n_samples=15, snr=0.05, seed=6)
        ds, gt = gen_recovery_dataset(cfg)
        off = sorted(set(range(ds.p)) - set(gt.support))[0]
        X2 = ds.features.copy()
        X2[:, off] = np.roll(X2[:, off], 1)
        y2, _ = _linear_target_with_scale(X2, gt, cfg.snr, cfg.seed)
        assert np.array_equal(y2, ds.targets)

    def test_snr_range_validated(self):
        with pytest.raises(ValidationError):
            SimConfig(snr=1.5)


class TestParamDesign:
    def test_counts(self):
        cfg = ParamDesignConfig(n_subjects=10, levels=5, samples_per_level_per_subject=4, seed=1)
        ds = gen_param_design(cfg)
        assert ds.n == 200
        assert set(np.unique(ds.targets)) == {1, 2, 3, 4, 5}
        assert len(np.unique(ds.subject)) == 10

    def test_noiseless_linear_means(self):
        cfg = ParamDesignConfig(
            n_subjects=2, levels=5, samples_per_level_per_subject=3,
            region_response=("linear",), noise_sigma=0.0, seed=0,
        )
        ds = gen_param_design(cfg)
        origin_idx = np.flatnonzero(
            make_ground_truth(cfg.grid, cfg.roi_size, (1.0,), [(0, 0, 0)]).weights
        )
        means = [ds.features[ds.targets == lv][:, origin_idx].mean() for lv in range(1, 6)]
        diffs = np.diff(means)
        assert np.allclose(diffs, diffs[0], atol=1e-12)

    def test_saturating_log_concave(self):
        curve = response_curve("saturating_log", 5)
        inc = np.diff(curve)
        assert np.all(np.diff(inc) < 0) and np.all(inc > 0)

    def test_deterministic(self):
        cfg = ParamDesignConfig(seed=12)
        a = gen_param_design(cfg)
        b = gen_param_design(cfg)
        assert np.array_equal(a.features, b.features)
