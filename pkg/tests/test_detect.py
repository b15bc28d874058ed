"""Tests for MRC combining, detector weights and weighted minimum-distance decisions."""
import numpy as np
import pytest
from mimo_utils.chest import dft_pilot
from mimo_utils.common_utils import db_to_linear
from mimo_utils.errors import ConfigError, DomainError, ShapeError
from mimo_utils.qmath import quantize
from models.detect import (DetectorSpec, detect, detect_many, make_detector, make_weights,
                           mrc_estimate, rasterize_regions, weighted_distances)
from models.moments import moment_table


@pytest.fixture
def table(constellation):
    return moment_table(constellation, dft_pilot(32), db_to_linear(5.0), 128)


class TestMRC:
    def test_single_antenna(self):
        np.testing.assert_array_equal(mrc_estimate(np.array([[1]]), np.array([1 + 1j])), [1 + 1j])

    def test_conjugate_transpose(self):
        np.testing.assert_array_equal(mrc_estimate(np.array([[1j]]), np.array([1])), [-1j])

    def test_sums_over_antennas(self):
        xhat = mrc_estimate(np.array([[1], [1]]), np.array([1 + 1j, 1 - 1j]))
        np.testing.assert_array_equal(xhat, [2])

    def test_accepts_quantized_matrix(self):
        r = quantize(np.array([[0.3], [-0.2]]), rho=1.0)
        np.testing.assert_array_equal(mrc_estimate(np.ones((2, 1)), r), [2j])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            mrc_estimate(np.ones((3, 1)), np.ones(2))


class TestWeights:
    def test_alpha_zero_gives_unit_weights(self):
        np.testing.assert_array_equal(make_weights([0.1, 5.0, 80.0], 0.0), [1, 1, 1])

    def test_alpha_one(self):
        assert make_weights([2.0], 1.0)[0] == 0.5

    def test_unit_variance(self):
        np.testing.assert_array_equal(make_weights([1.0, 1.0], 0.3), [1, 1])

    @pytest.mark.parametrize("alpha", [-0.1, 1.5])
    def test_rejects_alpha_outside_unit_interval(self, alpha):
        with pytest.raises(ConfigError):
            make_weights([1.0], alpha)

    def test_rejects_non_positive_denominator(self):
        with pytest.raises(DomainError):
            make_weights([0.0], 1.0)


class TestDetectorSpec:
    def test_alpha_zero_requires_unit_weights(self):
        with pytest.raises(ConfigError):
            DetectorSpec([1, -1], [1, 0.5], 0.0)

    def test_rejects_non_positive_weight(self):
        with pytest.raises(DomainError):
            DetectorSpec([1, -1], [1, 0], 1.0)

    def test_rejects_length_mismatch(self):
        with pytest.raises(ShapeError):
            DetectorSpec([1, -1], [1], 1.0)

    def test_from_table(self, table):
        spec = make_detector(table, 1.0)
        assert len(spec) == 16
        np.testing.assert_allclose(spec.weights, 1 / table.variance)


class TestDetect:
    def test_exact_center(self, table):
        spec = make_detector(table, 1.0)
        for idx, center in enumerate(table.expected):
            assert detect(center, spec) == idx

    def test_equal_weights_nearest_center(self):
        spec = DetectorSpec([1, -1], [1, 1])
        assert detect(0.9, spec) == 0
        assert detect(-0.2 + 3j, spec) == 1

    def test_ties_go_to_lowest_index(self):
        spec = DetectorSpec([1, -1], [1, 1])
        assert detect(0.0, spec) == 0
        assert detect(5j, DetectorSpec([-1, 1], [1, 1])) == 0

    def test_weighted_bisector(self):
        weighted = DetectorSpec([1, 3], [0.5, 1], 1.0)
        plain = DetectorSpec([1, 3], [1, 1])
        # |xi - 1| / 2 = |xi - 3| at xi = 7/3 and xi = 5
        assert detect(2.2, weighted) == 0
        assert detect(2.2, plain) == 1
        assert detect(2.5, weighted) == 1
        assert detect(2.5, plain) == 1
        assert detect(7 / 3 - 1e-9, weighted) == 0
        assert detect(7 / 3 + 1e-9, weighted) == 1
        assert detect(4.9, weighted) == 1
        assert detect(6.0, weighted) == 0

    def test_distances_use_modulus(self):
        spec = DetectorSpec([0, 3j], [2, 1], 1.0)
        np.testing.assert_allclose(weighted_distances(4 + 3j, spec), [10.0, 4.0])

    def test_pure(self, table):
        spec = make_detector(table, 0.5)
        assert detect(0.3 - 2.1j, spec) == detect(0.3 - 2.1j, spec)

    def test_equal_weight_reduction(self, table):
        spec = make_detector(table, 0.0)
        rng = np.random.default_rng(2024)
        scale = 1.5 * np.max(np.abs(table.expected))
        xhats = scale * (rng.uniform(-1, 1, 100000) + 1j * rng.uniform(-1, 1, 100000))
        diff = xhats[:, None] - table.expected[None, :]
        brute = np.argmin(diff.real ** 2 + diff.imag ** 2, axis=1)
        np.testing.assert_array_equal(detect_many(xhats, spec), brute)

    def test_detect_many_matches_scalar(self, table):
        spec = make_detector(table, 1.0)
        rng = np.random.default_rng(3)
        xhats = 20 * (rng.standard_normal(200) + 1j * rng.standard_normal(200))
        assert list(detect_many(xhats, spec)) == [detect(x, spec) for x in xhats]
        assert detect_many(np.array([]), spec).shape == (0,)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
    def test_quarter_turn_equivariance(self, table, alpha):
        spec = make_detector(table, alpha)
        rotated = DetectorSpec(1j * spec.centers, spec.weights, alpha)
        rng = np.random.default_rng(7)
        scale = np.max(np.abs(table.expected))
        xhats = scale * (rng.standard_normal(5000) + 1j * rng.standard_normal(5000))
        np.testing.assert_array_equal(detect_many(1j * xhats, rotated), detect_many(xhats, spec))


class TestRegions:
    def test_frame_layout(self, table):
        frame = rasterize_regions(make_detector(table, 1.0), grid_size=16)
        assert list(frame.columns) == ['re', 'im', 'decided_index']
        assert len(frame) == 256
        extent = 1.5 * np.max(np.abs(table.expected))
        assert frame['re'].min() == pytest.approx(-extent)
        assert frame['im'].max() == pytest.approx(extent)
        # imaginary axis is the outer loop
        assert frame['im'].iloc[:16].nunique() == 1
        assert frame['re'].iloc[:16].nunique() == 16

    def test_rejects_bad_grid(self, table):
        with pytest.raises(ConfigError):
            rasterize_regions(make_detector(table, 1.0), grid_size=1)
        with pytest.raises(ConfigError):
            rasterize_regions(make_detector(table, 1.0), grid_size=8, extent=-1.0)

    def test_low_weight_region_only_grows(self, table):
        plain = rasterize_regions(make_detector(table, 0.0), grid_size=512)
        weighted_spec = make_detector(table, 1.0)
        weighted = rasterize_regions(weighted_spec, grid_size=512)
        ell = int(np.argmin(weighted_spec.weights))
        before = plain['decided_index'].to_numpy() == ell
        after = weighted['decided_index'].to_numpy() == ell
        assert np.all(after[before])
        assert after.sum() > before.sum()
