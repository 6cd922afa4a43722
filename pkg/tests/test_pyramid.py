import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gapfuse.pyramid import (
    DepthError,
    LaplacianPyramid,
    PyramidError,
    SteerablePyramid,
    build_laplacian,
    build_steerable,
    filter_bank,
    max_levels,
    reconstruct_laplacian,
    reconstruct_steerable,
)


class TestMaxLevels:
    def test_default_grid(self):
        assert max_levels(64, 64) == 4

    def test_minimum_size(self):
        assert max_levels(4, 4) == 0

    def test_rectangular(self):
        assert max_levels(128, 64) == int(math.floor(math.log2(64 / 4)))

    def test_non_power_of_two(self):
        # 48 = 3 * 16: 48 -> 24 -> 12 -> 6 stops before going under 4
        assert max_levels(48, 48) == 3
        assert max_levels(7, 64) == 0


class TestFilterBank:
    @pytest.mark.parametrize("K", [1, 2, 4, 16])
    def test_tiling(self, K):
        fb = filter_bank((64, 64), 4, K)
        assert fb.tiling_error() < 1e-10

    def test_tiling_pointwise_per_stage(self):
        fb = filter_bank((64, 64), 4, 16)
        np.testing.assert_allclose(fb.highpass0**2 + fb.lowpass0**2, 1.0, atol=1e-10)
        for lvl in range(4):
            total = fb.radial_low[lvl] ** 2 + sum(np.abs(fb.band_filter(lvl, k)) ** 2 for k in range(16))
            np.testing.assert_allclose(total, 1.0, atol=1e-10)

    def test_radial_low_formula(self):
        fb = filter_bank((64, 64), 1, 1)
        wy = 2 * np.pi * np.fft.fftfreq(64)
        r = np.hypot(wy[:, None], wy[None, :])
        expect = np.where(r <= np.pi / 4, 1.0, 0.0)
        mid = (r > np.pi / 4) & (r < np.pi / 2)
        expect[mid] = np.cos(np.pi / 2 * np.log2(4 * r[mid] / np.pi))
        np.testing.assert_allclose(fb.radial_low[0], expect, atol=1e-15)

    def test_depth_error(self):
        with pytest.raises(DepthError):
            filter_bank((64, 64), 5, 4)


class TestBuildSteerable:
    def test_structure(self, rng):
        p = build_steerable(rng.random((64, 64)), 4, 16)
        assert len(p.bands()) == 1 + 4 * 16 + 1
        for lvl, bands in enumerate(p.levels):
            assert all(b.shape == (64 >> lvl, 64 >> lvl) for b in bands)
        assert p.lowpass.shape == (4, 4)

    @pytest.mark.parametrize("tight", [True, False])
    def test_constant_lives_in_lowpass(self, tight):
        c = 2.5
        p = build_steerable(np.full((64, 64), c), 4, 16, tight_frame=tight)
        for band in p.bands()[:-1]:
            assert np.max(np.abs(band)) < 1e-10
        expect = c if not tight else c * 2**4
        np.testing.assert_allclose(p.lowpass, expect, atol=1e-10)

    def test_zero_image(self):
        p = build_steerable(np.zeros((64, 64)), 4, 16)
        assert all(np.all(b == 0) for b in p.bands())

    def test_energy_preserved(self, rng):
        x = rng.normal(size=(64, 64))
        p = build_steerable(x, 4, 16)
        e_in = float(np.sum(x**2))
        assert abs(p.energy() - e_in) <= 1e-8 * e_in

    def test_too_deep(self, rng):
        with pytest.raises(DepthError):
            build_steerable(rng.random((64, 64)), 5, 4)

    def test_non_finite(self):
        x = np.zeros((16, 16))
        x[3, 3] = np.nan
        with pytest.raises(PyramidError):
            build_steerable(x, 1, 4)


class TestReconstructSteerable:
    @pytest.mark.parametrize("L", [1, 2, 3, 4])
    @pytest.mark.parametrize("K", [1, 2, 4, 16])
    def test_round_trip(self, rng, L, K):
        x = rng.random((64, 64)) * 10
        y = reconstruct_steerable(build_steerable(x, L, K))
        assert np.max(np.abs(y - x)) < 1e-6 * np.max(np.abs(x))

    def test_round_trip_rectangular(self, rng):
        x = rng.random((32, 64))
        y = reconstruct_steerable(build_steerable(x, max_levels(64, 32), 4))
        assert np.max(np.abs(y - x)) < 1e-10

    def test_zero_pyramid(self):
        p = build_steerable(np.zeros((64, 64)), 4, 16)
        assert np.all(reconstruct_steerable(p) == 0)

    def test_lowpass_only(self):
        template = build_steerable(np.zeros((64, 64)), 4, 16, tight_frame=False)
        bands = [np.zeros_like(b) for b in template.bands()]
        bands[-1] = np.full_like(bands[-1], 3.0)
        y = reconstruct_steerable(template.replace_bands(bands))
        assert abs(y.mean() - 3.0) < 1e-8

    def test_inconsistent_shapes(self, rng):
        p = build_steerable(rng.random((64, 64)), 2, 4)
        bad = SteerablePyramid(p.highpass, p.levels, np.zeros((8, 8)), 4)
        with pytest.raises(PyramidError):
            reconstruct_steerable(bad)
        bad = SteerablePyramid(p.highpass, [p.levels[0], p.levels[0]], p.lowpass, 4)
        with pytest.raises(PyramidError):
            reconstruct_steerable(bad)

    @pytest.mark.parametrize("shift", [(1, 0), (0, 1), (3, -5)])
    def test_commutes_with_circular_shift(self, rng, shift):
        x = rng.random((64, 64))
        y = reconstruct_steerable(build_steerable(x, 4, 16))
        ys = reconstruct_steerable(build_steerable(np.roll(x, shift, axis=(0, 1)), 4, 16))
        np.testing.assert_allclose(ys, np.roll(y, shift, axis=(0, 1)), atol=1e-10)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.sampled_from([1, 2, 4, 16]))
    def test_round_trip_property(self, seed, L, K):
        x = np.random.default_rng(seed).normal(size=(64, 64))
        y = reconstruct_steerable(build_steerable(x, L, K))
        assert np.max(np.abs(y - x)) < 1e-6 * np.max(np.abs(x))


class TestLaplacian:
    def test_impulse_depth_one(self):
        x = np.zeros((8, 8))
        x[3, 4] = 1.0
        p = build_laplacian(x, 1)
        assert p.depth == 1 and p.base.shape == (4, 4)
        np.testing.assert_allclose(reconstruct_laplacian(p), x, atol=1e-15)

    def test_constant_has_no_detail(self):
        p = build_laplacian(np.full((16, 16), 7.0), 2)
        for d in p.details:
            assert np.max(np.abs(d)) < 1e-10
        np.testing.assert_allclose(p.base, 7.0, atol=1e-10)

    def test_random_depth_two(self, rng):
        x = rng.random((16, 16))
        p = build_laplacian(x, 2)
        assert [d.shape for d in p.details] == [(16, 16), (8, 8)]
        assert p.base.shape == (4, 4)
        assert np.max(np.abs(reconstruct_laplacian(p) - x)) < 1e-10

    def test_depth_zero_is_identity(self, rng):
        x = rng.random((4, 4))
        p = build_laplacian(x, 0)
        assert p.details == [] and np.array_equal(p.base, x)
        assert np.array_equal(reconstruct_laplacian(p), x)

    def test_depth_error(self, rng):
        with pytest.raises(DepthError):
            build_laplacian(rng.random((8, 8)), 2)

    def test_bad_chain(self):
        with pytest.raises(PyramidError):
            reconstruct_laplacian(LaplacianPyramid([np.zeros((8, 8))], np.zeros((3, 3))))
