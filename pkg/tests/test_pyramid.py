import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tempofuse.pyramid import (
    GAUSSIAN,
    LAPLACIAN,
    ImagePyramid,
    PyramidError,
    blend_pyramids,
    default_depth,
    gaussian_pyramid,
    laplacian_pyramid,
    max_depth,
    reconstruct,
)

BINOMIAL = [1, 4, 6, 4, 1]


def _mirror(i, n):
    while i < 0 or i >= n:
        i = -i if i < 0 else 2 * (n - 1) - i
    return i


def blur_downsample_oracle(img):
    """Direct 5x5 convolution with mirrored indices, then 2x decimation."""
    rows, cols = img.shape
    out = np.zeros(((rows + 1) // 2, (cols + 1) // 2))
    for r in range(0, rows, 2):
        for c in range(0, cols, 2):
            acc = 0.0
            for dr in range(-2, 3):
                for dc in range(-2, 3):
                    w = BINOMIAL[dr + 2] * BINOMIAL[dc + 2] / 256.0
                    acc += w * img[_mirror(r + dr, rows), _mirror(c + dc, cols)]
            out[r // 2, c // 2] = acc
    return out


class TestDepth:
    @pytest.mark.parametrize(
        "shape, expected", [((8, 8), 4), ((1, 9), 1), ((131, 257), 8), ((7, 100), 3), ((2, 2), 2)]
    )
    def test_max_depth(self, shape, expected):
        assert max_depth(shape) == expected == math.floor(math.log2(min(shape))) + 1

    def test_default_depth(self):
        assert default_depth((64, 64)) == 6
        assert default_depth((1, 1)) == 1

    def test_too_deep_names_both_values(self, rng):
        with pytest.raises(PyramidError, match=r"depth 5 .*max_depth is 4"):
            gaussian_pyramid(rng.random((8, 8)), 5)

    def test_zero_depth(self, rng):
        with pytest.raises(PyramidError):
            laplacian_pyramid(rng.random((8, 8)), 0)


class TestGaussianPyramid:
    def test_constant(self):
        pyr = gaussian_pyramid(np.full((16, 12), 0.5), 3)
        for level in pyr:
            np.testing.assert_allclose(level, 0.5, atol=1e-15)

    def test_depth_one_is_identity(self, rng):
        img = rng.random((5, 7, 3))
        pyr = gaussian_pyramid(img, 1)
        assert pyr.depth == 1 and np.array_equal(pyr[0], img)

    def test_impulse_against_direct_convolution(self):
        img = np.zeros((8, 8))
        img[3, 4] = 1.0
        pyr = gaussian_pyramid(img, 2)
        np.testing.assert_allclose(pyr[1], blur_downsample_oracle(img), atol=1e-15)

    def test_random_odd_image_against_direct_convolution(self, rng):
        img = rng.random((9, 7))
        np.testing.assert_allclose(gaussian_pyramid(img, 2)[1], blur_downsample_oracle(img), atol=1e-14)

    @given(st.integers(1, 70), st.integers(1, 70))
    def test_ceil_halving(self, rows, cols):
        img = np.zeros((rows, cols))
        pyr = gaussian_pyramid(img, max_depth(img.shape))
        for fine, coarse in zip(pyr.levels, pyr.levels[1:]):
            assert coarse.shape == ((fine.shape[0] + 1) // 2, (fine.shape[1] + 1) // 2)


class TestLaplacianPyramid:
    def test_constant_has_no_band_energy(self):
        pyr = laplacian_pyramid(np.full((13, 21, 3), 0.3), 4)
        for level in pyr.levels[:-1]:
            np.testing.assert_allclose(level, 0.0, atol=1e-15)
        np.testing.assert_allclose(pyr.levels[-1], 0.3, atol=1e-15)

    def test_depth_one(self, rng):
        img = rng.random((6, 6, 3))
        pyr = laplacian_pyramid(img, 1)
        assert pyr.kind == LAPLACIAN and np.array_equal(pyr[0], img)

    def test_round_trip_16(self, rng):
        img = rng.random((16, 16, 3))
        assert np.abs(reconstruct(laplacian_pyramid(img, 4)) - img).max() < 1e-6

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 40), st.integers(1, 40), st.integers(0, 2**32 - 1), st.data())
    def test_round_trip_any_size(self, rows, cols, seed, data):
        img = np.random.default_rng(seed).random((rows, cols))
        depth = data.draw(st.integers(1, max_depth(img.shape)))
        assert np.abs(reconstruct(laplacian_pyramid(img, depth)) - img).max() < 1e-6


class TestReconstruct:
    def test_constant(self):
        img = np.full((10, 10, 3), 0.7)
        np.testing.assert_allclose(reconstruct(laplacian_pyramid(img, 3)), img, atol=1e-15)

    def test_single_level(self, rng):
        level = rng.random((4, 4))
        assert np.array_equal(reconstruct(ImagePyramid((level,), LAPLACIAN)), level)

    def test_rejects_gaussian(self, rng):
        with pytest.raises(PyramidError, match="laplacian"):
            reconstruct(gaussian_pyramid(rng.random((8, 8)), 2))


def _ones_pyramid(shape, depth, value=1.0):
    return gaussian_pyramid(np.full(shape, value), depth)


class TestBlend:
    def test_identity_blend(self, rng):
        lp = laplacian_pyramid(rng.random((16, 16, 3)), 3)
        out = blend_pyramids([lp], [_ones_pyramid((16, 16), 3)])
        for a, b in zip(out, lp):
            np.testing.assert_allclose(a, b, atol=1e-15)

    def test_selector(self, rng):
        a = laplacian_pyramid(rng.random((16, 16, 3)), 3)
        b = laplacian_pyramid(rng.random((16, 16, 3)), 3)
        out = blend_pyramids([a, b], [_ones_pyramid((16, 16), 3, 0.0), _ones_pyramid((16, 16), 3)])
        for x, y in zip(out, b):
            np.testing.assert_allclose(x, y, atol=1e-15)

    def test_convex_combination(self, rng):
        a = laplacian_pyramid(rng.random((20, 12, 3)), 3)
        b = laplacian_pyramid(rng.random((20, 12, 3)), 3)
        out = blend_pyramids(
            [a, b], [_ones_pyramid((20, 12), 3, 0.25), _ones_pyramid((20, 12), 3, 0.75)]
        )
        for lvl in range(3):
            expected = np.empty_like(a[lvl])
            for idx in np.ndindex(*a[lvl].shape):
                expected[idx] = 0.25 * a[lvl][idx] + 0.75 * b[lvl][idx]
            np.testing.assert_allclose(out[lvl], expected, atol=1e-14)

    def test_linear_in_images(self, rng):
        w = [gaussian_pyramid(rng.random((16, 16)), 3) for _ in range(2)]
        x = [laplacian_pyramid(rng.random((16, 16, 3)), 3) for _ in range(2)]
        y = laplacian_pyramid(rng.random((16, 16, 3)), 3)
        combo = ImagePyramid(tuple(2.0 * p + 3.0 * q for p, q in zip(x[0], y)), LAPLACIAN)
        lhs = blend_pyramids([combo, x[1]], w)
        r1 = blend_pyramids([x[0], x[1]], w)
        r2 = blend_pyramids([y, x[1]], w)
        r0 = blend_pyramids([x[1]], [w[1]])
        for lvl in range(3):
            # f(2x + 3y) = 2 f(x) + 3 f(y) - 4 * (contribution of the fixed second pair)
            np.testing.assert_allclose(lhs[lvl], 2 * r1[lvl] + 3 * r2[lvl] - 4 * r0[lvl], atol=1e-12)

    def test_partition_of_unity_passthrough(self, rng):
        img = laplacian_pyramid(rng.random((24, 18, 3)), 4)
        raw = rng.random((3, 24, 18))
        raw /= raw.sum(axis=0)
        out = blend_pyramids([img] * 3, [gaussian_pyramid(w, 4) for w in raw])
        for a, b in zip(out, img):
            assert np.abs(a - b).max() < 1e-6

    def test_empty(self):
        with pytest.raises(PyramidError):
            blend_pyramids([], [])

    def test_mismatch_names_level(self, rng):
        a = laplacian_pyramid(rng.random((16, 16, 3)), 3)
        lv = list(gaussian_pyramid(np.ones((16, 16)), 3).levels)
        lv[2] = np.ones((3, 3))
        with pytest.raises(PyramidError, match="level 2"):
            blend_pyramids([a], [ImagePyramid(tuple(lv), GAUSSIAN)])

    def test_count_mismatch(self, rng):
        a = laplacian_pyramid(rng.random((8, 8, 3)), 2)
        with pytest.raises(PyramidError):
            blend_pyramids([a, a], [_ones_pyramid((8, 8), 2)])
