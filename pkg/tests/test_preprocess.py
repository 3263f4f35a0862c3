import warnings

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.extra.numpy import arrays

from bgmatte.preprocess import (
    TRIMAP_BG,
    TRIMAP_FG,
    TRIMAP_UNKNOWN,
    affine_homography,
    auto_trimap,
    build_motion_stack,
    crop_around_subject,
    dilate,
    erode,
    estimate_homography,
    gaussian_blur,
    identity_homography,
    refine_segmentation,
    resize_bilinear,
    trimap_from_alpha,
    warp_background,
    SubjectNotFoundError,
)
from helpers import loop_dilate, loop_erode


class TestMorphology:
    def test_full_mask_is_erosion_fixed_point(self):
        # outside-of-frame counts as foreground for erosion
        m = np.ones((5, 5), np.float32)
        assert erode(m, 1).sum() == 25

    def test_interior_block_erodes_at_its_border(self):
        m = np.zeros((7, 7), np.float32)
        m[1:6, 1:6] = 1.0
        out = erode(m, 1)
        expected = np.zeros((7, 7), np.float32)
        expected[2:5, 2:5] = 1.0
        assert np.array_equal(out, expected)

    def test_zero_steps_is_thresholded_input(self):
        m = np.array([[0.2, 0.7], [0.5, 0.9]], np.float32)
        assert np.array_equal(erode(m, 0), np.array([[0, 1], [0, 1]], np.float32))
        assert np.array_equal(dilate(m, 0), np.array([[0, 1], [0, 1]], np.float32))

    def test_isolated_pixel_erodes_away(self):
        m = np.zeros((5, 5), np.float32)
        m[2, 2] = 1.0
        assert erode(m, 1).sum() == 0

    def test_dilate_center_pixel_gives_cross(self):
        m = np.zeros((5, 5), np.float32)
        m[2, 2] = 1.0
        expected = np.zeros((5, 5), np.float32)
        expected[2, 1:4] = 1.0
        expected[1:4, 2] = 1.0
        assert np.array_equal(dilate(m, 1), expected)

    def test_dilate_all_zeros_stays_empty(self):
        assert dilate(np.zeros((6, 6), np.float32), 4).sum() == 0

    def test_negative_steps_rejected(self):
        with pytest.raises(ValueError):
            erode(np.ones((3, 3)), -1)

    def test_matches_loop_oracle_on_random_grids(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            grid = (rng.random((12, 12)) > 0.6).astype(np.float32)
            steps = int(rng.integers(1, 4))
            assert np.array_equal(erode(grid, steps), loop_erode(grid, steps).astype(np.float32))
            assert np.array_equal(dilate(grid, steps), loop_dilate(grid, steps).astype(np.float32))


binary_grids = arrays(
    np.float32, (8, 8), elements=st.sampled_from([np.float32(0.0), np.float32(1.0)])
)


@settings(deadline=None, max_examples=30)
@given(m=binary_grids, k=st.integers(min_value=0, max_value=3))
def test_morphology_ordering(m, k):
    closing = erode(dilate(m, k), k)
    opening = dilate(erode(m, k), k)
    assert np.all(closing >= m)  # closing is extensive
    assert np.all(opening <= m)  # opening is anti-extensive


class TestGaussianBlur:
    def test_constant_image_unchanged(self):
        c = np.full((9, 9), 0.37, np.float32)
        assert np.abs(gaussian_blur(c, 5.0) - 0.37).max() < 1e-6

    def test_impulse_matches_sampled_kernel(self):
        sigma = 2.0
        radius = int(np.ceil(3 * sigma))
        n = 4 * radius + 1
        img = np.zeros((n, n), np.float32)
        img[n // 2, n // 2] = 1.0
        out = gaussian_blur(img, sigma)
        xs = np.arange(-radius, radius + 1, dtype=np.float64)
        k = np.exp(-0.5 * (xs / sigma) ** 2)
        k /= k.sum()
        expected = np.zeros((n, n))
        expected[
            n // 2 - radius : n // 2 + radius + 1, n // 2 - radius : n // 2 + radius + 1
        ] = np.outer(k, k)
        assert np.abs(out - expected).max() < 1e-4

    def test_mass_conserved_for_interior_support(self):
        rng = np.random.default_rng(1)
        img = np.zeros((64, 64), np.float32)
        img[24:40, 24:40] = rng.random((16, 16)).astype(np.float32)
        out = gaussian_blur(img, 3.0)
        assert abs(out.mean() - img.mean()) < 1e-4

    def test_sigma_must_be_positive(self):
        with pytest.raises(ValueError):
            gaussian_blur(np.zeros((4, 4)), 0.0)


class TestRefineSegmentation:
    def test_zero_prob_gives_zero(self):
        assert refine_segmentation(np.zeros((32, 32), np.float32)).max() == 0.0

    def test_all_one_prob_stays_one(self):
        out = refine_segmentation(np.ones((32, 32), np.float32))
        assert np.abs(out - 1.0).max() < 1e-6

    def test_rectangle_matches_composed_primitives(self):
        prob = np.zeros((64, 64), np.float32)
        prob[20:44, 16:48] = 1.0
        expected = gaussian_blur(dilate(erode(prob, 5), 10), 5.0)
        assert np.abs(refine_segmentation(prob) - expected).max() == 0.0


def _textured(seed, size=256):
    rng = np.random.default_rng(seed)
    base = rng.random((size, size, 3)).astype(np.float32)
    return np.stack([gaussian_blur(base[..., c], 1.0) for c in range(3)], -1).astype(np.float32)


def _project(h, pts):
    ph = np.c_[pts, np.ones(len(pts))]
    q = (h @ ph.T).T
    return q[:, :2] / q[:, 2:3]


class TestHomography:
    def test_identity_pair(self):
        tex = _textured(0)
        est = estimate_homography(tex, tex, seed=0)
        corners = np.array([[0, 0], [255, 0], [0, 255], [255, 255]], float)
        err = np.linalg.norm(_project(est, corners) - corners, axis=1)
        assert err.max() < 1e-2

    def test_recovers_known_translation(self):
        tex = _textured(1)
        h0 = affine_homography(translate=(5.0, 0.0), center=(127.5, 127.5))
        warped = warp_background(tex, h0, tex.shape[:2])
        est = estimate_homography(tex, warped, seed=0)
        corners = np.array([[0, 0], [255, 0], [0, 255], [255, 255]], float)
        err = np.linalg.norm(_project(est, corners) - _project(h0, corners), axis=1)
        assert err.max() < 0.5

    def test_textureless_falls_back_to_identity_with_warning(self):
        flat = np.full((96, 96, 3), 0.5, np.float32)
        with pytest.warns(UserWarning, match="identity"):
            est = estimate_homography(flat, flat, seed=0)
        assert np.array_equal(est, np.eye(3))

    def test_deterministic_for_fixed_seed(self):
        tex = _textured(2)
        warped = warp_background(
            tex, affine_homography(translate=(2.0, 3.0), rotate_deg=0.5, center=(127.5, 127.5)),
            tex.shape[:2],
        )
        a = estimate_homography(tex, warped, seed=7)
        b = estimate_homography(tex, warped, seed=7)
        assert np.array_equal(a, b)

    def test_small_images_rejected(self):
        small = np.zeros((32, 32, 3), np.float32)
        with pytest.raises(ValueError, match="64x64"):
            estimate_homography(small, small, seed=0)


class TestWarp:
    def test_identity_is_exact(self):
        img = _textured(3, 64)
        assert np.array_equal(warp_background(img, identity_homography(), (64, 64)), img)

    def test_integer_translation_matches_index_shift(self):
        img = _textured(4, 32)
        h = affine_homography(translate=(3.0, 0.0))
        out = warp_background(img, h, (32, 32))
        assert np.abs(out[:, 3:, :] - img[:, :-3, :]).max() == 0.0

    def test_round_trip_interior(self):
        # band-limited texture: two bilinear resamplings must nearly cancel
        rng = np.random.default_rng(5)
        base = rng.random((64, 64, 3)).astype(np.float32)
        img = np.stack([gaussian_blur(base[..., c], 2.0) for c in range(3)], -1).astype(np.float32)
        h = affine_homography(translate=(1.5, -2.0), rotate_deg=1.0, center=(31.5, 31.5))
        there = warp_background(img, h, (64, 64))
        back = warp_background(there, np.linalg.inv(h), (64, 64))
        assert np.abs(back[8:-8, 8:-8] - img[8:-8, 8:-8]).max() < 2e-2


class TestMotionStack:
    def test_single_frame_gives_four_copies(self):
        img = _textured(6, 16)
        stack = build_motion_stack([img], 0, 20)
        gray = np.stack([stack[0]] * 4)
        assert np.array_equal(stack, gray)

    def test_offsets_at_interval_20(self):
        frames = [np.full((8, 8, 3), (j % 100) / 100.0, np.float32) for j in range(100)]
        stack = build_motion_stack(frames, 50, 20)
        assert np.allclose(stack[:, 0, 0], [0.10, 0.30, 0.70, 0.90], atol=1e-6)

    def test_out_of_range_offsets_use_center_frame(self):
        frames = [np.full((8, 8, 3), j / 10.0, np.float32) for j in range(5)]
        stack = build_motion_stack(frames, 0, 20)
        assert np.allclose(stack[:, 0, 0], [0.0, 0.0, 0.0, 0.0], atol=1e-6)

    def test_empty_sequence_rejected(self):
        with pytest.raises(ValueError, match="nonempty"):
            build_motion_stack([], 0, 20)

    def test_constant_video_gives_identical_grays(self):
        frames = [np.full((8, 8, 3), 0.5, np.float32)] * 10
        stack = build_motion_stack(frames, 5, 2)
        assert np.array_equal(stack[0], stack[1])
        assert np.array_equal(stack[0], stack[3])


class TestCrop:
    def test_centered_subject_crop_center_matches_bbox_center(self):
        frame = np.zeros((1080, 1920, 3), np.float32)
        prob = np.zeros((1080, 1920), np.float32)
        prob[400:700, 800:1100] = 1.0  # bbox center (549, 949)
        crop, (top, left) = crop_around_subject(frame, prob, 512)
        assert (top + 256, left + 256) == (549, 949)
        assert crop.shape == (512, 512, 3)

    def test_edge_subject_clamps_in_frame(self):
        frame = np.zeros((100, 200, 3), np.float32)
        prob = np.zeros((100, 200), np.float32)
        prob[40:60, 0:10] = 1.0
        crop, (top, left) = crop_around_subject(frame, prob, 64)
        assert left == 0
        assert 0 <= top <= 100 - 64

    def test_size_equal_to_frame_height(self):
        frame = np.zeros((64, 128, 3), np.float32)
        prob = np.zeros((64, 128), np.float32)
        prob[30:40, 60:70] = 1.0
        crop, (top, left) = crop_around_subject(frame, prob, 64)
        assert top == 0 and crop.shape[0] == 64

    def test_no_subject_raises(self):
        with pytest.raises(SubjectNotFoundError):
            crop_around_subject(np.zeros((32, 32, 3)), np.zeros((32, 32)), 16)

    def test_oversized_crop_rejected(self):
        prob = np.ones((32, 32), np.float32)
        with pytest.raises(ValueError, match="resize"):
            crop_around_subject(np.zeros((32, 32, 3)), prob, 64)


class TestTrimaps:
    def test_all_one_prob_is_fg(self):
        assert np.all(auto_trimap(np.ones((4, 4))) == TRIMAP_FG)

    def test_half_prob_is_unknown(self):
        assert np.all(auto_trimap(np.full((4, 4), 0.5)) == TRIMAP_UNKNOWN)

    def test_documented_thresholds(self):
        prob = np.array([[0.96, 0.04, 0.5]])
        assert auto_trimap(prob).tolist() == [[TRIMAP_FG, TRIMAP_BG, TRIMAP_UNKNOWN]]

    def test_alpha_one_is_all_fg(self):
        assert np.all(trimap_from_alpha(np.ones((6, 6)), 2) == TRIMAP_FG)

    def test_alpha_zero_is_all_bg(self):
        assert np.all(trimap_from_alpha(np.zeros((6, 6)), 2) == TRIMAP_BG)

    def test_square_band_matches_loop_oracle(self):
        alpha = np.zeros((60, 60), np.float32)
        alpha[20:40, 20:40] = 1.0
        tri = trimap_from_alpha(alpha, 2)
        inner = loop_erode(alpha, 2)
        outer = loop_dilate(alpha, 2)
        assert np.array_equal(tri == TRIMAP_FG, inner == 1)
        assert np.array_equal(tri == TRIMAP_UNKNOWN, (outer == 1) & (inner == 0))
        # band is two pixels wide on each side of the square edge
        assert tri[30, 18] == TRIMAP_UNKNOWN and tri[30, 17] == TRIMAP_BG
        assert tri[30, 21] == TRIMAP_UNKNOWN and tri[30, 22] == TRIMAP_FG

    def test_steps_must_be_positive(self):
        with pytest.raises(ValueError):
            trimap_from_alpha(np.ones((4, 4)), 0)


@settings(deadline=None, max_examples=30)
@given(prob=arrays(np.float32, (6, 6), elements=st.floats(min_value=0.0, max_value=1.0, width=32)))
def test_auto_trimap_partitions_every_pixel(prob):
    tri = auto_trimap(prob)
    assert np.isin(tri, [TRIMAP_BG, TRIMAP_UNKNOWN, TRIMAP_FG]).all()


@settings(deadline=None, max_examples=20)
@given(
    alpha=arrays(np.float32, (8, 8), elements=st.floats(min_value=0.0, max_value=1.0, width=32)),
    steps=st.integers(min_value=1, max_value=3),
)
def test_trimap_from_alpha_partitions_every_pixel(alpha, steps):
    tri = trimap_from_alpha(alpha, steps)
    assert np.isin(tri, [TRIMAP_BG, TRIMAP_UNKNOWN, TRIMAP_FG]).all()


def test_resize_bilinear_shapes():
    img = np.random.default_rng(0).random((10, 20, 3)).astype(np.float32)
    assert resize_bilinear(img, (5, 10)).shape == (5, 10, 3)
    assert resize_bilinear(img[..., 0], (20, 40)).shape == (20, 40)
