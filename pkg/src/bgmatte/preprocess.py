"""Capture preprocessing: segmentation refinement, background-plate
alignment, motion-cue stacks, subject crops, and trimap generation.

Masks and probability maps are (H, W) float rasters in [0,1]; trimaps are
(H, W) uint8 label rasters using the TRIMAP_* constants below.  Homographies
are 3x3 float64 matrices normalized so H[2,2] == 1, mapping source pixel
coordinates (x, y) to destination coordinates.
"""

import math
import warnings

import cv2
import numpy as np
from scipy import ndimage

from .core import ShapeMismatchError, check_same_size, to_grayscale

TRIMAP_BG = 0
TRIMAP_UNKNOWN = 1
TRIMAP_FG = 2

# 3x3 cross structuring element; one morphology "step" = one iteration.
CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)

RANSAC_THRESHOLD_PX = 3.0
RANSAC_ITERATIONS = 1000
MIN_MATCHES = 8


class AlignmentError(RuntimeError):
    """Background-plate alignment produced a degenerate homography."""


class SubjectNotFoundError(RuntimeError):
    """No pixel of the probability map exceeds 0.5."""


def _as_binary(mask: np.ndarray) -> np.ndarray:
    return mask > 0.5


def erode(mask: np.ndarray, steps: int) -> np.ndarray:
    """Binary erosion of mask>0.5 with a 3x3 cross, `steps` iterations.

    Pixels outside the frame count as foreground, so a full-frame mask is a
    fixed point of erosion.
    """
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    binary = _as_binary(mask)
    if steps > 0:
        binary = ndimage.binary_erosion(
            binary, structure=CROSS, iterations=steps, border_value=1
        )
    return binary.astype(np.float32)


def dilate(mask: np.ndarray, steps: int) -> np.ndarray:
    """Binary dilation of mask>0.5 with a 3x3 cross; outside counts as background."""
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    binary = _as_binary(mask)
    if steps > 0:
        binary = ndimage.binary_dilation(
            binary, structure=CROSS, iterations=steps, border_value=0
        )
    return binary.astype(np.float32)


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur, kernel radius ceil(3*sigma), reflected borders."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    radius = int(math.ceil(3.0 * sigma))
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-0.5 * (xs / sigma) ** 2)
    kernel /= kernel.sum()
    out = ndimage.convolve1d(img.astype(np.float64), kernel, axis=0, mode="mirror")
    out = ndimage.convolve1d(out, kernel, axis=1, mode="mirror")
    return np.clip(out, 0.0, 1.0).astype(np.float32)


def refine_segmentation(prob: np.ndarray) -> np.ndarray:
    """Person-probability map -> soft segmentation: threshold, erode 5,
    dilate 10, blur sigma=5."""
    return gaussian_blur(dilate(erode(prob, 5), 10), sigma=5.0)


def identity_homography() -> np.ndarray:
    return np.eye(3, dtype=np.float64)


def check_homography(h: np.ndarray) -> None:
    if h.shape != (3, 3):
        raise ValueError(f"homography must be 3x3, got {h.shape}")
    if abs(np.linalg.det(h)) <= 1e-8:
        raise AlignmentError("homography is not invertible (|det| <= 1e-8)")


def _to_u8_gray(img: np.ndarray) -> np.ndarray:
    return np.clip(to_grayscale(img) * 255.0, 0, 255).astype(np.uint8)


def _dlt(src_pts: np.ndarray, dst_pts: np.ndarray):
    """Normalized direct linear transform; None on degenerate systems."""

    def normalize(pts):
        c = pts.mean(axis=0)
        d = np.sqrt(((pts - c) ** 2).sum(axis=1)).mean() + 1e-12
        s = math.sqrt(2.0) / d
        t = np.array([[s, 0, -s * c[0]], [0, s, -s * c[1]], [0, 0, 1.0]])
        ph = np.hstack([pts, np.ones((len(pts), 1))])
        return (t @ ph.T).T[:, :2], t

    (xy, t0), (uv, t1) = normalize(src_pts), normalize(dst_pts)
    n = len(xy)
    x, y = xy[:, 0], xy[:, 1]
    u, v = uv[:, 0], uv[:, 1]
    zeros, ones = np.zeros(n), np.ones(n)
    a = np.zeros((2 * n, 9))
    a[0::2] = np.c_[x, y, ones, zeros, zeros, zeros, -u * x, -u * y, -u]
    a[1::2] = np.c_[zeros, zeros, zeros, -x, -y, -ones, v * x, v * y, v]
    if np.linalg.matrix_rank(a) < 8:
        return None
    _, _, vt = np.linalg.svd(a)
    hn = vt[-1].reshape(3, 3)
    if abs(hn[2, 2]) < 1e-12:
        return None
    h = np.linalg.inv(t1) @ hn @ t0
    if abs(h[2, 2]) < 1e-12:
        return None
    return h / h[2, 2]


def _project(h: np.ndarray, pts: np.ndarray) -> np.ndarray:
    ph = np.c_[pts, np.ones(len(pts))]
    q = (h @ ph.T).T
    return q[:, :2] / (q[:, 2:3] + 1e-12)


def estimate_homography(src: np.ndarray, dst: np.ndarray, seed: int) -> np.ndarray:
    """Feature-based homography mapping src coordinates to dst coordinates.

    ORB keypoints + Hamming matching, then seeded RANSAC (3 px inlier
    threshold, 1000 iterations) with a least-squares refit on the inliers.
    Falls back to identity (with a warning) when fewer than 8 matches
    survive; raises AlignmentError if the estimate is degenerate.
    """
    for name, img in (("src", src), ("dst", dst)):
        if img.shape[0] < 64 or img.shape[1] < 64:
            raise ValueError(f"{name} must be at least 64x64, got {img.shape[:2]}")

    orb = cv2.ORB_create(nfeatures=2000)
    kp0, des0 = orb.detectAndCompute(_to_u8_gray(src), None)
    kp1, des1 = orb.detectAndCompute(_to_u8_gray(dst), None)
    if des0 is None or des1 is None:
        warnings.warn("homography: no features detected, falling back to identity")
        return identity_homography()

    matcher = cv2.BFMatcher(cv2.NORM_HAMMING, crossCheck=True)
    matches = sorted(matcher.match(des0, des1), key=lambda m: m.distance)
    if len(matches) < MIN_MATCHES:
        warnings.warn(
            f"homography: only {len(matches)} matches, falling back to identity"
        )
        return identity_homography()

    pts0 = np.array([kp0[m.queryIdx].pt for m in matches], dtype=np.float64)
    pts1 = np.array([kp1[m.trainIdx].pt for m in matches], dtype=np.float64)

    rng = np.random.default_rng(seed)
    best_inliers = None
    best_count = 0
    for _ in range(RANSAC_ITERATIONS):
        idx = rng.choice(len(pts0), size=4, replace=False)
        h = _dlt(pts0[idx], pts1[idx])
        if h is None:
            continue
        err = np.linalg.norm(_project(h, pts0) - pts1, axis=1)
        inliers = err < RANSAC_THRESHOLD_PX
        count = int(inliers.sum())
        if count > best_count:
            best_count = count
            best_inliers = inliers

    if best_inliers is None or best_count < 4:
        raise AlignmentError("RANSAC found no valid homography model")
    h = _dlt(pts0[best_inliers], pts1[best_inliers])
    if h is None:
        raise AlignmentError("inlier refit is degenerate")
    check_homography(h)
    return h


def warp_background(bg: np.ndarray, h: np.ndarray, out_size, border: str = "replicate") -> np.ndarray:
    """Inverse-warp bg through h with bilinear sampling.

    Out-of-bounds samples replicate the nearest border pixel; border="zero"
    reads 0 instead (used when warping alpha layers).
    """
    check_homography(h)
    out_h, out_w = out_size
    hinv = np.linalg.inv(h)
    ys, xs = np.mgrid[0:out_h, 0:out_w].astype(np.float64)
    denom = hinv[2, 0] * xs + hinv[2, 1] * ys + hinv[2, 2]
    src_x = (hinv[0, 0] * xs + hinv[0, 1] * ys + hinv[0, 2]) / denom
    src_y = (hinv[1, 0] * xs + hinv[1, 1] * ys + hinv[1, 2]) / denom
    coords = np.stack([src_y, src_x])
    mode = {"replicate": "nearest", "zero": "constant"}[border]

    def sample(channel):
        return ndimage.map_coordinates(channel, coords, order=1, mode=mode, cval=0.0)

    if bg.ndim == 2:
        return sample(bg.astype(np.float64)).astype(bg.dtype, copy=False)
    out = np.stack([sample(bg[..., c].astype(np.float64)) for c in range(bg.shape[2])], axis=-1)
    return out.astype(bg.dtype, copy=False)


def affine_homography(
    translate=(0.0, 0.0),
    rotate_deg: float = 0.0,
    scale: float = 1.0,
    shear: float = 0.0,
    center=(0.0, 0.0),
) -> np.ndarray:
    """Affine map (as a homography) about `center`: shear, scale, rotate,
    then translate.  translate/center are (x, y) in pixels."""
    theta = math.radians(rotate_deg)
    rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    lin = scale * rot @ np.array([[1.0, shear], [0.0, 1.0]])
    c = np.asarray(center, dtype=np.float64)
    t = np.asarray(translate, dtype=np.float64)
    h = np.eye(3)
    h[:2, :2] = lin
    h[:2, 2] = c + t - lin @ c
    return h


def resize_bilinear(arr: np.ndarray, size) -> np.ndarray:
    """Bilinear resize to (height, width); works on (H,W) and (H,W,C)."""
    out_h, out_w = size
    out = cv2.resize(
        arr.astype(np.float32, copy=False), (out_w, out_h), interpolation=cv2.INTER_LINEAR
    )
    return out.astype(arr.dtype, copy=False)


def build_motion_stack(frames, index: int, interval: int) -> np.ndarray:
    """Grayscale stack (4, H, W) at offsets {-2T, -T, +T, +2T} around `index`.

    Offsets outside the sequence fall back to the center frame, so a
    single-frame sequence yields four copies of its grayscale.
    """
    n = len(frames)
    if n == 0:
        raise ValueError("frames must be a nonempty sequence")
    if interval < 1:
        raise ValueError(f"interval must be >= 1, got {interval}")
    if not 0 <= index < n:
        raise ValueError(f"index {index} outside sequence of length {n}")
    center_gray = None
    slots = []
    for offset in (-2 * interval, -interval, interval, 2 * interval):
        j = index + offset
        if 0 <= j < n:
            slots.append(to_grayscale(frames[j]))
        else:
            if center_gray is None:
                center_gray = to_grayscale(frames[index])
            slots.append(center_gray)
    return np.stack(slots, axis=0)


def crop_around_subject(frame: np.ndarray, prob: np.ndarray, size: int):
    """Square crop of side `size` centered on the bbox of prob>0.5, shifted
    to stay in-frame.  Returns (crop, (top, left)) for paste-back."""
    check_same_size([("frame", frame), ("prob", prob)])
    h, w = prob.shape
    if size > min(h, w):
        raise ValueError(
            f"crop size {size} exceeds frame dims {h}x{w}; resize the frame up first"
        )
    ys, xs = np.nonzero(prob > 0.5)
    if len(ys) == 0:
        raise SubjectNotFoundError("probability map has no pixel above 0.5")
    cy = (int(ys.min()) + int(ys.max())) // 2
    cx = (int(xs.min()) + int(xs.max())) // 2
    top = int(np.clip(cy - size // 2, 0, h - size))
    left = int(np.clip(cx - size // 2, 0, w - size))
    return frame[top : top + size, left : left + size], (top, left)


def auto_trimap(prob: np.ndarray) -> np.ndarray:
    """Threshold a person-probability map: >0.95 FG, <0.05 BG, else unknown."""
    tri = np.full(prob.shape, TRIMAP_UNKNOWN, dtype=np.uint8)
    tri[prob > 0.95] = TRIMAP_FG
    tri[prob < 0.05] = TRIMAP_BG
    return tri


def trimap_from_alpha(alpha: np.ndarray, steps: int) -> np.ndarray:
    """Trimap from a matte: binarize at 0.5, erode/dilate by `steps`; the
    band between them is unknown."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    inner = erode(alpha, steps) > 0.5
    outer = dilate(alpha, steps) > 0.5
    tri = np.full(alpha.shape, TRIMAP_BG, dtype=np.uint8)
    tri[outer & ~inner] = TRIMAP_UNKNOWN
    tri[inner] = TRIMAP_FG
    return tri
