"""Synthetic-composite training data: crops, flips, background perturbation,
segmentation degradation, and motion-cue synthesis.

Every operation takes an explicit numpy Generator so datasets are exactly
reproducible from (asset id, background id, seed).  Random scalars are drawn
in a fixed, documented order, which also lets tests script individual draws.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from .core import composite, to_grayscale
from .preprocess import (
    affine_homography,
    dilate,
    erode,
    gaussian_blur,
    resize_bilinear,
    warp_background,
)

# Noise amplitudes are specified in 8-bit units; rasters live in [0,1].
U8 = 255.0

# Training-time background-noise region: this many dilation steps around the
# foreground.
NOISE_REGION_DILATE_STEPS = 10


class EmptyAlphaError(RuntimeError):
    """Asset crop kept coming up with an empty alpha; skip this asset."""


@dataclass
class MatteAsset:
    """Ground-truth foreground color and alpha matte for one cutout."""

    fg: np.ndarray
    alpha: np.ndarray
    id: str = ""


@dataclass
class SynExample:
    """One synthetic composite: the composed image, true and perturbed
    backgrounds, degraded segmentation, motion stack, and ground truth."""

    img: np.ndarray
    bg_true: np.ndarray
    bg_input: np.ndarray
    seg: np.ndarray
    motion: np.ndarray
    fg_gt: np.ndarray
    alpha_gt: np.ndarray
    key: str = ""


def derive_seed(global_seed: int, *parts) -> int:
    """Stable per-example seed from a global seed and string/int parts."""
    digest = hashlib.sha256(repr((global_seed,) + parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def example_key(asset_id: str, bg_id: str) -> str:
    return f"{asset_id}__{bg_id}"


def perturb_background_train(
    bg: np.ndarray, fg_region: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Training-time plate perturbation: with p=0.5 a gamma correction
    gamma~N(1,0.12) (clamped to [0.5,2]), otherwise Gaussian noise with
    mu~U[-7,7]/255 and sigma~U[2,6]/255 added around the foreground region.

    Draw order: branch, then (gamma) or (mu, sigma, noise field).
    """
    if rng.random() < 0.5:
        gamma = float(np.clip(rng.normal(1.0, 0.12), 0.5, 2.0))
        return np.clip(bg**gamma, 0.0, 1.0)
    mu = rng.uniform(-7.0, 7.0) / U8
    sigma = rng.uniform(2.0, 6.0) / U8
    noise = rng.normal(mu, sigma, size=bg.shape)
    region = dilate(fg_region, NOISE_REGION_DILATE_STEPS)[..., None]
    return np.clip(bg + noise * region, 0.0, 1.0).astype(bg.dtype, copy=False)


def perturb_background_eval(bg: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Evaluation-time plate perturbation: small affine (translate N(0,3) px,
    rotate N(0,1.3 deg), scale N(1,0.01), shear N(0,0.01)), then gamma
    N(1,0.12), then full-frame noise mu~U[-5,5]/255, sigma~U[2,4]/255.

    Draw order: tx, ty, rot, scale, shear, gamma, mu, sigma, noise field.
    """
    tx = rng.normal(0.0, 3.0)
    ty = rng.normal(0.0, 3.0)
    rot = rng.normal(0.0, 1.3)
    scale = rng.normal(1.0, 0.01)
    shear = rng.normal(0.0, 0.01)
    h, w = bg.shape[:2]
    hom = affine_homography(
        translate=(tx, ty),
        rotate_deg=rot,
        scale=scale,
        shear=shear,
        center=((w - 1) / 2.0, (h - 1) / 2.0),
    )
    out = warp_background(bg, hom, (h, w))
    gamma = max(float(rng.normal(1.0, 0.12)), 0.05)  # guard absurd draws
    out = out**gamma
    mu = rng.uniform(-5.0, 5.0) / U8
    sigma = rng.uniform(2.0, 4.0) / U8
    noise = rng.normal(mu, sigma, size=out.shape)
    return np.clip(out + noise, 0.0, 1.0).astype(bg.dtype, copy=False)


def degrade_segmentation(alpha_gt: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Simulate sloppy person segmentation: threshold the matte, erode
    U{10..20}, dilate U{15..30}, blur with sigma drawn from {3,5,7}.

    Draw order: erode steps, dilate steps, sigma.
    """
    k1 = int(rng.integers(10, 21))
    k2 = int(rng.integers(15, 31))
    sigma = float(rng.choice(np.array([3.0, 5.0, 7.0])))
    return gaussian_blur(dilate(erode(alpha_gt, k1), k2), sigma)


def synth_motion_stack(
    asset: MatteAsset, bg: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Fake temporal cue: four independent small affines (translate N(0,5)
    px, rotate N(0,2 deg)) of the cutout composited over bg, grayscaled.

    Draw order per slot: tx, ty, rot.
    """
    h, w = bg.shape[:2]
    center = ((w - 1) / 2.0, (h - 1) / 2.0)
    slots = []
    for _ in range(4):
        tx = rng.normal(0.0, 5.0)
        ty = rng.normal(0.0, 5.0)
        rot = rng.normal(0.0, 2.0)
        hom = affine_homography(translate=(tx, ty), rotate_deg=rot, center=center)
        wf = warp_background(asset.fg, hom, (h, w))
        wa = warp_background(asset.alpha, hom, (h, w), border="zero")
        slots.append(to_grayscale(composite(wf, wa, bg)))
    return np.stack(slots, axis=0)


def _random_crop(arr_h: int, arr_w: int, side: int, rng: np.random.Generator):
    top = int(rng.integers(0, arr_h - side + 1))
    left = int(rng.integers(0, arr_w - side + 1))
    return top, left


def _ensure_min_side(fg, alpha, out_size):
    h, w = alpha.shape
    if min(h, w) >= out_size:
        return fg, alpha
    s = out_size / min(h, w)
    size = (max(out_size, int(round(h * s))), max(out_size, int(round(w * s))))
    return resize_bilinear(fg, size), resize_bilinear(alpha, size)


def make_syn_example(
    asset: MatteAsset, bg: np.ndarray, out_size: int, rng: np.random.Generator, key: str = ""
) -> SynExample:
    """Build one SynExample at out_size x out_size.

    The cutout gets a random crop (side U{out_size..2*out_size}), rescale and
    horizontal flip; the background gets an independent random crop.  The
    composite uses the true background B while the network input carries the
    perturbed B'.  Raises EmptyAlphaError when 10 crops in a row miss the
    foreground.
    """
    fg, alpha = _ensure_min_side(asset.fg, asset.alpha, out_size)
    ah, aw = alpha.shape
    max_side = min(2 * out_size, ah, aw)

    for attempt in range(10):
        side = int(rng.integers(out_size, max_side + 1))
        top, left = _random_crop(ah, aw, side, rng)
        crop_a = alpha[top : top + side, left : left + side]
        if crop_a.max() > 0.05:
            crop_f = fg[top : top + side, left : left + side]
            break
    else:
        raise EmptyAlphaError(f"asset {asset.id!r}: alpha empty after 10 crops")

    fg_gt = resize_bilinear(crop_f, (out_size, out_size))
    alpha_gt = resize_bilinear(crop_a, (out_size, out_size))
    if rng.random() < 0.5:
        fg_gt = fg_gt[:, ::-1].copy()
        alpha_gt = alpha_gt[:, ::-1].copy()

    bgf = bg
    if min(bg.shape[:2]) < out_size:
        s = out_size / min(bg.shape[:2])
        bgf = resize_bilinear(
            bg,
            (
                max(out_size, int(round(bg.shape[0] * s))),
                max(out_size, int(round(bg.shape[1] * s))),
            ),
        )
    bg_side = int(rng.integers(out_size, min(bgf.shape[:2]) + 1))
    top, left = _random_crop(bgf.shape[0], bgf.shape[1], bg_side, rng)
    bg_true = resize_bilinear(bgf[top : top + bg_side, left : left + bg_side], (out_size, out_size))

    bg_input = perturb_background_train(bg_true, alpha_gt, rng)
    seg = degrade_segmentation(alpha_gt, rng)
    motion = synth_motion_stack(MatteAsset(fg_gt, alpha_gt, asset.id), bg_true, rng)
    img = composite(fg_gt, alpha_gt, bg_true)

    return SynExample(
        img=img,
        bg_true=bg_true,
        bg_input=bg_input,
        seg=seg,
        motion=motion,
        fg_gt=fg_gt,
        alpha_gt=alpha_gt,
        key=key,
    )
