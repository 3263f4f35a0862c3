"""Procedural toy scenes: geometric foregrounds with soft alpha over smooth
textured backgrounds.

Used by the test suite and the demo scripts to exercise the full pipeline at
desk scale without any external dataset.
"""

import numpy as np

from .augment import MatteAsset, SynExample, make_syn_example
from .core import composite
from .preprocess import gaussian_blur


def textured_background(size: int, rng: np.random.Generator) -> np.ndarray:
    """Smooth low-frequency color texture with mild fine grain."""
    coarse = rng.random((max(2, size // 16), max(2, size // 16), 3))
    bg = np.stack(
        [
            np.kron(coarse[..., c], np.ones((size, size)))[:size, :size]
            for c in range(3)
        ],
        axis=-1,
    )
    bg = np.stack([gaussian_blur(bg[..., c], sigma=max(2.0, size / 32)) for c in range(3)], -1)
    grain = rng.normal(0.0, 0.02, size=(size, size, 3))
    return np.clip(0.15 + 0.7 * bg + grain, 0.0, 1.0).astype(np.float32)


def _ellipse_mask(size: int, rng: np.random.Generator) -> np.ndarray:
    cy = size * rng.uniform(0.35, 0.65)
    cx = size * rng.uniform(0.35, 0.65)
    ay = size * rng.uniform(0.18, 0.30)
    ax = size * rng.uniform(0.18, 0.30)
    theta = rng.uniform(0.0, np.pi)
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    dy, dx = ys - cy, xs - cx
    u = np.cos(theta) * dx + np.sin(theta) * dy
    v = -np.sin(theta) * dx + np.cos(theta) * dy
    return ((u / ax) ** 2 + (v / ay) ** 2 <= 1.0).astype(np.float32)


def geometric_asset(size: int, rng: np.random.Generator, asset_id: str = "") -> MatteAsset:
    """One elliptical cutout: saturated shaded color, blur-softened alpha."""
    mask = _ellipse_mask(size, rng)
    alpha = gaussian_blur(mask, sigma=max(1.5, size / 64))
    color = rng.uniform(0.2, 1.0, size=3)
    ys = np.linspace(0.75, 1.0, size)[:, None]
    fg = np.clip(color[None, None, :] * ys[..., None], 0.0, 1.0)
    fg = np.broadcast_to(fg, (size, size, 3)).astype(np.float32).copy()
    return MatteAsset(fg=fg, alpha=alpha, id=asset_id)


def toy_syn_examples(count: int, size: int, seed: int) -> list:
    """Fixed list of synthetic composites with full augmentation applied."""
    rng = np.random.default_rng(seed)
    examples = []
    for i in range(count):
        asset = geometric_asset(2 * size, rng, asset_id=f"toy{i:03d}")
        bg = textured_background(2 * size, rng)
        examples.append(
            make_syn_example(asset, bg, size, np.random.default_rng(seed + 1000 + i), key=f"ex{i:03d}")
        )
    return examples


def toy_scene(size: int, rng: np.random.Generator) -> dict:
    """A capture-style scene: frame with subject, clean plate, segmenter-like
    probability map, and the ground truth used to build them."""
    bg = textured_background(size, rng)
    asset = geometric_asset(size, rng)
    frame = composite(asset.fg, asset.alpha, bg)
    prob = gaussian_blur((asset.alpha > 0.5).astype(np.float32), sigma=2.0)
    return {
        "frame": frame.astype(np.float32),
        "plate": bg,
        "prob": prob,
        "alpha_gt": asset.alpha,
        "fg_gt": asset.fg,
    }


def write_toy_assets(assets_dir, count: int, size: int, seed: int) -> None:
    """assets/<id>/{fg,alpha}.png layout consumed by synth-dataset."""
    from pathlib import Path

    from . import imgio

    rng = np.random.default_rng(seed)
    for i in range(count):
        asset = geometric_asset(size, rng, asset_id=f"asset{i:03d}")
        sub = Path(assets_dir) / asset.id
        sub.mkdir(parents=True, exist_ok=True)
        imgio.write_image(sub / "fg.png", asset.fg)
        imgio.write_map16(sub / "alpha.png", asset.alpha)


def write_toy_backgrounds(bg_dir, count: int, size: int, seed: int) -> None:
    from pathlib import Path

    from . import imgio

    rng = np.random.default_rng(seed)
    Path(bg_dir).mkdir(parents=True, exist_ok=True)
    for i in range(count):
        imgio.write_image(Path(bg_dir) / f"bg{i:03d}.png", textured_background(size, rng))


def toy_capture(n_frames: int, size: int, rng: np.random.Generator) -> dict:
    """A capture session: one static background, a subject that differs per
    frame, segmenter-like probability maps, and ground-truth alphas."""
    plate = textured_background(size, rng)
    frames, probs, alphas, fgs = [], [], [], []
    for _ in range(n_frames):
        asset = geometric_asset(size, rng)
        frames.append(composite(asset.fg, asset.alpha, plate).astype(np.float32))
        probs.append(gaussian_blur((asset.alpha > 0.5).astype(np.float32), sigma=2.0))
        alphas.append(asset.alpha)
        fgs.append(asset.fg)
    return {"plate": plate, "frames": frames, "probs": probs, "alphas": alphas, "fgs": fgs}


def write_toy_capture(capture_dir, n_frames: int, size: int, seed: int) -> dict:
    """Capture session layout (frames/, background.png, prob/); ground-truth
    alphas are also written to a gt_alpha/ directory for evaluation."""
    from pathlib import Path

    from . import imgio

    capture_dir = Path(capture_dir)
    (capture_dir / "frames").mkdir(parents=True, exist_ok=True)
    (capture_dir / "prob").mkdir(parents=True, exist_ok=True)
    (capture_dir / "gt_alpha").mkdir(parents=True, exist_ok=True)
    session = toy_capture(n_frames, size, np.random.default_rng(seed))
    imgio.write_image(capture_dir / "background.png", session["plate"])
    for i in range(n_frames):
        name = f"{i:04d}.png"
        imgio.write_image(capture_dir / "frames" / name, session["frames"][i])
        imgio.write_map16(capture_dir / "prob" / name, session["probs"][i])
        imgio.write_map16(capture_dir / "gt_alpha" / name, session["alphas"][i])
    return session
