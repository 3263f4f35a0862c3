"""Compositing algebra on [0,1] float rasters.

Color images are numpy arrays of shape (H, W, 3); single-channel rasters
(alpha mattes, grayscale frames, soft segmentations) are (H, W).  All
operations here are pure, dtype-preserving (float32 or float64) and never
touch disk.
"""

import numpy as np

# Rec.601 luma weights for grayscale conversion.
GRAY_WEIGHTS = (0.299, 0.587, 0.114)

# Below this alpha the matting-equation inversion is numerically
# meaningless; solve_foreground falls back to F = I there.
DEFAULT_ALPHA_EPS = 1e-3


class ShapeMismatchError(ValueError):
    """Raised when rasters passed to one operation disagree on spatial size."""


def check_image(img: np.ndarray, name: str = "image") -> None:
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"{name} must have shape (H, W, 3), got {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"{name} must be at least 1x1, got {img.shape}")
    lo, hi = float(img.min()), float(img.max())
    if lo < 0.0 or hi > 1.0:
        raise ValueError(f"{name} values must lie in [0,1], got range [{lo}, {hi}]")


def check_map(m: np.ndarray, name: str = "map") -> None:
    if m.ndim != 2:
        raise ValueError(f"{name} must have shape (H, W), got {m.shape}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must be at least 1x1, got {m.shape}")
    lo, hi = float(m.min()), float(m.max())
    if lo < 0.0 or hi > 1.0:
        raise ValueError(f"{name} values must lie in [0,1], got range [{lo}, {hi}]")


def check_same_size(named_rasters) -> None:
    """Raise ShapeMismatchError naming the first dimension that disagrees."""
    items = list(named_rasters)
    ref_name, ref = items[0]
    for name, r in items[1:]:
        if r.shape[0] != ref.shape[0]:
            raise ShapeMismatchError(
                f"height mismatch: {ref_name} has {ref.shape[0]} rows, "
                f"{name} has {r.shape[0]}"
            )
        if r.shape[1] != ref.shape[1]:
            raise ShapeMismatchError(
                f"width mismatch: {ref_name} has {ref.shape[1]} columns, "
                f"{name} has {r.shape[1]}"
            )


def composite(fg: np.ndarray, alpha: np.ndarray, bg: np.ndarray) -> np.ndarray:
    """I = alpha*F + (1-alpha)*B elementwise; stays in [0,1] by construction."""
    check_same_size([("fg", fg), ("alpha", alpha), ("bg", bg)])
    a = alpha[..., None]
    return a * fg + (1.0 - a) * bg


def composite_residual(
    img: np.ndarray, fg: np.ndarray, alpha: np.ndarray, bg: np.ndarray
) -> np.ndarray:
    """Per-pixel absolute residual |I - alpha*F - (1-alpha)*B| (no reduction)."""
    check_same_size([("img", img), ("fg", fg), ("alpha", alpha), ("bg", bg)])
    a = alpha[..., None]
    # grouped like composite() so exact recompositions give exactly zero
    return np.abs(img - (a * fg + (1.0 - a) * bg))


def solve_foreground(
    img: np.ndarray,
    alpha: np.ndarray,
    bg: np.ndarray,
    eps: float = DEFAULT_ALPHA_EPS,
) -> np.ndarray:
    """Invert the compositing equation for F, clamped to [0,1] per channel.

    Where alpha <= eps the division is meaningless and F = I is returned
    instead.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    check_same_size([("img", img), ("alpha", alpha), ("bg", bg)])
    a = alpha[..., None]
    safe_a = np.where(a > eps, a, 1.0)
    solved = np.clip((img - (1.0 - a) * bg) / safe_a, 0.0, 1.0)
    return np.where(a > eps, solved, img)


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Rec.601 luma: 0.299 R + 0.587 G + 0.114 B."""
    check_image(img)
    r, g, b = GRAY_WEIGHTS
    return r * img[..., 0] + g * img[..., 1] + b * img[..., 2]
