"""Matte post-processing, SAD/MSE metrics, and composite rendering."""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import core

# Mattes are kept only inside the largest connected components of this
# level set.
ALPHA_KEEP_THRESHOLD = 0.05

# SAD is a pixel sum scaled to the conventional reporting magnitude; MSE is
# reported in units of 1e-2.
SAD_DIVISOR = 1000.0
MSE_SCALE = 100.0

# 4-connectivity for component labeling.
_CONNECTIVITY = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass
class ComponentLabeling:
    """Per-pixel component ids (0 = background) plus component sizes,
    indexed so sizes[i] is the pixel count of component id i+1."""

    labels: np.ndarray
    sizes: np.ndarray


def connected_components(mask: np.ndarray) -> ComponentLabeling:
    labels, count = ndimage.label(mask, structure=_CONNECTIVITY)
    sizes = np.bincount(labels.ravel(), minlength=count + 1)[1:]
    return ComponentLabeling(labels=labels, sizes=sizes)


def postprocess_alpha(alpha: np.ndarray, n_subjects: int) -> np.ndarray:
    """Zero the matte outside the n_subjects largest connected components of
    alpha > 0.05; ties broken toward the smaller component id."""
    if n_subjects < 1:
        raise ValueError(f"n_subjects must be >= 1, got {n_subjects}")
    comp = connected_components(alpha > ALPHA_KEEP_THRESHOLD)
    if len(comp.sizes) == 0:
        warnings.warn("postprocess_alpha: no component above threshold, matte is empty")
        return np.zeros_like(alpha)
    order = np.argsort(-comp.sizes, kind="stable")  # stable: equal sizes keep id order
    keep_ids = order[:n_subjects] + 1
    keep = np.isin(comp.labels, keep_ids)
    return np.where(keep, alpha, 0.0).astype(alpha.dtype, copy=False)


def sad(alpha: np.ndarray, gt: np.ndarray) -> float:
    """Sum of absolute differences over pixels, divided by 1000."""
    core.check_same_size([("alpha", alpha), ("gt", gt)])
    diff = np.abs(alpha.astype(np.float64) - gt.astype(np.float64))
    return float(diff.sum() / SAD_DIVISOR)


def mse(alpha: np.ndarray, gt: np.ndarray) -> float:
    """Mean squared error over pixels, reported in units of 1e-2."""
    core.check_same_size([("alpha", alpha), ("gt", gt)])
    diff = alpha.astype(np.float64) - gt.astype(np.float64)
    return float(np.mean(diff * diff) * MSE_SCALE)


def render_composite(fg: np.ndarray, alpha: np.ndarray, target_bg) -> np.ndarray:
    """Composite (fg, alpha) over a background image or a solid RGB color."""
    bg = np.asarray(target_bg, dtype=np.float64)
    if bg.ndim == 1:
        bg = np.broadcast_to(bg, fg.shape).astype(fg.dtype, copy=False)
    return core.composite(fg, alpha, bg)
