"""PNG raster I/O.

Readers accept 8- or 16-bit files and normalize (with clamping) to [0,1]
float32; writers assert the [0,1] contract.  Color images are RGB in memory.
Alpha mattes are written 16-bit to preserve soft edges; trimaps use the
conventional 0/128/255 coding.
"""

import numpy as np
import cv2

from .core import check_image, check_map
from .preprocess import TRIMAP_BG, TRIMAP_FG, TRIMAP_UNKNOWN


def _normalize(raw: np.ndarray) -> np.ndarray:
    if raw.dtype == np.uint8:
        scale = 255.0
    elif raw.dtype == np.uint16:
        scale = 65535.0
    else:
        raise IOError(f"unsupported pixel type {raw.dtype}")
    return np.clip(raw.astype(np.float32) / scale, 0.0, 1.0)


def read_image(path) -> np.ndarray:
    """(H, W, 3) float32 RGB in [0,1]."""
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise IOError(f"cannot read image: {path}")
    if raw.ndim == 2:
        raw = np.stack([raw] * 3, axis=-1)
    if raw.shape[2] == 4:
        raw = raw[..., :3]
    return _normalize(raw[..., ::-1])


def read_map(path) -> np.ndarray:
    """(H, W) float32 in [0,1]; color inputs are reduced to their first channel."""
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise IOError(f"cannot read map: {path}")
    if raw.ndim == 3:
        raw = raw[..., 0]
    return _normalize(raw)


def write_image(path, img: np.ndarray) -> None:
    """8-bit RGB PNG; asserts the [0,1] contract."""
    check_image(img, f"image for {path}")
    u8 = np.round(img * 255.0).astype(np.uint8)
    if not cv2.imwrite(str(path), u8[..., ::-1]):
        raise IOError(f"cannot write image: {path}")


def write_map16(path, m: np.ndarray) -> None:
    """16-bit single-channel PNG; asserts the [0,1] contract."""
    check_map(m, f"map for {path}")
    u16 = np.round(m.astype(np.float64) * 65535.0).astype(np.uint16)
    if not cv2.imwrite(str(path), u16):
        raise IOError(f"cannot write map: {path}")


def write_map8(path, m: np.ndarray) -> None:
    check_map(m, f"map for {path}")
    u8 = np.round(m * 255.0).astype(np.uint8)
    if not cv2.imwrite(str(path), u8):
        raise IOError(f"cannot write map: {path}")


_TRIMAP_TO_U8 = {TRIMAP_BG: 0, TRIMAP_UNKNOWN: 128, TRIMAP_FG: 255}


def write_trimap(path, tri: np.ndarray) -> None:
    """Single-channel PNG with background 0, unknown 128, foreground 255."""
    u8 = np.zeros(tri.shape, dtype=np.uint8)
    for label, value in _TRIMAP_TO_U8.items():
        u8[tri == label] = value
    if not cv2.imwrite(str(path), u8):
        raise IOError(f"cannot write trimap: {path}")


def read_trimap(path) -> np.ndarray:
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise IOError(f"cannot read trimap: {path}")
    if raw.ndim == 3:
        raw = raw[..., 0]
    tri = np.full(raw.shape, TRIMAP_UNKNOWN, dtype=np.uint8)
    tri[raw < 64] = TRIMAP_BG
    tri[raw > 192] = TRIMAP_FG
    return tri
