"""Input validation helpers shared by the library, the estimator, and the CLI."""

from __future__ import annotations

import numpy as np


def check_gray_image(x, name: str = "image") -> np.ndarray:
    """Coerce to a 2-D uint8 array, rejecting anything that is not an
    8-bit grayscale raster with values in [0, 255].

    uint8 input is returned as-is (no copy); callers that mutate must copy.
    """
    arr = np.asarray(x)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must contain at least one pixel")
    if arr.dtype == np.uint8:
        return arr
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValueError(f"{name} must hold integers, got dtype {arr.dtype}")
    lo, hi = int(arr.min()), int(arr.max())
    if lo < 0 or hi > 255:
        raise ValueError(f"{name} values must lie in [0, 255], got [{lo}, {hi}]")
    return arr.astype(np.uint8)


def check_mask(x, name: str = "mask") -> np.ndarray:
    """Coerce to a 2-D boolean array."""
    arr = np.asarray(x)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got shape {arr.shape}")
    if arr.dtype != np.bool_:
        arr = arr.astype(bool)
    return arr


def check_position(pos, shape, name: str = "position") -> tuple[int, int]:
    """Validate a 1-based (row, column) position against an image shape."""
    s, t = int(pos[0]), int(pos[1])
    rows, cols = shape
    if not (1 <= s <= rows and 1 <= t <= cols):
        raise ValueError(
            f"{name} (s={s}, t={t}) outside 1-based bounds of a {rows}x{cols} image"
        )
    return s, t


def check_region(region, shape, name: str = "region") -> tuple[int, int, int, int]:
    """Validate a (row0, col0, rows, cols) rectangle against an image shape."""
    row0, col0, rows, cols = (int(v) for v in region)
    img_rows, img_cols = shape
    if rows < 1 or cols < 1:
        raise ValueError(f"{name} must span at least one pixel, got {rows}x{cols}")
    if row0 < 0 or col0 < 0 or row0 + rows > img_rows or col0 + cols > img_cols:
        raise ValueError(
            f"{name} ({row0},{col0})+{rows}x{cols} exceeds {img_rows}x{img_cols} image"
        )
    return row0, col0, rows, cols
