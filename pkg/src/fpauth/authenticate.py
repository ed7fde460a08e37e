"""Image-level signing, verification, and tamper statistics.

Signing rewrites each pixel, in the key's causal scan order, to the nearest
value accepted by the per-position predicate, so every pixel only depends on
already-final neighbors.  Verification re-checks the predicate everywhere
against the received pixels and returns the mask of failures.

Both paths accumulate the twelve phase terms in the same fixed left-to-right
order as the scalar core: the vectorized shortcuts only ever skip terms that
are exactly +0.0 on a non-negative partial sum, which leaves the IEEE-754
result bit-identical.
"""

from __future__ import annotations

import math

import numpy as np

from . import core
from .keyschedule import (
    MODE_FORWARD,
    AuthKey,
    ParamField,
    expand_key,
)
from .validation import check_gray_image, check_position

__all__ = [
    "as_field",
    "phase_field",
    "generate",
    "verify",
    "psnr",
    "tamper_dependents",
    "single_tamper_detected",
    "predicted_detection_probability",
]


def as_field(key, rows: int, cols: int) -> ParamField:
    """Accept an AuthKey or a pre-expanded ParamField of matching size."""
    if isinstance(key, ParamField):
        if key.shape != (rows, cols):
            raise ValueError(
                f"parameter field is {key.shape}, image is {(rows, cols)}"
            )
        return key
    if isinstance(key, AuthKey):
        return expand_key(key, rows, cols)
    raise TypeError(f"key must be an AuthKey or ParamField, got {type(key).__name__}")


def generate(image, key) -> np.ndarray:
    """Sign: return the fixed point image of `image` under `key`.

    Every output pixel satisfies the strict predicate, so verify() on the
    result is all-clear.  Signing a signed image returns it unchanged.
    Raises NoFixedPointError with pixel coordinates if a position has no
    accepted value (impossible for in-contract keys, where ub_h <= 1).
    """
    img = check_gray_image(image)
    field = as_field(key, *img.shape)
    if field.mode == MODE_FORWARD:
        return _scan_forward(img, field)
    return _scan_backward(img, field)


def _scan_forward(img: np.ndarray, field: ParamField) -> np.ndarray:
    """Row scan top to bottom, left to right; gains 5..8 are zero planes."""
    rows, cols = img.shape
    out = img.astype(np.int64)
    k = field.k
    col_pos = np.arange(1, cols + 1, dtype=np.float64)
    frows, fcols = float(rows), float(cols)
    solve = core.solve_value
    zero_row = np.zeros(cols + 2)
    for si in range(rows):
        above = zero_row if si == 0 else np.pad(out[si - 1].astype(np.float64), 1)
        # Vectorized first three phase terms, accumulated in slot order.
        b = k[0, si] * above[0:cols]
        b += k[1, si] * above[1:cols + 1]
        b += k[2, si] * above[2:cols + 2]
        bl = b.tolist()
        k4l = k[3, si].tolist()
        t9l = (k[8, si] * float(si + 1)).tolist()
        t10l = (k[9, si] * col_pos).tolist()
        t11l = (k[10, si] * frows).tolist()
        t12l = (k[11, si] * fcols).tolist()
        hl = field.h[si].tolist()
        x0l = out[si].tolist()
        solved = []
        west = 0.0
        for ti in range(cols):
            # Slots 5..8 contribute exactly +0.0 here and are skipped.
            phi = bl[ti] + k4l[ti] * west
            phi += t9l[ti]
            phi += t10l[ti]
            phi += t11l[ti]
            phi += t12l[ti]
            try:
                x = solve(x0l[ti], hl[ti], phi)
            except core.NoFixedPointError as exc:
                raise core.NoFixedPointError(
                    f"{exc} at pixel (s={si + 1}, t={ti + 1})"
                ) from None
            solved.append(x)
            west = float(x)
        out[si] = solved
    return out.astype(np.uint8)


def _scan_backward(img: np.ndarray, field: ParamField) -> np.ndarray:
    """Row scan bottom to top, right to left; gains 1..4 are zero planes."""
    rows, cols = img.shape
    out = img.astype(np.int64)
    k = field.k
    col_pos = np.arange(1, cols + 1, dtype=np.float64)
    frows, fcols = float(rows), float(cols)
    solve = core.solve_value
    zero_row = np.zeros(cols + 2)
    for si in range(rows - 1, -1, -1):
        below = zero_row if si == rows - 1 else np.pad(out[si + 1].astype(np.float64), 1)
        p6 = (k[5, si] * below[0:cols]).tolist()
        p7 = (k[6, si] * below[1:cols + 1]).tolist()
        p8 = (k[7, si] * below[2:cols + 2]).tolist()
        k5l = k[4, si].tolist()
        t9l = (k[8, si] * float(si + 1)).tolist()
        t10l = (k[9, si] * col_pos).tolist()
        t11l = (k[10, si] * frows).tolist()
        t12l = (k[11, si] * fcols).tolist()
        hl = field.h[si].tolist()
        x0l = out[si].tolist()
        solved = []
        east = 0.0
        for ti in range(cols - 1, -1, -1):
            # Slots 1..4 contribute exactly +0.0 here and are skipped.
            phi = k5l[ti] * east
            phi += p6[ti]
            phi += p7[ti]
            phi += p8[ti]
            phi += t9l[ti]
            phi += t10l[ti]
            phi += t11l[ti]
            phi += t12l[ti]
            try:
                x = solve(x0l[ti], hl[ti], phi)
            except core.NoFixedPointError as exc:
                raise core.NoFixedPointError(
                    f"{exc} at pixel (s={si + 1}, t={ti + 1})"
                ) from None
            solved.append(x)
            east = float(x)
        out[si] = solved[::-1]
    return out.astype(np.uint8)


# Padded-array slice origins for neighbor slots x1..x8.
_SLOT_OFFSETS = ((0, 0), (0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1), (2, 2))


def phase_field(image, field: ParamField) -> np.ndarray:
    """Per-pixel phase with all neighbors read from `image`.

    Fully vectorized but term-ordered exactly like core.phase, so the two
    agree bit for bit at every position.
    """
    img = check_gray_image(image)
    rows, cols = img.shape
    padded = np.pad(img.astype(np.float64), 1)
    k = field.k
    r, c = _SLOT_OFFSETS[0]
    acc = k[0] * padded[r:r + rows, c:c + cols]
    for i in range(1, 8):
        r, c = _SLOT_OFFSETS[i]
        acc += k[i] * padded[r:r + rows, c:c + cols]
    acc += k[8] * np.arange(1, rows + 1, dtype=np.float64)[:, None]
    acc += k[9] * np.arange(1, cols + 1, dtype=np.float64)[None, :]
    acc += k[10] * float(rows)
    acc += k[11] * float(cols)
    return acc


def verify(image, key) -> np.ndarray:
    """Tamper mask: True where the predicate fails.  Never modifies input."""
    img = check_gray_image(image)
    field = as_field(key, *img.shape)
    phi = phase_field(img, field)
    accepted = np.abs(field.h * np.cos(img.astype(np.float64) + phi)) < 0.5
    return ~accepted


def psnr(reference, other) -> float:
    """Peak signal-to-noise ratio in dB between two 8-bit images.

    Returns +inf for identical images.
    """
    a = check_gray_image(reference, "reference")
    b = check_gray_image(other, "other")
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    mse = np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2)
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 ** 2 / mse)


# Offsets of positions whose predicate reads a changed pixel, with the gain
# slot doing the reading.  Forward keys couple east/south-west/south/south-east;
# backward keys the mirror set.
_FORWARD_DEPENDENTS = (((0, 1), 4), ((1, -1), 3), ((1, 0), 2), ((1, 1), 1))
_BACKWARD_DEPENDENTS = (((0, -1), 5), ((-1, 1), 6), ((-1, 0), 7), ((-1, -1), 8))


def tamper_dependents(mode: str) -> tuple:
    """((dr, dc), slot) pairs: positions that can newly fail when one pixel
    changes, as offsets from the changed pixel, and the slot reading it."""
    return _FORWARD_DEPENDENTS if mode == MODE_FORWARD else _BACKWARD_DEPENDENTS


def single_tamper_detected(image, key, pos, value: int) -> bool:
    """Would rewriting the pixel at 1-based pos to `value` be detected?

    Assumes `image` verifies clean under `key`; then the only predicates
    that can fail are the tampered position's own and its dependents', so
    only those are checked.  Equivalent to verify() on the tampered image.
    """
    img = check_gray_image(image)
    rows, cols = img.shape
    field = as_field(key, rows, cols)
    s, t = check_position(pos, img.shape)
    if not 0 <= value <= 255:
        raise ValueError(f"value must be in [0, 255], got {value}")
    if value == int(img[s - 1, t - 1]):
        return False
    tampered = img.copy()
    tampered[s - 1, t - 1] = value
    positions = [(s, t)] + [(s + dr, t + dc)
                            for (dr, dc), _ in tamper_dependents(field.mode)]
    for ps, pt in positions:
        if not (1 <= ps <= rows and 1 <= pt <= cols):
            continue
        env = core.NeighborVector.from_image(tampered, ps, pt)
        p = field.pixel_params(ps, pt)
        if not core.is_fixed_point(int(tampered[ps - 1, pt - 1]), p, env):
            return True
    return False


_VALUES = np.arange(256, dtype=np.float64)


def _census(h: float, phi: float) -> int:
    """Vectorized count of accepted values; bit-equivalent to the scalar
    core.count_feasible because np.cos matches math.cos on this platform
    (pinned by a regression test)."""
    return int(np.count_nonzero(np.abs(h * np.cos(_VALUES + phi)) < 0.5))


def _marginal_census(img, field: ParamField, pos, slot: int) -> float:
    """Mean census at 1-based pos with context slot `slot` swept over all
    256 values, each column phase-ordered exactly like core.phase."""
    s, t = pos
    env = core.NeighborVector.from_image(img, s, t)
    p = field.pixel_params(s, t)
    comps = env.components
    j = slot - 1
    if j == 0:
        phiv = p.kvec[0] * _VALUES
    else:
        pre = p.kvec[0] * comps[0]
        for i in range(1, j):
            pre += p.kvec[i] * comps[i]
        phiv = pre + p.kvec[j] * _VALUES
    for i in range(j + 1, 12):
        phiv = phiv + p.kvec[i] * comps[i]
    grid = np.abs(p.h * np.cos(_VALUES[:, None] + phiv[None, :])) < 0.5
    return float(grid.sum()) / 256.0


def predicted_detection_probability(image, key, pos) -> float:
    """Probability that verify() flags something after the pixel at 1-based
    pos is rewritten to a uniform random value.

    One minus the product of per-position acceptance ratios: the tampered
    position contributes its own census over 256 values; each in-image
    dependent contributes its census with the tampered slot marginalized
    over all 256 values it might take.
    """
    img = check_gray_image(image)
    rows, cols = img.shape
    field = as_field(key, rows, cols)
    s, t = check_position(pos, img.shape)
    env = core.NeighborVector.from_image(img, s, t)
    p = field.pixel_params(s, t)
    prod = _census(p.h, core.phase(p.kvec, env)) / 256.0
    for (dr, dc), slot in tamper_dependents(field.mode):
        ds, dt = s + dr, t + dc
        if not (1 <= ds <= rows and 1 <= dt <= cols):
            continue
        prod *= _marginal_census(img, field, (ds, dt), slot) / 256.0
    return 1.0 - prod
