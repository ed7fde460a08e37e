"""Scalar fixed-point arithmetic behind signing and verification.

A pixel value x is accepted at a position when the keyed residual
h * cos(x + phase) stays strictly inside (-0.5, 0.5); the keyed map adds the
three-way rounding of that residual, so accepted values are exactly its
fixed points.  Signing moves each pixel to the nearest accepted value.

Everything here is plain scalar arithmetic with a pinned left-to-right
evaluation order.  The vectorized image routines are tested to agree with
this module bit for bit, so it doubles as the reference implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "NoFixedPointError",
    "NeighborVector",
    "PixelParams",
    "round_r",
    "phase",
    "residual",
    "is_fixed_point",
    "f_apply",
    "solve_value",
    "solve_pixel",
    "count_feasible",
]


class NoFixedPointError(RuntimeError):
    """No value in [0, 255] satisfies the predicate.

    Unreachable when h <= 1: the infeasible runs of the cosine are then
    shorter than the window the solver scans.  Kept as a defensive error so
    out-of-contract parameters fail loudly instead of looping.
    """


def round_r(v: float) -> int:
    """Three-way rounding: -1 for v <= -0.5, +1 for v >= 0.5, else 0."""
    if v <= -0.5:
        return -1
    if v >= 0.5:
        return 1
    return 0


@dataclass(frozen=True)
class NeighborVector:
    """Evaluation context of one pixel.

    x1..x3 are the row above (left to right), x4/x5 the left and right
    neighbors, x6..x8 the row below.  (s, t) is the 1-based (row, column)
    position and (rows, cols) the image size.  Neighbors outside the image
    carry 0 by convention.
    """

    x1: int = 0
    x2: int = 0
    x3: int = 0
    x4: int = 0
    x5: int = 0
    x6: int = 0
    x7: int = 0
    x8: int = 0
    s: int = 1
    t: int = 1
    rows: int = 1
    cols: int = 1

    @classmethod
    def from_image(cls, image, s: int, t: int) -> "NeighborVector":
        """Context at 1-based (s, t) of a 2-D array, zero-padded at borders."""
        rows = len(image)
        cols = len(image[0])
        if not (1 <= s <= rows and 1 <= t <= cols):
            raise ValueError(f"(s={s}, t={t}) outside a {rows}x{cols} image")

        def at(r, c):
            if 0 <= r < rows and 0 <= c < cols:
                return int(image[r][c])
            return 0

        si, ti = s - 1, t - 1
        return cls(
            x1=at(si - 1, ti - 1), x2=at(si - 1, ti), x3=at(si - 1, ti + 1),
            x4=at(si, ti - 1), x5=at(si, ti + 1),
            x6=at(si + 1, ti - 1), x7=at(si + 1, ti), x8=at(si + 1, ti + 1),
            s=s, t=t, rows=rows, cols=cols,
        )

    @property
    def components(self) -> tuple:
        """The twelve phase components in gain order."""
        return (self.x1, self.x2, self.x3, self.x4, self.x5, self.x6,
                self.x7, self.x8, self.s, self.t, self.rows, self.cols)


@dataclass(frozen=True)
class PixelParams:
    """Per-position secrets: residual amplitude h and the twelve phase gains
    (eight neighbor gains, then position gains k9/k10 and size gains k11/k12).
    Plain container; keys enforce h in (0.5, 1] at construction time.
    """

    h: float
    kvec: tuple

    def __post_init__(self):
        object.__setattr__(self, "kvec", tuple(float(v) for v in self.kvec))
        if len(self.kvec) != 12:
            raise ValueError(f"kvec must have 12 entries, got {len(self.kvec)}")


def phase(kvec, env: NeighborVector) -> float:
    """Dot product of the twelve gains with the context components.

    Accumulated strictly left to right in double precision; signer and
    verifier both rely on this exact order, so it must never be reassociated.
    """
    comps = env.components
    acc = kvec[0] * comps[0]
    for i in range(1, 12):
        acc += kvec[i] * comps[i]
    return acc


def residual(x: int, p: PixelParams, env: NeighborVector) -> float:
    """The keyed residual h * cos(x + phase) at value x."""
    return p.h * math.cos(x + phase(p.kvec, env))


def is_fixed_point(x: int, p: PixelParams, env: NeighborVector) -> bool:
    """Strict acceptance test: |h * cos(x + phase)| < 0.5."""
    return abs(residual(x, p, env)) < 0.5


def f_apply(x: int, p: PixelParams, env: NeighborVector) -> int:
    """One application of the keyed map; fixed points return themselves.

    The result may leave [0, 255]; callers that need a pixel value should
    use solve_pixel instead.
    """
    return x + round_r(residual(x, p, env))


# Candidate offsets in distance order, smaller value first on ties.
_NEAR_OFFSETS = (0, -1, 1, -2, 2, -3, 3)


def solve_value(x0: int, h: float, phi: float) -> int:
    """Nearest value to x0 in [0, 255] with |h * cos(x + phi)| < 0.5.

    Scans the window [x0-3, x0+3] clamped to [0, 255]; for h <= 1 this
    always succeeds.  A clamped window under out-of-contract h may not, in
    which case the search widens one step per side before giving up.
    """
    cos = math.cos
    for dx in _NEAR_OFFSETS:
        x = x0 + dx
        if 0 <= x <= 255 and abs(h * cos(x + phi)) < 0.5:
            return x
    for r in range(4, 256):
        x = x0 - r
        if x >= 0 and abs(h * cos(x + phi)) < 0.5:
            return x
        x = x0 + r
        if x <= 255 and abs(h * cos(x + phi)) < 0.5:
            return x
    raise NoFixedPointError(f"no fixed point in [0, 255] (h={h!r}, phase={phi!r})")


def solve_pixel(x0: int, p: PixelParams, env: NeighborVector) -> int:
    """Nearest accepted value to x0 at this position, ties to the smaller."""
    if not 0 <= x0 <= 255:
        raise ValueError(f"pixel value must be in [0, 255], got {x0}")
    return solve_value(x0, p.h, phase(p.kvec, env))


def count_feasible(p: PixelParams, env: NeighborVector) -> int:
    """Brute-force census: how many of the 256 values are accepted here."""
    phi = phase(p.kvec, env)
    h = p.h
    cos = math.cos
    return sum(1 for x in range(256) if abs(h * cos(x + phi)) < 0.5)
