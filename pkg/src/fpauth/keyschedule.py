"""Secret keys and their expansion into per-pixel parameter matrices.

A key is a scan mode, an upper bound for the residual amplitude, and nine
congruential generator quadruples.  Each quadruple drives one stream of the
recurrence x_{n+1} = ((4a+1) x_n + 2b+1) mod 2^m; the streams fill the
amplitude matrix H, the four neighbor-gain matrices selected by the mode,
and the four position/size-gain matrices.  The complementary four neighbor
matrices stay identically zero, which is what makes pixel dependencies
one-way along the scan order.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import PixelParams

__all__ = [
    "MODE_FORWARD",
    "MODE_BACKWARD",
    "MODES",
    "KEY_MAGIC",
    "KeyFormatError",
    "LcgParams",
    "AuthKey",
    "ParamField",
    "lcg_next",
    "fill_matrix",
    "expand_key",
    "key_labels",
    "parse_key",
    "write_key",
    "load_key",
    "save_key",
    "random_key",
    "key_space_size",
]

MODE_FORWARD = "causal-forward"
MODE_BACKWARD = "causal-backward"
MODES = (MODE_FORWARD, MODE_BACKWARD)

KEY_MAGIC = "FPAKEY1"

# Gain matrices generated per mode; the other four neighbor slots stay zero.
FORWARD_NEIGHBORS = (1, 2, 3, 4)
BACKWARD_NEIGHBORS = (5, 6, 7, 8)

_TWO_PI = 2.0 * math.pi


class KeyFormatError(ValueError):
    """Malformed key file."""


@dataclass(frozen=True)
class LcgParams:
    """One congruential stream: x_{n+1} = ((4a+1) x_n + 2b+1) mod 2^m.

    Light container checks only; the strict key bounds (x0, a, b >= 1 and
    8 <= m <= 31) are enforced where keys are built and parsed.
    """

    x0: int
    a: int
    b: int
    m: int

    def __post_init__(self):
        if not 1 <= self.m <= 31:
            raise ValueError(f"m must be in [1, 31], got {self.m}")
        if min(self.x0, self.a, self.b) < 0:
            raise ValueError("x0, a, b must be non-negative")
        if self.x0 >= (1 << self.m):
            raise ValueError(f"x0 must be < 2^m, got x0={self.x0} with m={self.m}")


def _check_key_quad(q: LcgParams) -> None:
    if not 8 <= q.m <= 31:
        raise ValueError(f"m must be in [8, 31], got {q.m}")
    if min(q.x0, q.a, q.b) < 1:
        raise ValueError("x0, a, b must be >= 1")


def key_labels(mode: str) -> tuple:
    """Quadruple labels in file order for the given scan mode."""
    neighbors = FORWARD_NEIGHBORS if mode == MODE_FORWARD else BACKWARD_NEIGHBORS
    return ("H",) + tuple(f"K{i}" for i in neighbors) + ("K9", "K10", "K11", "K12")


@dataclass(frozen=True)
class AuthKey:
    """Scan mode, amplitude upper bound, and the nine stream quadruples.

    Quadruple order matches the file format: H, the four causal neighbor
    gains (K1..K4 for causal-forward, K5..K8 for causal-backward), then
    K9..K12 for position and size.
    """

    mode: str
    ub_h: float
    quads: tuple

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0.5 < self.ub_h <= 1.0:
            raise ValueError(f"ub_h must be in (0.5, 1], got {self.ub_h}")
        object.__setattr__(self, "quads", tuple(self.quads))
        if len(self.quads) != 9:
            raise ValueError(f"expected 9 quadruples, got {len(self.quads)}")
        for q in self.quads:
            _check_key_quad(q)

    @property
    def labels(self) -> tuple:
        return key_labels(self.mode)


def lcg_next(state: int, p: LcgParams) -> int:
    """One step of the congruential recurrence, exact integer arithmetic."""
    return ((4 * p.a + 1) * state + 2 * p.b + 1) % (1 << p.m)


def fill_matrix(p: LcgParams, rows: int, cols: int, kind: str,
                ub_h: float = None) -> np.ndarray:
    """Fill a rows x cols matrix from one stream, row-major, starting at
    the state after the seed (x1, not x0).

    kind "angle" maps states onto [0, 2*pi); kind "h" maps onto
    (0.5, ub_h], open at 0.5 so the acceptance threshold stays meaningful.
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"matrix size must be positive, got {rows}x{cols}")
    mod = 1 << p.m
    # Reduced multiplier/increment give the same residues with small ints.
    mult = (4 * p.a + 1) % mod
    inc = (2 * p.b + 1) % mod
    s = p.x0
    states = []
    append = states.append
    for _ in range(rows * cols):
        s = (mult * s + inc) % mod
        append(s)
    arr = np.array(states, dtype=np.float64)
    if kind == "angle":
        vals = (arr / mod) * _TWO_PI
    elif kind == "h":
        if ub_h is None:
            raise ValueError("kind 'h' requires ub_h")
        vals = 0.5 + ((arr + 1.0) / mod) * (ub_h - 0.5)
    else:
        raise ValueError(f"unknown fill kind {kind!r}")
    return vals.reshape(rows, cols)


@dataclass(frozen=True)
class ParamField:
    """Expanded per-pixel parameters for one image size.

    k stacks the twelve gain matrices as planes (plane i holds gain i+1);
    four neighbor planes are identically zero according to the scan mode.
    Arrays are copied and frozen read-only, so a field is safe to share.
    """

    mode: str
    h: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        h = np.array(self.h, dtype=np.float64)
        k = np.array(self.k, dtype=np.float64)
        if h.ndim != 2:
            raise ValueError(f"h must be 2-D, got shape {h.shape}")
        if k.shape != (12,) + h.shape:
            raise ValueError(f"k must have shape (12, rows, cols), got {k.shape}")
        h.setflags(write=False)
        k.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "k", k)

    @property
    def shape(self) -> tuple:
        return self.h.shape

    def pixel_params(self, s: int, t: int) -> PixelParams:
        """Scalar parameters at 1-based (s, t)."""
        si, ti = s - 1, t - 1
        return PixelParams(
            h=float(self.h[si, ti]),
            kvec=tuple(float(self.k[i, si, ti]) for i in range(12)),
        )


def expand_key(key: AuthKey, rows: int, cols: int) -> ParamField:
    """Expand a key into the parameter matrices for one image size.

    Quad 1 fills H on (0.5, ub_h]; quads 2..5 fill the mode's four causal
    neighbor gains on [0, 2*pi); quads 6..9 fill K9..K12.  Pure function of
    (key, rows, cols): same inputs give bit-identical matrices.
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"image size must be positive, got {rows}x{cols}")
    h = fill_matrix(key.quads[0], rows, cols, "h", ub_h=key.ub_h)
    k = np.zeros((12, rows, cols))
    neighbors = FORWARD_NEIGHBORS if key.mode == MODE_FORWARD else BACKWARD_NEIGHBORS
    for qi, slot in enumerate(neighbors):
        mat = fill_matrix(key.quads[1 + qi], rows, cols, "angle")
        if not mat.any():
            raise ValueError(
                f"gain matrix K{slot} is identically zero; "
                "such a key cannot couple neighboring pixels"
            )
        k[slot - 1] = mat
    for qi, slot in enumerate((9, 10, 11, 12)):
        k[slot - 1] = fill_matrix(key.quads[5 + qi], rows, cols, "angle")
    return ParamField(mode=key.mode, h=h, k=k)


def write_key(key: AuthKey) -> str:
    """Serialize to the FPAKEY1 text format.

    ub_h uses repr, which round-trips the exact double through parse_key.
    """
    lines = [KEY_MAGIC, f"mode {key.mode}", f"ubh {key.ub_h!r}"]
    for label, q in zip(key.labels, key.quads):
        lines.append(f"{label} {q.x0} {q.a} {q.b} {q.m}")
    return "\n".join(lines) + "\n"


def parse_key(text: str) -> AuthKey:
    """Parse the FPAKEY1 text format.

    Raises KeyFormatError naming the offending line for any deviation:
    wrong header, unknown mode, ub_h outside (0.5, 1], wrong label order,
    non-integer fields, bounds violations, or a quadruple count other
    than nine.
    """
    entries = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())
               if ln.strip()]
    if not entries or entries[0][1] != KEY_MAGIC:
        lineno = entries[0][0] if entries else 1
        raise KeyFormatError(f"line {lineno}: expected '{KEY_MAGIC}' header")
    if len(entries) < 3:
        raise KeyFormatError(f"line {entries[-1][0] + 1}: truncated key file")

    lineno, mode_line = entries[1]
    parts = mode_line.split()
    if len(parts) != 2 or parts[0] != "mode":
        raise KeyFormatError(f"line {lineno}: expected 'mode <scan-mode>'")
    if parts[1] not in MODES:
        raise KeyFormatError(
            f"line {lineno}: mode must be one of {', '.join(MODES)}, got {parts[1]!r}"
        )
    mode = parts[1]

    lineno, ub_line = entries[2]
    parts = ub_line.split()
    if len(parts) != 2 or parts[0] != "ubh":
        raise KeyFormatError(f"line {lineno}: expected 'ubh <value>'")
    try:
        ub_h = float(parts[1])
    except ValueError:
        raise KeyFormatError(f"line {lineno}: ubh must be a decimal number") from None
    if not ub_h > 0.5:
        raise KeyFormatError(f"line {lineno}: ub_h must exceed 0.5")
    if ub_h > 1.0:
        raise KeyFormatError(f"line {lineno}: ub_h must be at most 1")

    quad_entries = entries[3:]
    if len(quad_entries) != 9:
        lineno = quad_entries[9][0] if len(quad_entries) > 9 else entries[-1][0]
        raise KeyFormatError(
            f"line {lineno}: expected 9 quadruples, found {len(quad_entries)}"
        )
    quads = []
    for (lineno, line), label in zip(quad_entries, key_labels(mode)):
        parts = line.split()
        if len(parts) != 5:
            raise KeyFormatError(f"line {lineno}: expected '{label} x0 a b m'")
        if parts[0] != label:
            raise KeyFormatError(
                f"line {lineno}: expected label {label}, got {parts[0]}"
            )
        try:
            x0, a, b, m = (int(v) for v in parts[1:])
        except ValueError:
            raise KeyFormatError(
                f"line {lineno}: quadruple fields must be integers"
            ) from None
        if not 8 <= m <= 31:
            raise KeyFormatError(f"line {lineno}: m must be in [8, 31], got {m}")
        if min(x0, a, b) < 1:
            raise KeyFormatError(f"line {lineno}: x0, a, b must be >= 1")
        if x0 >= (1 << m):
            raise KeyFormatError(f"line {lineno}: x0 must be < 2^m")
        quads.append(LcgParams(x0, a, b, m))
    return AuthKey(mode=mode, ub_h=ub_h, quads=tuple(quads))


def load_key(path) -> AuthKey:
    return parse_key(Path(path).read_text())


def save_key(key: AuthKey, path) -> None:
    Path(path).write_text(write_key(key))


def random_key(seed, mode: str = MODE_FORWARD, ub_h: float = 0.52,
               param_range: tuple = (10, 90)) -> AuthKey:
    """Deterministically draw a key with all quadruple entries in
    [lo, hi] = param_range (x0 additionally capped below 2^m, and m drawn
    from the part of the range valid as a modulus exponent).
    """
    lo, hi = int(param_range[0]), int(param_range[1])
    if lo < 1:
        raise ValueError(f"param range lower bound must be >= 1, got {lo}")
    if hi < lo:
        raise ValueError(f"param range must satisfy lo <= hi, got [{lo}, {hi}]")
    m_lo, m_hi = max(lo, 8), min(hi, 31)
    if m_lo > m_hi:
        raise ValueError(
            f"param range [{lo}, {hi}] leaves no valid modulus exponent in [8, 31]"
        )
    rng = random.Random(seed)
    quads = []
    for _ in range(9):
        m = rng.randint(m_lo, m_hi)
        x0 = rng.randint(lo, min(hi, (1 << m) - 1))
        a = rng.randint(lo, hi)
        b = rng.randint(lo, hi)
        quads.append(LcgParams(x0, a, b, m))
    return AuthKey(mode=mode, ub_h=ub_h, quads=tuple(quads))


def key_space_size(param_range: tuple = (10, 90)) -> int:
    """Exact count of quadruple combinations for a range: (hi-lo+1)^36."""
    lo, hi = int(param_range[0]), int(param_range[1])
    if lo < 1 or hi < lo:
        raise ValueError(f"invalid param range [{lo}, {hi}]")
    return (hi - lo + 1) ** 36
