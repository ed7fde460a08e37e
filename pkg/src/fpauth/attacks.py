"""Simulated attacks on signed images, plus a batch harness that measures
detection and localization for a whole layout of non-overlapping attacks.

Every kind except "rewrite" touches only its target region: filters are
computed on the full image but pasted back inside the region, so pixels
outside it stay bit-identical.  "rewrite" re-signs the original image under
an attacker's key and therefore reworks the whole frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy import ndimage

from .authenticate import generate, verify
from .validation import check_gray_image, check_region

__all__ = [
    "ATTACK_KINDS",
    "AUX_KINDS",
    "LayoutError",
    "AttackSpec",
    "AttackResult",
    "BatteryReport",
    "apply_attack",
    "attack_battery",
    "parse_layout",
]

ATTACK_KINDS = (
    "tamper-pixel",
    "salt-pepper",
    "gaussian-noise",
    "median-filter",
    "gaussian-filter",
    "enhance",
    "copy-external",
    "copy-self",
    "cover-constant",
    "collage",
    "logo",
    "rewrite",
)

# Kinds that need a second image: a donor for pixels, or the original for
# re-signing.
AUX_KINDS = ("copy-external", "collage", "logo", "rewrite")


class LayoutError(ValueError):
    """Malformed attack layout line."""


@dataclass(frozen=True)
class AttackSpec:
    """One attack: kind, target rectangle (row0, col0, rows, cols) in
    0-based coordinates, kind-specific params, and an RNG seed for the
    stochastic kinds."""

    kind: str
    region: tuple
    params: dict = dc_field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ATTACK_KINDS:
            raise ValueError(f"unknown attack kind {self.kind!r}")
        object.__setattr__(self, "region", tuple(int(v) for v in self.region))
        if len(self.region) != 4:
            raise ValueError("region must be (row0, col0, rows, cols)")


def _region_slices(region):
    row0, col0, rows, cols = region
    return slice(row0, row0 + rows), slice(col0, col0 + cols)


def _gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    r = size // 2
    ax = np.arange(-r, r + 1, dtype=np.float64)
    g = np.exp(-(ax[:, None] ** 2 + ax[None, :] ** 2) / (2.0 * sigma * sigma))
    return g / g.sum()


def _to_u8(a: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(a), 0, 255).astype(np.uint8)


def apply_attack(image, spec: AttackSpec, aux=None) -> np.ndarray:
    """Apply one attack to a copy of `image` and return the result.

    `aux` supplies the donor image for copy-external/collage/logo and the
    original (unsigned) image for rewrite; rewrite also needs an AuthKey in
    spec.params["key"].  All kinds are deterministic given (spec, inputs).
    """
    img = check_gray_image(image)
    region = check_region(spec.region, img.shape)
    rs, cs = _region_slices(region)
    params = spec.params
    if spec.kind in AUX_KINDS and aux is None:
        raise ValueError(f"attack {spec.kind!r} requires an aux image")

    if spec.kind == "rewrite":
        key = params.get("key")
        if key is None:
            raise ValueError("rewrite requires params['key'] (the attacker key)")
        return generate(check_gray_image(aux, "aux"), key)

    out = img.copy()
    block = out[rs, cs]

    if spec.kind == "tamper-pixel":
        value = params.get("value")
        if value is None:
            # 255 - v is never equal to v, so the change is guaranteed.
            out[rs, cs] = 255 - block
        else:
            out[rs, cs] = np.uint8(int(value))
    elif spec.kind == "salt-pepper":
        density = float(params.get("density", 0.05))
        if not 0.0 < density <= 1.0:
            raise ValueError(f"density must be in (0, 1], got {density}")
        rng = np.random.default_rng(spec.seed)
        u = rng.random(block.shape)
        block[u < density / 2.0] = 0
        block[u >= 1.0 - density / 2.0] = 255
    elif spec.kind == "gaussian-noise":
        sigma = float(params.get("sigma", 5.0))
        rng = np.random.default_rng(spec.seed)
        noisy = block.astype(np.float64) + rng.normal(0.0, sigma, block.shape)
        out[rs, cs] = _to_u8(noisy)
    elif spec.kind == "median-filter":
        size = int(params.get("size", 3))
        if size < 2:
            raise ValueError(f"filter size must be >= 2, got {size}")
        filtered = ndimage.median_filter(img, size=size, mode="nearest")
        out[rs, cs] = filtered[rs, cs]
    elif spec.kind == "gaussian-filter":
        size = int(params.get("size", 3))
        sigma = float(params.get("sigma", 0.8))
        if size % 2 != 1 or size < 3:
            raise ValueError(f"kernel size must be odd and >= 3, got {size}")
        kernel = _gaussian_kernel(size, sigma)
        blurred = ndimage.correlate(img.astype(np.float64), kernel, mode="nearest")
        out[rs, cs] = _to_u8(blurred)[rs, cs]
    elif spec.kind == "enhance":
        lo, hi = int(block.min()), int(block.max())
        if hi > lo:
            stretched = (block.astype(np.float64) - lo) * (255.0 / (hi - lo))
            out[rs, cs] = _to_u8(stretched)
    elif spec.kind in ("copy-external", "copy-self", "collage"):
        if spec.kind == "copy-self":
            donor = img
        else:
            donor = check_gray_image(aux, "aux")
        if spec.kind == "collage":
            # Donor block comes from the same coordinates of an image signed
            # under the same key, which is what makes interiors self-consistent.
            src = (region[0], region[1])
        else:
            try:
                src = (int(params["src_row0"]), int(params["src_col0"]))
            except KeyError:
                if spec.kind == "copy-self":
                    raise ValueError(
                        "copy-self requires src_row0/src_col0 params"
                    ) from None
                src = (region[0], region[1])
        src_region = check_region((src[0], src[1], region[2], region[3]),
                                  donor.shape, "source region")
        srs, scs = _region_slices(src_region)
        out[rs, cs] = donor[srs, scs]
    elif spec.kind == "cover-constant":
        value = int(params.get("value", 128))
        if not 0 <= value <= 255:
            raise ValueError(f"value must be in [0, 255], got {value}")
        out[rs, cs] = value
    elif spec.kind == "logo":
        stamp = check_gray_image(aux, "aux")
        if stamp.shape[0] < region[2] or stamp.shape[1] < region[3]:
            raise ValueError(
                f"logo image {stamp.shape} smaller than region {region[2]}x{region[3]}"
            )
        value = int(params.get("value", 255))
        on = stamp[: region[2], : region[3]] >= 128
        block[on] = value
    return out


def _cheb_to_rect(r: int, c: int, region) -> int:
    """Chebyshev distance from a pixel to a rectangle (0 inside)."""
    row0, col0, rows, cols = region
    dr = max(row0 - r, r - (row0 + rows - 1), 0)
    dc = max(col0 - c, c - (col0 + cols - 1), 0)
    return max(dr, dc)


@dataclass(frozen=True)
class AttackResult:
    """Per-attack outcome: flags attributed to the nearest region."""

    spec: AttackSpec
    flagged: int
    max_distance: int  # max Chebyshev distance of attributed flags; -1 if none
    detected: bool


@dataclass(frozen=True)
class BatteryReport:
    results: tuple
    total_flagged: int
    stray_flagged: int  # flags farther than 1 pixel from every region
    mask: np.ndarray
    attacked: np.ndarray
    signed: np.ndarray

    def to_text(self) -> str:
        lines = [f"{'attack':<16} {'region':<20} {'flagged':>7} {'maxdist':>7} verdict"]
        for res in self.results:
            row0, col0, rows, cols = res.spec.region
            region = f"({row0},{col0})+{rows}x{cols}"
            dist = "-" if res.max_distance < 0 else str(res.max_distance)
            verdict = "detected" if res.detected else "missed"
            lines.append(
                f"{res.spec.kind:<16} {region:<20} {res.flagged:>7} {dist:>7} {verdict}"
            )
        lines.append(f"total flagged: {self.total_flagged}")
        lines.append(f"stray flagged (beyond all regions +1): {self.stray_flagged}")
        return "\n".join(lines) + "\n"


def attack_battery(image, key, layout, aux=None) -> BatteryReport:
    """Sign `image`, apply every attack in `layout`, verify, and attribute
    each flagged pixel to the nearest attacked region.

    Regions must not overlap so attribution is unambiguous; "rewrite"
    reworks the whole frame and must be run on its own via apply_attack.
    """
    specs = list(layout)
    for spec in specs:
        if spec.kind == "rewrite":
            raise ValueError(
                "rewrite reworks the whole image; apply it alone, not in a battery"
            )
    img = check_gray_image(image)
    regions = [check_region(s.region, img.shape) for s in specs]
    for i in range(len(regions)):
        for j in range(i + 1, len(regions)):
            r0, c0, nr, nc = regions[i]
            q0, d0, mr, mc = regions[j]
            if r0 < q0 + mr and q0 < r0 + nr and c0 < d0 + mc and d0 < c0 + nc:
                raise ValueError(f"attack regions {i} and {j} overlap")

    signed = generate(img, key)
    attacked = signed
    for spec in specs:
        attacked = apply_attack(attacked, spec, aux=aux)
    mask = verify(attacked, key)

    counts = [0] * len(specs)
    maxdist = [-1] * len(specs)
    stray = 0
    for r, c in zip(*np.nonzero(mask)):
        if regions:
            dists = [_cheb_to_rect(int(r), int(c), reg) for reg in regions]
            best = min(range(len(specs)), key=lambda i: dists[i])
            counts[best] += 1
            maxdist[best] = max(maxdist[best], dists[best])
            if dists[best] > 1:
                stray += 1
        else:
            stray += 1
    results = tuple(
        AttackResult(spec=spec, flagged=counts[i], max_distance=maxdist[i],
                     detected=counts[i] > 0)
        for i, spec in enumerate(specs)
    )
    return BatteryReport(
        results=results,
        total_flagged=int(mask.sum()),
        stray_flagged=stray,
        mask=mask,
        attacked=attacked,
        signed=signed,
    )


def _parse_scalar(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_layout(text: str) -> list:
    """Parse an attack layout, one attack per line:

        kind row0 col0 rows cols [name=value ...]

    Blank lines and '#' comments are skipped.  Values parse as int, then
    float, then plain string; a `seed=` entry sets the spec's RNG seed.
    """
    specs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 5:
            raise LayoutError(
                f"line {lineno}: expected 'kind row0 col0 rows cols [name=value ...]'"
            )
        kind = parts[0]
        if kind not in ATTACK_KINDS:
            raise LayoutError(f"line {lineno}: unknown attack kind {kind!r}")
        try:
            region = tuple(int(v) for v in parts[1:5])
        except ValueError:
            raise LayoutError(f"line {lineno}: region fields must be integers") from None
        params = {}
        seed = 0
        for token in parts[5:]:
            if "=" not in token:
                raise LayoutError(f"line {lineno}: expected name=value, got {token!r}")
            name, value = token.split("=", 1)
            if name == "seed":
                try:
                    seed = int(value)
                except ValueError:
                    raise LayoutError(f"line {lineno}: seed must be an integer") from None
            else:
                params[name] = _parse_scalar(value)
        specs.append(AttackSpec(kind=kind, region=region, params=params, seed=seed))
    return specs
