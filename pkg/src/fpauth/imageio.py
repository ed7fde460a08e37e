"""Grayscale image and tamper-mask files.

Binary PGM (P5, maxval 255) is the interchange format and is written
byte-exactly; 8-bit grayscale PNG is supported as a convenience.  Tamper
masks are stored as images with 255 at flagged pixels, so a mask file is
itself a valid image input.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

from .validation import check_gray_image, check_mask

__all__ = [
    "ImageFormatError",
    "read_image",
    "write_image",
    "read_mask",
    "write_mask",
    "overlay_mask",
]

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class ImageFormatError(ValueError):
    """Unreadable or unsupported image file."""


def read_image(path) -> np.ndarray:
    """Read a PGM (P5) or 8-bit grayscale PNG file as a uint8 array."""
    path = Path(path)
    data = path.read_bytes()
    if data[:2] == b"P5":
        return _read_pgm(data, path)
    if data[:8] == _PNG_MAGIC:
        return _read_png(data, path)
    raise ImageFormatError(f"{path}: not a P5 PGM or PNG file")


def _read_pgm(data: bytes, path) -> np.ndarray:
    pos = 2
    fields = []
    n = len(data)
    while len(fields) < 3:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos] not in (0x0A, 0x0D):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ImageFormatError(f"{path}: truncated PGM header")
        token = data[start:pos]
        try:
            fields.append(int(token))
        except ValueError:
            raise ImageFormatError(
                f"{path}: bad PGM header token {token!r}"
            ) from None
    width, height, maxval = fields
    if maxval != 255:
        raise ImageFormatError(f"{path}: maxval must be 255, got {maxval}")
    if width < 1 or height < 1:
        raise ImageFormatError(f"{path}: image size must be positive")
    pos += 1  # single whitespace byte separates header from payload
    payload = data[pos:pos + width * height]
    if len(payload) < width * height:
        raise ImageFormatError(
            f"{path}: truncated payload, expected {width * height} bytes, "
            f"got {len(payload)}"
        )
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()


def _read_png(data: bytes, path) -> np.ndarray:
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except Exception as exc:
        raise ImageFormatError(f"{path}: unreadable PNG ({exc})") from None
    if img.mode != "L":
        raise ImageFormatError(
            f"{path}: single-channel 8-bit grayscale required, got mode {img.mode!r}"
        )
    return np.asarray(img, dtype=np.uint8)


def write_image(image, path, fmt: str = None) -> None:
    """Write a uint8 grayscale image; format from `fmt` or the extension
    (.pgm or .pngable), defaulting to PGM."""
    img = check_gray_image(image)
    path = Path(path)
    if fmt is None:
        fmt = "png" if path.suffix.lower() == ".png" else "pgm"
    fmt = fmt.lower()
    if fmt == "pgm":
        rows, cols = img.shape
        header = f"P5\n{cols} {rows}\n255\n".encode("ascii")
        path.write_bytes(header + img.tobytes())
    elif fmt == "png":
        Image.fromarray(img, mode="L").save(path, format="PNG")
    else:
        raise ValueError(f"unknown image format {fmt!r}")


def read_mask(path) -> np.ndarray:
    """Read a mask image back as a boolean array (>= 128 means flagged)."""
    return read_image(path) >= 128


def write_mask(mask, path, fmt: str = None) -> None:
    """Write a boolean mask as an image: 255 at flagged pixels, else 0."""
    m = check_mask(mask)
    write_image(np.where(m, 255, 0).astype(np.uint8), path, fmt=fmt)


def overlay_mask(image, mask) -> np.ndarray:
    """Copy of `image` with flagged pixels forced to white for inspection."""
    img = check_gray_image(image)
    m = check_mask(mask)
    if m.shape != img.shape:
        raise ValueError(f"mask shape {m.shape} does not match image {img.shape}")
    out = img.copy()
    out[m] = 255
    return out
