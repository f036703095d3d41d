"""Binary PPM (P6) and PGM (P5) images with 8-bit samples."""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

_HEADER = re.compile(rb"(P[56])(?:\s+|#[^\n]*\n)+?(\d+)(?:\s+|#[^\n]*\n)+?(\d+)(?:\s+|#[^\n]*\n)+?(\d+)\s")


class ImageError(ValueError):
    pass


def read_image(path) -> np.ndarray:
    """Return a float32 array [1, C, H, W] scaled to [0, 1]; C is 3 for P6, 1 for P5."""
    data = Path(path).read_bytes()
    m = _HEADER.match(data)
    if not m:
        raise ImageError(f"{path}: not a binary PPM/PGM file")
    magic, w, h, maxval = m.group(1), int(m.group(2)), int(m.group(3)), int(m.group(4))
    if maxval != 255:
        raise ImageError(f"{path}: only 8-bit images are supported (maxval {maxval})")
    if w < 1 or h < 1:
        raise ImageError(f"{path}: empty image {w}x{h}")
    c = 3 if magic == b"P6" else 1
    body = data[m.end():]
    if len(body) < w * h * c:
        raise ImageError(f"{path}: truncated pixel data ({len(body)} of {w * h * c} bytes)")
    px = np.frombuffer(body, np.uint8, count=w * h * c).reshape(h, w, c)
    return (px.transpose(2, 0, 1)[None].astype(np.float32) / np.float32(255))


def to_bytes(x: np.ndarray) -> np.ndarray:
    """Clamp to [0, 1] and quantize to uint8 [H, W, C]."""
    x = np.asarray(x)
    if x.ndim == 4:
        if x.shape[0] != 1:
            raise ImageError(f"expected a single image, got batch {x.shape[0]}")
        x = x[0]
    return np.rint(np.clip(x, 0.0, 1.0) * 255).astype(np.uint8).transpose(1, 2, 0)


def write_image(path, x: np.ndarray) -> None:
    """Write [1, C, H, W] or [C, H, W] values in [0, 1]; 3 channels give P6, 1 gives P5."""
    px = to_bytes(x)
    h, w, c = px.shape
    if c not in (1, 3):
        raise ImageError(f"cannot write {c}-channel image as PPM/PGM")
    magic = b"P6" if c == 3 else b"P5"
    Path(path).write_bytes(magic + f"\n{w} {h}\n255\n".encode() + px.tobytes())
