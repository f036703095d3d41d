"""Scalar reference implementations written straight from the definitions.

Slow by design; used only on tiny shapes.  Accumulation is in float64.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def conv2d(x, w, stride=1, dilation=1, groups=1, padding="same"):
    B, M, H, W = x.shape
    N, Mg, kh, kw = w.shape
    Ng = N // groups
    if padding == "same":
        oh, ow = -(-H // stride), -(-W // stride)
        off = lambda i, k: dilation * (i - k // 2)  # noqa: E731
    else:
        oh = (H - dilation * (kh - 1) - 1) // stride + 1
        ow = (W - dilation * (kw - 1) - 1) // stride + 1
        off = lambda i, k: dilation * i  # noqa: E731
    out = np.zeros((B, N, oh, ow))
    for b, n, y, xx in itertools.product(range(B), range(N), range(oh), range(ow)):
        g = n // Ng
        acc = 0.0
        for m, i, j in itertools.product(range(Mg), range(kh), range(kw)):
            sy, sx = y * stride + off(i, kh), xx * stride + off(j, kw)
            if 0 <= sy < H and 0 <= sx < W:
                acc += float(x[b, g * Mg + m, sy, sx]) * float(w[n, m, i, j])
        out[b, n, y, xx] = acc
    return out


def transposed_conv2d(x, w, stride=1, padding=0, output_size=None):
    B, M, H, W = x.shape
    _, N, kh, kw = w.shape
    full = np.zeros((B, N, (H - 1) * stride + kh, (W - 1) * stride + kw))
    for b, m, y, xx, n, i, j in itertools.product(range(B), range(M), range(H), range(W), range(N), range(kh), range(kw)):
        full[b, n, y * stride + i, xx * stride + j] += float(x[b, m, y, xx]) * float(w[m, n, i, j])
    if output_size is None:
        oh, ow = full.shape[2] - 2 * padding, full.shape[3] - 2 * padding
    else:
        oh, ow = output_size
    return full[:, :, padding:padding + oh, padding:padding + ow]


def pixel_shuffle(x, r):
    B, C, H, W = x.shape
    out = np.zeros((B, C // (r * r), H * r, W * r), x.dtype)
    for b, c, y, xx in itertools.product(range(B), range(C // (r * r)), range(H * r), range(W * r)):
        out[b, c, y, xx] = x[b, c * r * r + (y % r) * r + (xx % r), y // r, xx // r]
    return out


def bilinear_resize(x, oh, ow):
    """Half-pixel centres, sample positions clamped to the border."""
    B, C, H, W = x.shape

    def taps(o, n_in, n_out):
        s = (o + 0.5) * n_in / n_out - 0.5
        s = min(max(s, 0.0), n_in - 1)
        lo = int(math.floor(s))
        hi = min(lo + 1, n_in - 1)
        return lo, hi, s - lo

    out = np.zeros((B, C, oh, ow))
    for y, xx in itertools.product(range(oh), range(ow)):
        y0, y1, fy = taps(y, H, oh)
        x0, x1, fx = taps(xx, W, ow)
        top = x[:, :, y0, x0] * (1 - fx) + x[:, :, y0, x1] * fx
        bot = x[:, :, y1, x0] * (1 - fx) + x[:, :, y1, x1] * fx
        out[:, :, y, xx] = top * (1 - fy) + bot * fy
    return out


def count_list(M, N, k, n_b):
    """Weight count of a LIST block by listing every tensor's shape."""
    r = M // k
    shapes = [(r, M, 1, 1), (N // n_b, r, 1, 1), (r, 1, 3, 3), (N - N // n_b, r, 1, 1)]
    return sum(math.prod(s) for s in shapes)
