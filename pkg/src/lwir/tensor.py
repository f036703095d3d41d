"""Dense NCHW float32 tensors and the primitive operators the blocks compose.

A tensor is a plain 4-d ``numpy.ndarray`` of dtype float32 laid out as
(batch, channels, height, width).  Every operator returns a fresh array and
never mutates its inputs.

Convolutions are cross-correlations (no kernel flip).  Spatial taps of a
kernel of size ``k`` with dilation ``d`` sit at offsets ``d * (i - k // 2)``
around the output position, which makes ``padding="same"`` resolution
preserving at stride 1 for any kernel size.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

DTYPE = np.float32


class ShapeError(ValueError):
    """Raised when operand shapes or divisibility constraints are violated."""


class Shape4(NamedTuple):
    batch: int
    channels: int
    height: int
    width: int

    def validate(self) -> "Shape4":
        if min(self) < 1:
            raise ShapeError(f"all extents must be >= 1, got {tuple(self)}")
        return self

    @property
    def numel(self) -> int:
        return self.batch * self.channels * self.height * self.width


def as_tensor(x) -> np.ndarray:
    """Return ``x`` as a contiguous float32 NCHW array, validating rank."""
    arr = np.ascontiguousarray(x, dtype=DTYPE)
    if arr.ndim != 4:
        raise ShapeError(f"expected a rank-4 NCHW tensor, got shape {arr.shape}")
    Shape4(*arr.shape).validate()
    return arr


def _pair(v) -> tuple[int, int]:
    if isinstance(v, (tuple, list)):
        a, b = v
        return int(a), int(b)
    return int(v), int(v)


def conv_output_size(size: int, kernel: int, stride: int, dilation: int, padding: str) -> int:
    if padding == "same":
        return -(-size // stride)
    if padding == "none":
        span = dilation * (kernel - 1) + 1
        if size < span:
            raise ShapeError(f"input extent {size} smaller than kernel span {span}")
        return (size - span) // stride + 1
    raise ShapeError(f"unknown padding mode {padding!r}")


def _gather_taps(x, kh, kw, stride, dilation, padding):
    """Stack the strided/dilated input windows: returns [B, C, kh*kw, Ho, Wo]."""
    B, C, H, W = x.shape
    sh, sw = stride
    dh, dw = dilation
    Ho = conv_output_size(H, kh, sh, dh, padding)
    Wo = conv_output_size(W, kw, sw, dw, padding)
    if padding == "same":
        top, left = dh * (kh // 2), dw * (kw // 2)
        bottom = max(0, (Ho - 1) * sh + dh * (kh - 1 - kh // 2) - (H - 1))
        right = max(0, (Wo - 1) * sw + dw * (kw - 1 - kw // 2) - (W - 1))
        x = np.pad(x, ((0, 0), (0, 0), (top, bottom), (left, right)))
    taps = []
    for i in range(kh):
        y0 = i * dh
        for j in range(kw):
            x0 = j * dw
            taps.append(x[:, :, y0:y0 + (Ho - 1) * sh + 1:sh, x0:x0 + (Wo - 1) * sw + 1:sw])
    return np.stack(taps, axis=2), Ho, Wo


def conv2d(x, w, stride=1, dilation=1, groups: int = 1, padding: str = "same", bias=None) -> np.ndarray:
    """Grouped, strided, dilated 2-d cross-correlation.

    ``w`` has shape ``[N, M // groups, kh, kw]``.  Bias is optional and off by
    default.
    """
    x = as_tensor(x)
    w = np.asarray(w, dtype=DTYPE)
    B, M, H, W = x.shape
    if w.ndim != 4:
        raise ShapeError(f"conv weight must be rank 4, got {w.shape}")
    N, Mg, kh, kw = w.shape
    if groups < 1 or M % groups or N % groups:
        raise ShapeError(f"channels M={M}, N={N} not divisible by groups={groups}")
    if Mg * groups != M:
        raise ShapeError(f"weight expects {Mg * groups} input channels, input has {M}")
    stride, dilation = _pair(stride), _pair(dilation)
    if min(stride) < 1 or min(dilation) < 1:
        raise ShapeError("stride and dilation must be >= 1")

    Ng = N // groups
    if kh == kw == 1 and stride == (1, 1):
        cols = x.reshape(B, groups, Mg, H * W)
        Ho, Wo = H, W
    else:
        taps, Ho, Wo = _gather_taps(x, kh, kw, stride, dilation, padding)
        cols = taps.reshape(B, groups, Mg * kh * kw, Ho * Wo)
    wg = w.reshape(groups, Ng, Mg * kh * kw)
    out = np.matmul(wg[None], cols).reshape(B, N, Ho, Wo)
    if bias is not None:
        out = out + np.asarray(bias, dtype=DTYPE).reshape(1, N, 1, 1)
    return np.ascontiguousarray(out, dtype=DTYPE)


def depthwise_separable(x, w_dw, w_pw, stride=1, dilation=1) -> np.ndarray:
    """Per-channel spatial conv followed by a 1x1 cross-channel conv."""
    x = as_tensor(x)
    M = x.shape[1]
    w_dw = np.asarray(w_dw, dtype=DTYPE)
    w_pw = np.asarray(w_pw, dtype=DTYPE)
    if w_dw.shape[:2] != (M, 1):
        raise ShapeError(f"depthwise weight must be [{M}, 1, k, k], got {w_dw.shape}")
    if w_pw.ndim != 4 or w_pw.shape[1:] != (M, 1, 1):
        raise ShapeError(f"pointwise weight must be [N, {M}, 1, 1], got {w_pw.shape}")
    h = conv2d(x, w_dw, stride=stride, dilation=dilation, groups=M)
    return conv2d(h, w_pw)


def channel_shuffle(x, groups: int) -> np.ndarray:
    x = as_tensor(x)
    B, C, H, W = x.shape
    if groups < 1 or C % groups:
        raise ShapeError(f"channels {C} not divisible by groups {groups}")
    return np.ascontiguousarray(
        x.reshape(B, groups, C // groups, H, W).transpose(0, 2, 1, 3, 4).reshape(B, C, H, W)
    )


def pixel_shuffle(x, r: int) -> np.ndarray:
    """[B, C*r*r, H, W] -> [B, C, H*r, W*r] (periodic shuffling)."""
    x = as_tensor(x)
    B, C, H, W = x.shape
    if r < 1 or C % (r * r):
        raise ShapeError(f"channels {C} not divisible by r^2={r * r}")
    o = C // (r * r)
    y = x.reshape(B, o, r, r, H, W).transpose(0, 1, 4, 2, 5, 3)
    return np.ascontiguousarray(y.reshape(B, o, H * r, W * r))


def space_to_depth(x, r: int) -> np.ndarray:
    """Inverse of :func:`pixel_shuffle`."""
    x = as_tensor(x)
    B, C, H, W = x.shape
    if r < 1 or H % r or W % r:
        raise ShapeError(f"spatial size {H}x{W} not divisible by {r}")
    y = x.reshape(B, C, H // r, r, W // r, r).transpose(0, 1, 3, 5, 2, 4)
    return np.ascontiguousarray(y.reshape(B, C * r * r, H // r, W // r))


def _resize_axis(x: np.ndarray, out: int, axis: int) -> np.ndarray:
    n = x.shape[axis]
    if n == out:
        return x
    t = np.arange(out, dtype=np.float64)
    s = np.clip((t + 0.5) * (n / out) - 0.5, 0.0, n - 1)
    i0 = np.floor(s).astype(np.intp)
    i1 = np.minimum(i0 + 1, n - 1)
    frac = s - i0
    shape = [1] * x.ndim
    shape[axis] = out
    frac = frac.reshape(shape)
    a = np.take(x, i0, axis=axis)
    b = np.take(x, i1, axis=axis)
    # a + f*(b - a) returns a exactly when a == b
    return a + frac * (b - a)


def bilinear_resize(x, out_h: int, out_w: int) -> np.ndarray:
    """Half-pixel-centre bilinear resampling with border clamping."""
    x = as_tensor(x)
    if out_h < 1 or out_w < 1:
        raise ShapeError(f"output size must be >= 1, got {out_h}x{out_w}")
    y = _resize_axis(x.astype(np.float64), out_h, 2)
    y = _resize_axis(y, out_w, 3)
    return np.ascontiguousarray(y, dtype=DTYPE)


def transposed_output_size(size: int, kernel: int, stride: int, padding: int) -> int:
    return (size - 1) * stride + kernel - 2 * padding


def transposed_conv2d(x, w, stride: int = 1, padding: int = 0, output_size=None) -> np.ndarray:
    """Fractionally strided convolution with weight ``[M, N, k, k]``.

    The uncropped result has extent ``(H - 1) * stride + k``.  ``padding``
    crops that many rows/columns from the leading edge; the trailing edge is
    cropped to ``output_size`` if given, otherwise symmetrically.
    """
    x = as_tensor(x)
    w = np.asarray(w, dtype=DTYPE)
    B, M, H, W = x.shape
    if w.ndim != 4 or w.shape[0] != M:
        raise ShapeError(f"transposed weight must be [{M}, N, kh, kw], got {w.shape}")
    _, N, kh, kw = w.shape
    if stride < 1 or padding < 0:
        raise ShapeError("stride must be >= 1 and padding >= 0")
    full_h, full_w = (H - 1) * stride + kh, (W - 1) * stride + kw
    if output_size is None:
        out_h, out_w = full_h - 2 * padding, full_w - 2 * padding
    else:
        out_h, out_w = _pair(output_size)
    if out_h < 1 or out_w < 1 or padding + out_h > full_h or padding + out_w > full_w:
        raise ShapeError(
            f"unsupported padding {padding} / output size {out_h}x{out_w} for full extent {full_h}x{full_w}"
        )

    contrib = np.matmul(w.reshape(M, N * kh * kw).T[None], x.reshape(B, M, H * W))
    contrib = contrib.reshape(B, N, kh, kw, H, W)
    full = np.zeros((B, N, full_h, full_w), dtype=DTYPE)
    for i in range(kh):
        for j in range(kw):
            full[:, :, i:i + (H - 1) * stride + 1:stride, j:j + (W - 1) * stride + 1:stride] += contrib[:, :, i, j]
    return np.ascontiguousarray(full[:, :, padding:padding + out_h, padding:padding + out_w])


def relu(x) -> np.ndarray:
    return np.maximum(as_tensor(x), DTYPE(0))


def bn_inference(x, scale, shift) -> np.ndarray:
    """Per-channel affine ``scale * x + shift`` (batch-norm folded for inference)."""
    x = as_tensor(x)
    C = x.shape[1]
    scale = np.asarray(scale, dtype=DTYPE).reshape(-1)
    shift = np.asarray(shift, dtype=DTYPE).reshape(-1)
    if scale.shape != (C,) or shift.shape != (C,):
        raise ShapeError(f"bn parameters must have {C} entries")
    return np.ascontiguousarray(x * scale.reshape(1, C, 1, 1) + shift.reshape(1, C, 1, 1))


def concat_channels(xs: Sequence) -> np.ndarray:
    xs = [as_tensor(x) for x in xs]
    if not xs:
        raise ShapeError("concat needs at least one operand")
    ref = xs[0].shape
    for x in xs[1:]:
        if x.shape[0] != ref[0] or x.shape[2:] != ref[2:]:
            raise ShapeError(f"concat operands disagree: {ref} vs {x.shape}")
    return np.concatenate(xs, axis=1)


def add(x, y) -> np.ndarray:
    x, y = as_tensor(x), as_tensor(y)
    if x.shape != y.shape:
        raise ShapeError(f"add operands disagree: {x.shape} vs {y.shape}")
    return x + y
