"""Composite layers built from the tensor primitives.

Each block is a frozen config plus a pure forward function taking a mapping
of named weights.  ``layers()`` on a config lists the primitive conv and
batch-norm layers the block expands into; forward passes, weight seeding and
cost enumeration all read that one list.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from . import tensor as T
from .tensor import ShapeError


class ConfigError(ValueError):
    """Invalid block hyperparameters."""


@dataclass(frozen=True)
class ConvLayer:
    name: str
    in_channels: int
    out_channels: int
    kernel: int = 1
    groups: int = 1
    stride: int = 1
    dilation: int = 1
    transposed: bool = False

    @property
    def weight_shape(self) -> tuple[int, ...]:
        if self.transposed:
            return (self.in_channels, self.out_channels, self.kernel, self.kernel)
        return (self.out_channels, self.in_channels // self.groups, self.kernel, self.kernel)

    @property
    def params(self) -> int:
        return int(np.prod(self.weight_shape))

    @property
    def fan_in(self) -> int:
        if self.transposed:
            return self.in_channels * self.kernel * self.kernel
        return (self.in_channels // self.groups) * self.kernel * self.kernel

    def macs(self, in_h: int, in_w: int, out_h: int, out_w: int) -> int:
        """Multiply-accumulates for one image."""
        if self.transposed:
            return self.in_channels * self.out_channels * self.kernel ** 2 * in_h * in_w
        return self.out_channels * out_h * out_w * self.fan_in


@dataclass(frozen=True)
class BNLayer:
    name: str
    channels: int

    @property
    def names(self) -> tuple[str, str]:
        return f"{self.name}_scale", f"{self.name}_shift"


Layer = Union[ConvLayer, BNLayer]


def _bn(x, weights, name):
    return T.bn_inference(x, weights[f"{name}_scale"], weights[f"{name}_shift"])


@dataclass(frozen=True)
class ListConfig:
    in_channels: int
    out_channels: int
    k: int = 4
    n_b: int = 2

    def __post_init__(self):
        M, N, k, n_b = self.in_channels, self.out_channels, self.k, self.n_b
        if M < 1 or N < 1:
            raise ConfigError(f"LIST channels must be positive, got {M}->{N}")
        if k < 2 or M % k:
            raise ConfigError(f"LIST needs k >= 2 dividing M; got M={M}, k={k}")
        if n_b < 2 or N % n_b:
            raise ConfigError(f"LIST needs n_b >= 2 dividing N; got N={N}, n_b={n_b}")

    @property
    def reduced(self) -> int:
        return self.in_channels // self.k

    @property
    def branch_channels(self) -> int:
        return self.out_channels // self.n_b

    @property
    def spatial_channels(self) -> int:
        return self.out_channels - self.branch_channels

    def layers(self) -> list[Layer]:
        r = self.reduced
        return [
            ConvLayer("stage1", self.in_channels, r),
            BNLayer("bn1", r),
            ConvLayer("branch1x1", r, self.branch_channels),
            ConvLayer("dw", r, r, kernel=3, groups=r),
            ConvLayer("pw", r, self.spatial_channels),
            BNLayer("bn2", self.out_channels),
        ]


@dataclass(frozen=True)
class GsatConfig:
    channels: int
    groups: int = 8
    dilation: int = 1

    def __post_init__(self):
        if self.channels < 1 or self.groups < 1 or self.channels % self.groups:
            raise ConfigError(f"GSAT needs groups dividing channels; got M={self.channels}, g={self.groups}")
        if self.dilation < 1:
            raise ConfigError(f"dilation must be >= 1, got {self.dilation}")

    def layers(self) -> list[Layer]:
        M, g = self.channels, self.groups
        return [
            ConvLayer("dil", M, M, kernel=3, groups=g, dilation=self.dilation),
            BNLayer("bn1", M),
            ConvLayer("pw", M, M, groups=g),
            BNLayer("bn2", M),
        ]


UPSAMPLE_MODES = ("subpixel_normal", "subpixel_separable", "bilinear_list")


@dataclass(frozen=True)
class UpsampleConfig:
    mode: str
    scale: int
    in_channels: int
    out_channels: int
    kernel: int = 3
    k: int = 4
    n_b: int = 2

    def __post_init__(self):
        if self.mode not in UPSAMPLE_MODES:
            raise ConfigError(f"unknown upsample mode {self.mode!r}")
        if self.scale < 1 or self.kernel < 1:
            raise ConfigError("scale and kernel must be >= 1")
        if self.mode == "bilinear_list":
            self.list_config()

    @property
    def conv_channels(self) -> int:
        return self.out_channels * self.scale ** 2

    def list_config(self) -> ListConfig:
        return ListConfig(self.in_channels, self.out_channels, self.k, self.n_b)

    def layers(self) -> list[Layer]:
        i, kk = self.in_channels, self.kernel
        if self.mode == "subpixel_normal":
            return [ConvLayer("conv", i, self.conv_channels, kernel=kk)]
        if self.mode == "subpixel_separable":
            return [ConvLayer("dw", i, i, kernel=kk, groups=i), ConvLayer("pw", i, self.conv_channels)]
        return self.list_config().layers()


def _check_channels(x, expected, what):
    if x.shape[1] != expected:
        raise ShapeError(f"{what} expects {expected} input channels, got {x.shape[1]}")


def list_forward(x, cfg: ListConfig, weights: Mapping[str, np.ndarray]) -> np.ndarray:
    x = T.as_tensor(x)
    _check_channels(x, cfg.in_channels, "LIST")
    h = T.relu(_bn(T.conv2d(x, weights["stage1"]), weights, "bn1"))
    a = T.conv2d(h, weights["branch1x1"])
    b = T.depthwise_separable(h, weights["dw"], weights["pw"])
    return T.relu(_bn(T.concat_channels([a, b]), weights, "bn2"))


def gsat_forward(x, cfg: GsatConfig, weights: Mapping[str, np.ndarray]) -> np.ndarray:
    x = T.as_tensor(x)
    _check_channels(x, cfg.channels, "GSAT")
    g = cfg.groups
    h = T.conv2d(x, weights["dil"], groups=g, dilation=cfg.dilation)
    h = T.relu(_bn(h, weights, "bn1"))
    h = T.channel_shuffle(h, g)
    h = _bn(T.conv2d(h, weights["pw"], groups=g), weights, "bn2")
    return T.relu(T.add(h, x))


def upsample_forward(x, cfg: UpsampleConfig, weights: Mapping[str, np.ndarray]) -> np.ndarray:
    x = T.as_tensor(x)
    _check_channels(x, cfg.in_channels, "upsample")
    r = cfg.scale
    if cfg.mode == "subpixel_normal":
        return T.pixel_shuffle(T.conv2d(x, weights["conv"]), r)
    if cfg.mode == "subpixel_separable":
        return T.pixel_shuffle(T.depthwise_separable(x, weights["dw"], weights["pw"]), r)
    _, _, H, W = x.shape
    return list_forward(T.bilinear_resize(x, H * r, W * r), cfg.list_config(), weights)


def downsampled_size(size: int, factor: int) -> int:
    return -(-size // factor)


def downsample_forward(x, cfg: ListConfig, factor: int, weights: Mapping[str, np.ndarray]) -> np.ndarray:
    x = T.as_tensor(x)
    _, _, H, W = x.shape
    if factor < 2:
        raise ConfigError(f"downsample factor must be >= 2, got {factor}")
    if H < factor or W < factor:
        raise ShapeError(f"spatial size {H}x{W} too small for factor {factor}")
    y = T.bilinear_resize(x, downsampled_size(H, factor), downsampled_size(W, factor))
    return list_forward(y, cfg, weights)


def random_weights(layers, seed: int = 0, bn_identity: bool = True) -> dict[str, np.ndarray]:
    """Gaussian conv weights for ad-hoc experiments; BN is identity unless asked."""
    rng = np.random.default_rng(seed)
    out: dict[str, np.ndarray] = {}
    for layer in layers:
        if isinstance(layer, ConvLayer):
            std = np.sqrt(2.0 / layer.fan_in)
            out[layer.name] = (rng.standard_normal(layer.weight_shape) * std).astype(np.float32)
        else:
            s, b = layer.names
            if bn_identity:
                out[s] = np.ones(layer.channels, np.float32)
                out[b] = np.zeros(layer.channels, np.float32)
            else:
                out[s] = rng.uniform(0.5, 1.5, layer.channels).astype(np.float32)
                out[b] = rng.uniform(-0.1, 0.1, layer.channels).astype(np.float32)
    return out
