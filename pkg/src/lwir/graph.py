"""Declarative network DAGs: JSON format, validation, shape propagation, execution.

A network file looks like::

    {"name": "tiny",
     "input": {"channels": 3, "height": null, "width": null},
     "nodes": [{"id": "c1", "op": "conv2d", "in": ["input"], "out_channels": 8}],
     "output": "c1"}

``input`` is the implicit id of the network input.  Null height/width make the
network resolution-polymorphic; spatial checks then run when a resolution is
supplied.  An optional top-level ``flops_per_mac`` (default 1) records the
FLOP counting convention used when reporting against published tables.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Mapping, Optional

import numpy as np

from . import blocks as B
from . import tensor as T
from .blocks import BNLayer, ConfigError, ConvLayer
from .tensor import ShapeError
from .weights import WeightError, WeightStore, seeded_tensor

INPUT_ID = "input"


class GraphError(ValueError):
    def __init__(self, node_id: Optional[str], reason: str):
        self.node_id = node_id
        self.reason = reason
        where = f"node {node_id!r}: " if node_id else ""
        super().__init__(where + reason)


@dataclass(frozen=True)
class NodeSpec:
    id: str
    op: str
    inputs: tuple[str, ...]
    params: Mapping[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"id": self.id, "op": self.op, "in": list(self.inputs), **dict(self.params)}


@dataclass(frozen=True)
class NetworkSpec:
    name: str
    in_channels: int
    in_height: Optional[int]
    in_width: Optional[int]
    nodes: tuple[NodeSpec, ...]
    output: str
    flops_per_mac: int = 1

    def node(self, node_id: str) -> NodeSpec:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "input": {"channels": self.in_channels, "height": self.in_height, "width": self.in_width},
            "nodes": [n.to_dict() for n in self.nodes],
            "output": self.output,
        }
        if self.flops_per_mac != 1:
            d["flops_per_mac"] = self.flops_per_mac
        return d


# (channels, height or None, width or None); batch is supplied at run time
Shape3 = tuple[int, Optional[int], Optional[int]]


@dataclass(frozen=True)
class Primitive:
    """One piece of work inside a node, with the spatial sizes it runs at."""

    kind: str  # "conv", "bn", "bias", "resize"
    layer: Any
    channels: int
    in_hw: tuple[Optional[int], Optional[int]]
    out_hw: tuple[Optional[int], Optional[int]]


def _spatial(h, w, fn):
    return (None if h is None else fn(h)), (None if w is None else fn(w))


class Op:
    """Base class for node kinds; subclasses fill in the hooks they need."""

    defaults: dict = {}
    required: tuple = ()
    arity: tuple[int, Optional[int]] = (1, 1)

    def normalize(self, params: dict) -> dict:
        unknown = set(params) - set(self.defaults) - set(self.required)
        if unknown:
            raise ConfigError(f"unknown keys {sorted(unknown)}")
        missing = [k for k in self.required if k not in params]
        if missing:
            raise ConfigError(f"missing keys {missing}")
        return {**self.defaults, **params}

    def infer(self, p, shapes: list[Shape3]) -> Shape3:
        return shapes[0]

    def primitives(self, p, shapes: list[Shape3], out: Shape3) -> list[Primitive]:
        return []

    def run(self, p, xs, w):
        raise NotImplementedError


def _post_ops(p, c, hw) -> list[Primitive]:
    prims = []
    if p.get("bias"):
        prims.append(Primitive("bias", "bias", c, hw, hw))
    if p.get("bn"):
        prims.append(Primitive("bn", BNLayer("bn", c), c, hw, hw))
    return prims


def _apply_post(p, y, w):
    if p.get("bn"):
        y = T.bn_inference(y, w["bn_scale"], w["bn_shift"])
    if p.get("relu"):
        y = T.relu(y)
    return y


def _conv_prims(layers, hw_in, hw_out):
    prims = []
    for layer in layers:
        if isinstance(layer, ConvLayer):
            prims.append(Primitive("conv", layer, layer.out_channels, hw_in, hw_out))
        else:
            prims.append(Primitive("bn", layer, layer.channels, hw_out, hw_out))
    return prims


class Conv2dOp(Op):
    required = ("out_channels",)
    defaults = dict(kernel=3, stride=1, dilation=1, groups=1, padding="same", bias=False, bn=False, relu=False)

    def layer(self, p, c_in):
        return ConvLayer("weight", c_in, p["out_channels"], p["kernel"], p["groups"], p["stride"], p["dilation"])

    def infer(self, p, shapes):
        c, h, w = shapes[0]
        n, g = p["out_channels"], p["groups"]
        if g < 1 or c % g or n % g:
            raise ShapeError(f"channels {c}->{n} not divisible by groups {g}")
        if p["stride"] < 1 or p["dilation"] < 1 or p["kernel"] < 1:
            raise ShapeError("kernel, stride and dilation must be >= 1")
        if p["padding"] not in ("same", "none"):
            raise ShapeError(f"padding must be 'same' or 'none', got {p['padding']!r}")
        fn = lambda s: T.conv_output_size(s, p["kernel"], p["stride"], p["dilation"], p["padding"])
        return (n, *_spatial(h, w, fn))

    def primitives(self, p, shapes, out):
        hw_in, hw_out = shapes[0][1:], out[1:]
        layer = self.layer(p, shapes[0][0])
        return [Primitive("conv", layer, layer.out_channels, hw_in, hw_out)] + _post_ops(p, out[0], hw_out)

    def run(self, p, xs, w):
        y = T.conv2d(xs[0], w["weight"], stride=p["stride"], dilation=p["dilation"], groups=p["groups"],
                     padding=p["padding"], bias=w["bias"] if p["bias"] else None)
        return _apply_post(p, y, w)


class SeparableOp(Op):
    required = ("out_channels",)
    defaults = dict(kernel=3, stride=1, dilation=1, bn=False, relu=False)

    def layers(self, p, c_in):
        return [
            ConvLayer("dw", c_in, c_in, p["kernel"], c_in, p["stride"], p["dilation"]),
            ConvLayer("pw", c_in, p["out_channels"]),
        ]

    def infer(self, p, shapes):
        c, h, w = shapes[0]
        if p["stride"] < 1 or p["dilation"] < 1 or p["kernel"] < 1:
            raise ShapeError("kernel, stride and dilation must be >= 1")
        fn = lambda s: T.conv_output_size(s, p["kernel"], p["stride"], p["dilation"], "same")
        return (p["out_channels"], *_spatial(h, w, fn))

    def primitives(self, p, shapes, out):
        dw, pw = self.layers(p, shapes[0][0])
        hw_in, hw_out = shapes[0][1:], out[1:]
        return [Primitive("conv", dw, dw.out_channels, hw_in, hw_out),
                Primitive("conv", pw, pw.out_channels, hw_out, hw_out)] + _post_ops(p, out[0], hw_out)

    def run(self, p, xs, w):
        y = T.depthwise_separable(xs[0], w["dw"], w["pw"], stride=p["stride"], dilation=p["dilation"])
        return _apply_post(p, y, w)


class ListOp(Op):
    required = ("out_channels",)
    defaults = dict(k=4, n_b=2)

    def cfg(self, p, c_in):
        return B.ListConfig(c_in, p["out_channels"], p["k"], p["n_b"])

    def infer(self, p, shapes):
        c, h, w = shapes[0]
        self.cfg(p, c)
        return (p["out_channels"], h, w)

    def primitives(self, p, shapes, out):
        return _conv_prims(self.cfg(p, shapes[0][0]).layers(), out[1:], out[1:])

    def run(self, p, xs, w):
        return B.list_forward(xs[0], self.cfg(p, xs[0].shape[1]), w)


class GsatOp(Op):
    defaults = dict(groups=8, dilation=1)

    def cfg(self, p, c_in):
        return B.GsatConfig(c_in, p["groups"], p["dilation"])

    def infer(self, p, shapes):
        self.cfg(p, shapes[0][0])
        return shapes[0]

    def primitives(self, p, shapes, out):
        return _conv_prims(self.cfg(p, shapes[0][0]).layers(), out[1:], out[1:])

    def run(self, p, xs, w):
        return B.gsat_forward(xs[0], self.cfg(p, xs[0].shape[1]), w)


class UpsampleOp(Op):
    required = ("mode", "out_channels")
    defaults = dict(scale=2, kernel=3, k=4, n_b=2, bn=False, relu=False)

    def cfg(self, p, c_in):
        return B.UpsampleConfig(p["mode"], p["scale"], c_in, p["out_channels"], p["kernel"], p["k"], p["n_b"])

    def infer(self, p, shapes):
        c, h, w = shapes[0]
        self.cfg(p, c)
        r = p["scale"]
        return (p["out_channels"], *_spatial(h, w, lambda s: s * r))

    def primitives(self, p, shapes, out):
        cfg = self.cfg(p, shapes[0][0])
        hw_in, hw_out = shapes[0][1:], out[1:]
        if cfg.mode == "bilinear_list":
            prims = [Primitive("resize", None, cfg.in_channels, hw_in, hw_out)]
            prims += _conv_prims(cfg.layers(), hw_out, hw_out)
        else:
            prims = _conv_prims(cfg.layers(), hw_in, hw_in)
        return prims + _post_ops(p, out[0], hw_out)

    def run(self, p, xs, w):
        return _apply_post(p, B.upsample_forward(xs[0], self.cfg(p, xs[0].shape[1]), w), w)


class DownsampleOp(Op):
    required = ("out_channels",)
    defaults = dict(factor=2, k=4, n_b=2)

    def cfg(self, p, c_in):
        return B.ListConfig(c_in, p["out_channels"], p["k"], p["n_b"])

    def infer(self, p, shapes):
        c, h, w = shapes[0]
        self.cfg(p, c)
        f = p["factor"]
        if f < 2:
            raise ConfigError(f"downsample factor must be >= 2, got {f}")
        for s in (h, w):
            if s is not None and s < f:
                raise ShapeError(f"spatial extent {s} smaller than factor {f}")
        return (p["out_channels"], *_spatial(h, w, lambda s: B.downsampled_size(s, f)))

    def primitives(self, p, shapes, out):
        hw_in, hw_out = shapes[0][1:], out[1:]
        prims = [Primitive("resize", None, shapes[0][0], hw_in, hw_out)]
        return prims + _conv_prims(self.cfg(p, shapes[0][0]).layers(), hw_out, hw_out)

    def run(self, p, xs, w):
        return B.downsample_forward(xs[0], self.cfg(p, xs[0].shape[1]), p["factor"], w)


class TransposedConvOp(Op):
    required = ("out_channels", "kernel", "stride")
    defaults = dict(padding=0, bias=False, bn=False, relu=False)

    def layer(self, p, c_in):
        return ConvLayer("weight", c_in, p["out_channels"], p["kernel"], stride=p["stride"], transposed=True)

    def infer(self, p, shapes):
        c, h, w = shapes[0]
        if p["stride"] < 1 or p["padding"] < 0:
            raise ShapeError("stride must be >= 1 and padding >= 0")
        fn = lambda s: T.transposed_output_size(s, p["kernel"], p["stride"], p["padding"])
        out = (p["out_channels"], *_spatial(h, w, fn))
        if any(s is not None and s < 1 for s in out[1:]):
            raise ShapeError(f"unsupported padding {p['padding']} for kernel {p['kernel']}")
        return out

    def primitives(self, p, shapes, out):
        layer = self.layer(p, shapes[0][0])
        hw_out = out[1:]
        return [Primitive("conv", layer, layer.out_channels, shapes[0][1:], hw_out)] + _post_ops(p, out[0], hw_out)

    def run(self, p, xs, w):
        y = T.transposed_conv2d(xs[0], w["weight"], p["stride"], p["padding"])
        if p["bias"]:
            y = y + w["bias"].reshape(1, -1, 1, 1)
        return _apply_post(p, y, w)


class ResizeOp(Op):
    defaults = dict(scale=None, factor=None, size=None)

    def normalize(self, params):
        p = super().normalize(params)
        if sum(p[k] is not None for k in ("scale", "factor", "size")) != 1:
            raise ConfigError("bilinear_resize needs exactly one of scale, factor, size")
        return p

    def infer(self, p, shapes):
        c, h, w = shapes[0]
        if p["size"] is not None:
            oh, ow = p["size"]
            return (c, int(oh), int(ow))
        if p["scale"] is not None:
            if p["scale"] < 1:
                raise ConfigError("scale must be >= 1")
            return (c, *_spatial(h, w, lambda s: s * p["scale"]))
        if p["factor"] < 1:
            raise ConfigError("factor must be >= 1")
        return (c, *_spatial(h, w, lambda s: B.downsampled_size(s, p["factor"])))

    def primitives(self, p, shapes, out):
        return [Primitive("resize", None, out[0], shapes[0][1:], out[1:])]

    def run(self, p, xs, w):
        _, _, H, W = xs[0].shape
        _, oh, ow = self.infer(p, [(xs[0].shape[1], H, W)])
        return T.bilinear_resize(xs[0], oh, ow)


class ReluOp(Op):
    def run(self, p, xs, w):
        return T.relu(xs[0])


class BnOp(Op):
    def primitives(self, p, shapes, out):
        return [Primitive("bn", BNLayer("bn", out[0]), out[0], out[1:], out[1:])]

    def run(self, p, xs, w):
        return T.bn_inference(xs[0], w["bn_scale"], w["bn_shift"])


def _same_spatial(shapes):
    h, w = shapes[0][1:]
    for s in shapes[1:]:
        for a, b in ((h, s[1]), (w, s[2])):
            if a is not None and b is not None and a != b:
                raise ShapeError(f"spatial mismatch {shapes[0]} vs {s}")
    return h, w


class ConcatOp(Op):
    arity = (1, None)

    def infer(self, p, shapes):
        return (sum(s[0] for s in shapes), *_same_spatial(shapes))

    def run(self, p, xs, w):
        return T.concat_channels(xs)


class AddOp(Op):
    arity = (2, 2)

    def infer(self, p, shapes):
        if shapes[0][0] != shapes[1][0]:
            raise ShapeError(f"add channel mismatch {shapes[0][0]} vs {shapes[1][0]}")
        return (shapes[0][0], *_same_spatial(shapes))

    def run(self, p, xs, w):
        return T.add(xs[0], xs[1])


class PixelShuffleOp(Op):
    required = ("scale",)

    def infer(self, p, shapes):
        c, h, w = shapes[0]
        r = p["scale"]
        if r < 1 or c % (r * r):
            raise ShapeError(f"channels {c} not divisible by scale^2={r * r}")
        return (c // (r * r), *_spatial(h, w, lambda s: s * r))

    def run(self, p, xs, w):
        return T.pixel_shuffle(xs[0], p["scale"])


OPS: dict[str, Op] = {
    "conv2d": Conv2dOp(),
    "depthwise_separable": SeparableOp(),
    "list": ListOp(),
    "gsat": GsatOp(),
    "upsample": UpsampleOp(),
    "downsample": DownsampleOp(),
    "transposed_conv": TransposedConvOp(),
    "bilinear_resize": ResizeOp(),
    "relu": ReluOp(),
    "bn": BnOp(),
    "concat": ConcatOp(),
    "add": AddOp(),
    "pixel_shuffle": PixelShuffleOp(),
}


def _parse_node(raw) -> NodeSpec:
    if not isinstance(raw, dict):
        raise GraphError(None, f"node entries must be objects, got {raw!r}")
    node_id = raw.get("id")
    if not isinstance(node_id, str) or not node_id:
        raise GraphError(None, f"node without a string id: {raw!r}")
    if node_id == INPUT_ID:
        raise GraphError(node_id, "'input' is reserved for the network input")
    op = raw.get("op")
    if op not in OPS:
        raise GraphError(node_id, f"unknown op {op!r}")
    inputs = raw.get("in", [])
    if not isinstance(inputs, list) or not all(isinstance(i, str) for i in inputs):
        raise GraphError(node_id, "'in' must be a list of node ids")
    params = {k: v for k, v in raw.items() if k not in ("id", "op", "in")}
    try:
        params = OPS[op].normalize(params)
    except ConfigError as exc:
        raise GraphError(node_id, str(exc)) from None
    return NodeSpec(node_id, op, tuple(inputs), params)


def network_from_dict(doc) -> NetworkSpec:
    if not isinstance(doc, dict):
        raise GraphError(None, "network document must be a JSON object")
    for key in ("name", "input", "nodes", "output"):
        if key not in doc:
            raise GraphError(None, f"missing top-level key {key!r}")
    inp = doc["input"]
    try:
        channels = int(inp["channels"])
        height, width = inp.get("height"), inp.get("width")
    except (KeyError, TypeError, ValueError):
        raise GraphError(None, "input must be {'channels': int, 'height': int|null, 'width': int|null}") from None
    if channels < 1 or any(s is not None and (not isinstance(s, int) or s < 1) for s in (height, width)):
        raise GraphError(None, "input extents must be positive integers or null")
    fpm = doc.get("flops_per_mac", 1)
    if not isinstance(fpm, int) or fpm < 1:
        raise GraphError(None, f"flops_per_mac must be a positive integer, got {fpm!r}")
    nodes = tuple(_parse_node(n) for n in doc["nodes"])
    net = NetworkSpec(str(doc["name"]), channels, height, width, nodes, str(doc["output"]), fpm)
    validate(net)
    return net


def validate(net: NetworkSpec) -> dict[str, Shape3]:
    """Check DAG order, arities and shapes against the input template."""
    seen = {INPUT_ID}
    for node in net.nodes:
        if node.id in seen:
            raise GraphError(node.id, "duplicate node id")
        lo, hi = OPS[node.op].arity
        if len(node.inputs) < lo or (hi is not None and len(node.inputs) > hi):
            raise GraphError(node.id, f"op {node.op} takes {lo}..{hi or 'n'} inputs, got {len(node.inputs)}")
        for src in node.inputs:
            if src not in seen:
                raise GraphError(node.id, f"input {src!r} is not defined before this node")
        seen.add(node.id)
    if net.output not in seen:
        raise GraphError(None, f"output {net.output!r} is not a defined node")
    return propagate(net, net.in_height, net.in_width)


def propagate(net: NetworkSpec, height=None, width=None) -> dict[str, Shape3]:
    """Per-node output shapes for the given (or template) input resolution."""
    h = net.in_height if height is None else height
    w = net.in_width if width is None else width
    shapes: dict[str, Shape3] = {INPUT_ID: (net.in_channels, h, w)}
    for node in net.nodes:
        ins = [shapes[i] for i in node.inputs]
        try:
            out = OPS[node.op].infer(node.params, ins)
        except (ShapeError, ConfigError, TypeError, ValueError, KeyError) as exc:
            raise GraphError(node.id, str(exc)) from None
        if any(s is not None and s < 1 for s in out[1:]):
            raise GraphError(node.id, f"degenerate output shape {out}")
        shapes[node.id] = out
    return shapes


def node_primitives(net: NetworkSpec, shapes: Mapping[str, Shape3]) -> dict[str, list[Primitive]]:
    return {
        n.id: OPS[n.op].primitives(n.params, [shapes[i] for i in n.inputs], shapes[n.id])
        for n in net.nodes
    }


def load_network(path) -> NetworkSpec:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise GraphError(None, f"{path}: parse error: {exc}") from None
    return network_from_dict(doc)


def save_network(net: NetworkSpec, path) -> None:
    Path(path).write_text(json.dumps(net.to_dict(), indent=1) + "\n")


def required_weights(net: NetworkSpec) -> dict[str, tuple[tuple[int, ...], str, int]]:
    """name -> (shape, kind, fan_in) for every weight the network needs."""
    shapes = propagate(net)
    req = {}
    for node_id, prims in node_primitives(net, shapes).items():
        for prim in prims:
            if prim.kind == "conv":
                req[f"{node_id}/{prim.layer.name}"] = (prim.layer.weight_shape, "conv", prim.layer.fan_in)
            elif prim.kind == "bn":
                s, b = prim.layer.names
                req[f"{node_id}/{s}"] = ((prim.channels,), "bn_scale", 0)
                req[f"{node_id}/{b}"] = ((prim.channels,), "bn_shift", 0)
            elif prim.kind == "bias":
                req[f"{node_id}/bias"] = ((prim.channels,), "bias", 0)
    return req


def check_weights(net: NetworkSpec, store: Mapping[str, np.ndarray]) -> None:
    req = required_weights(net)
    for name, (shape, _, _) in req.items():
        if name not in store:
            raise WeightError(f"missing weight {name!r}")
        if tuple(store[name].shape) != shape:
            raise WeightError(f"weight {name!r} has shape {tuple(store[name].shape)}, expected {shape}")
    orphans = sorted(set(store) - set(req))
    if orphans:
        raise WeightError(f"weights not used by the network: {orphans[:5]}")


def seed_weights(net: NetworkSpec, seed: int) -> WeightStore:
    """Conv weights from the seeded generator; BN is identity and biases zero."""
    tensors = {}
    for name, (shape, kind, fan_in) in required_weights(net).items():
        if kind == "conv":
            tensors[name] = seeded_tensor(name, shape, fan_in, seed)
        elif kind == "bn_scale":
            tensors[name] = np.ones(shape, np.float32)
        else:
            tensors[name] = np.zeros(shape, np.float32)
    return WeightStore(tensors, provenance=f"seeded({seed})")


def forward(net: NetworkSpec, weights: Mapping[str, np.ndarray], x, trace: Callable | None = None) -> np.ndarray:
    """Execute the network in declaration order.

    ``trace(node_id, array)`` is called after every node when given.
    """
    x = T.as_tensor(x)
    _, c, h, w = x.shape
    if c != net.in_channels:
        raise GraphError(None, f"input has {c} channels, network expects {net.in_channels}")
    for want, got, axis in ((net.in_height, h, "height"), (net.in_width, w, "width")):
        if want is not None and want != got:
            raise GraphError(None, f"input {axis} {got} does not match template {want}")
    store = weights if isinstance(weights, WeightStore) else WeightStore(dict(weights))
    values = {INPUT_ID: x}
    for node in net.nodes:
        xs = [values[i] for i in node.inputs]
        try:
            y = OPS[node.op].run(node.params, xs, store.scoped(node.id))
        except ShapeError as exc:
            raise GraphError(node.id, f"internal shape error: {exc}") from None
        values[node.id] = y
        if trace is not None:
            trace(node.id, y)
    return values[net.output]


def preset_names() -> list[str]:
    files = resources.files("lwir") / "presets"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def preset_path(name: str) -> Path:
    if name.endswith(".json"):
        name = name[:-5]
    path = resources.files("lwir") / "presets" / f"{name}.json"
    if not path.is_file():
        raise GraphError(None, f"no preset named {name!r}")
    return Path(str(path))


def load_preset(name: str) -> NetworkSpec:
    return load_network(preset_path(name))


def presets() -> list[NetworkSpec]:
    return [load_preset(n) for n in preset_names()]


def resolve_network(ref: str) -> NetworkSpec:
    """Load ``ref`` as a file path, falling back to a shipped preset name."""
    path = Path(ref)
    if path.is_file():
        return load_network(path)
    return load_preset(Path(ref).name)
