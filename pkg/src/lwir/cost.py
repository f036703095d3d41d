"""Parameter and MAC accounting by enumerating each node's primitive layers.

``paper`` mode counts convolution weights and convolution MACs only, the
convention of the published tables.  ``full`` mode adds biases, batch-norm
affine terms (two parameters and one MAC per element) and bilinear
interpolation (four MACs per output element).

``flops`` fields are MAC counts.  A network may declare ``flops_per_mac`` to
state how a published table counted; ``CostReport.reported_flops`` applies it.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from . import formulas as F
from .graph import INPUT_ID, NetworkSpec, NodeSpec, OPS, Primitive, Shape3, propagate

MODES = ("paper", "full")


@dataclass(frozen=True)
class CostEntry:
    node: str
    op: str
    params: int
    flops: Optional[int]
    formula_params: Optional[int] = None
    formula_flops: Optional[int] = None
    ratios: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CostReport:
    name: str
    mode: str
    resolution: tuple[Optional[int], Optional[int]]
    entries: tuple[CostEntry, ...]
    flops_per_mac: int = 1

    @property
    def total_params(self) -> int:
        return sum(e.params for e in self.entries)

    @property
    def total_flops(self) -> Optional[int]:
        if any(e.flops is None for e in self.entries):
            return None
        return sum(e.flops for e in self.entries)

    @property
    def reported_flops(self) -> Optional[int]:
        t = self.total_flops
        return None if t is None else t * self.flops_per_mac

    @property
    def memory_mb(self) -> float:
        """Model size estimate at 4 bytes per weight, in MiB."""
        return self.total_params * 4 / 2 ** 20

    def totals(self) -> dict:
        flops = self.reported_flops
        return {
            "params": self.total_params,
            "macs": self.total_flops,
            "flops": flops,
            "flops_per_mac": self.flops_per_mac,
            "params_1e6": self.total_params / 1e6,
            "flops_1e9": None if flops is None else flops / 1e9,
            "memory_mb_est": self.memory_mb,
        }

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "mode": self.mode,
            "resolution": list(self.resolution),
            "entries": [asdict(e) for e in self.entries],
            "totals": self.totals(),
        }


def _prim_cost(prim: Primitive, mode: str) -> tuple[int, Optional[int]]:
    ih, iw = prim.in_hw
    oh, ow = prim.out_hw
    resolved = None not in (ih, iw, oh, ow)
    if prim.kind == "conv":
        layer = prim.layer
        return layer.params, (layer.macs(ih, iw, oh, ow) if resolved else None)
    if mode == "paper":
        return 0, 0
    if prim.kind == "bias":
        return prim.channels, 0
    if prim.kind == "bn":
        return 2 * prim.channels, (prim.channels * oh * ow if resolved else None)
    if prim.kind == "resize":
        return 0, (4 * prim.channels * oh * ow if resolved else None)
    raise ValueError(f"unknown primitive kind {prim.kind!r}")


def _closed_form(node: NodeSpec, ins: list[Shape3], out: Shape3) -> tuple[Optional[int], Optional[int], dict]:
    p = node.params
    c_in = ins[0][0] if ins else None
    n_out, oh, ow = out
    hw = None if oh is None or ow is None else oh * ow
    ratios: dict = {}
    if node.op == "conv2d":
        fp = F.conv_params(c_in, n_out, p["kernel"], p["groups"])
    elif node.op == "transposed_conv":
        fp = F.conv_params(c_in, n_out, p["kernel"])
        ih, iw = ins[0][1:]
        ff = None if ih is None or iw is None else fp * ih * iw
        return fp, ff, ratios
    elif node.op == "depthwise_separable":
        fp = F.separable_params(c_in, n_out, p["kernel"])
        ratios["3x3/separable"] = F.conv_params(c_in, n_out, p["kernel"]) / fp
    elif node.op in ("list", "downsample") or (node.op == "upsample" and p["mode"] == "bilinear_list"):
        fp = F.list_params(c_in, n_out, p["k"], p["n_b"])
        r = F.ratio_report(c_in, n_out, p["k"], p["n_b"])
        ratios["3x3/LIST"] = float(r.list_exact)
        ratios["sep3x3/LIST"] = float(r.sep_list_exact)
    elif node.op == "gsat":
        fp = F.gsat_params(c_in, p["groups"])
        ratios["dil3x3/GSAT"] = float(Fraction(F.dilated_params(c_in), fp))
    elif node.op == "upsample":
        r = p["scale"]
        kk = p["kernel"]
        c_l = n_out * r * r
        if p["mode"] == "subpixel_normal":
            fp = F.subpixel_lr_params(kk, c_in, c_l)
        else:
            fp = F.subpixel_sep_params(kk, c_in, c_l)
            if r == 2:
                ratios["sep_subpixel/HR"] = float(F.subpixel_sep_ratio(kk, c_l))
        ih, iw = ins[0][1:]
        ff = None if ih is None or iw is None else fp * ih * iw
        return fp, ff, ratios
    else:
        return None, None, ratios
    return fp, (None if hw is None else fp * hw), ratios


def count_node(node: NodeSpec, in_shapes: list[Shape3], mode: str = "paper") -> CostEntry:
    """Enumerate one node's weights and MACs; ``flops`` is None if unresolved."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    op = OPS[node.op]
    out = op.infer(node.params, in_shapes)
    params, flops = 0, 0
    for prim in op.primitives(node.params, in_shapes, out):
        dp, df = _prim_cost(prim, mode)
        params += dp
        flops = None if flops is None or df is None else flops + df
    fp, ff, ratios = _closed_form(node, in_shapes, out)
    if mode == "full":
        fp = ff = None
    return CostEntry(node.id, node.op, params, flops, fp, ff, ratios)


def analyze(net: NetworkSpec, resolution=None, mode: str = "paper") -> CostReport:
    """Cost report for one image at ``resolution`` (H, W); defaults to the template."""
    h, w = (None, None) if resolution is None else resolution
    shapes = propagate(net, h, w)
    entries = tuple(count_node(n, [shapes[i] for i in n.inputs], mode) for n in net.nodes)
    res = shapes[INPUT_ID][1:]
    return CostReport(net.name, mode, res, entries, net.flops_per_mac)


def _fmt(v, scale, digits):
    return "n/a" if v is None else f"{v / scale:.{digits}f}"


def render_text(report: CostReport) -> str:
    rows = [f"network {report.name}  mode={report.mode}  input={report.resolution[0]}x{report.resolution[1]}"]
    rows.append(f"{'node':<18}{'op':<22}{'params':>12}{'MACs':>16}")
    for e in report.entries:
        rows.append(f"{e.node:<18}{e.op:<22}{e.params:>12}{'n/a' if e.flops is None else e.flops:>16}")
    t = report.totals()
    rows.append("-" * 68)
    rows.append(f"params (1e6): {_fmt(t['params'], 1e6, 3)}")
    conv = "" if report.flops_per_mac == 1 else f"  ({report.flops_per_mac} FLOPs per MAC)"
    rows.append(f"FLOPs  (1e9): {_fmt(t['flops'], 1e9, 2)}{conv}")
    rows.append(f"MACs   (1e9): {_fmt(t['macs'], 1e9, 2)}")
    rows.append(f"memory (MiB, 4 B/weight est.): {t['memory_mb_est']:.2f}")
    return "\n".join(rows) + "\n"


def render_csv(report: CostReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["node", "op", "params", "flops"])
    for e in report.entries:
        writer.writerow([e.node, e.op, e.params, "" if e.flops is None else e.flops])
    return buf.getvalue()


def render_json(report: CostReport) -> str:
    return json.dumps(report.to_dict(), indent=1) + "\n"


def savings(base: CostReport, other: CostReport) -> dict:
    """Relative savings of ``other`` over ``base`` in percent."""
    out = {"params_pct": 100.0 * (base.total_params - other.total_params) / base.total_params}
    bf, of = base.reported_flops, other.reported_flops
    out["flops_pct"] = None if not bf or of is None else 100.0 * (bf - of) / bf
    return out


def render_compare(base: CostReport, other: CostReport) -> str:
    s = savings(base, other)
    lines = [
        f"{'':<12}{base.name:>20}{other.name:>20}",
        f"{'params 1e6':<12}{base.total_params / 1e6:>20.3f}{other.total_params / 1e6:>20.3f}",
        f"{'FLOPs 1e9':<12}{_fmt(base.reported_flops, 1e9, 2):>20}{_fmt(other.reported_flops, 1e9, 2):>20}",
        f"params saving: {s['params_pct']:.1f}%",
        f"FLOPs saving:  {'n/a' if s['flops_pct'] is None else format(s['flops_pct'], '.1f') + '%'}",
    ]
    return "\n".join(lines) + "\n"
