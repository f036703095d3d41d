import csv
import io
import json

import pytest

from lwir import cost as C
from lwir.graph import OPS, NodeSpec, load_preset, network_from_dict, preset_names

NET = {
    "name": "mix",
    "input": {"channels": 16, "height": None, "width": None},
    "nodes": [
        {"id": "c", "op": "conv2d", "in": ["input"], "out_channels": 16, "kernel": 3, "bn": True, "bias": True},
        {"id": "r", "op": "bilinear_resize", "in": ["c"], "scale": 2},
        {"id": "l", "op": "list", "in": ["r"], "out_channels": 8},
    ],
    "output": "l",
}


def node(op, **params):
    return NodeSpec("n", op, ("input",), OPS[op].normalize(params))


def test_conv_node_examples():
    e = C.count_node(node("conv2d", out_channels=64, kernel=3), [(3, 256, 256)])
    assert e.params == 1728 and e.flops == 1728 * 256 * 256
    assert e.formula_params == e.params and e.formula_flops == e.flops


def test_list_node_example():
    e = C.count_node(node("list", out_channels=64), [(64, 10, 7)])
    assert e.params == 2192 and e.flops == 2192 * 70
    assert e.ratios["3x3/LIST"] == pytest.approx(9 * 64 * 4 / 137)


def test_default_mode_vs_full():
    net = network_from_dict(NET)
    conv_only = C.analyze(net, (8, 8))
    full = C.analyze(net, (8, 8), "full")
    conv = 9 * 16 * 16
    lst = 16 * 4 + 4 * 4 + 9 * 4 + 4 * 4
    assert conv_only.total_params == conv + lst
    assert conv_only.total_flops == conv * 64 + lst * 256
    bn_params = 2 * 16 + 2 * 4 + 2 * 8
    assert full.total_params == conv_only.total_params + 16 + bn_params
    assert full.total_flops == conv_only.total_flops + 16 * 64 + 4 * 16 * 256 + (4 + 8) * 256
    assert all(e.formula_params is None for e in full.entries)


def test_unresolved_resolution():
    report = C.analyze(network_from_dict(NET))
    assert report.total_flops is None and report.totals()["flops_1e9"] is None
    assert "n/a" in C.render_text(report)


def test_bad_mode():
    with pytest.raises(ValueError):
        C.analyze(network_from_dict(NET), (8, 8), "approx")


@pytest.mark.parametrize("name", preset_names())
def test_resolution_linear(name):
    net = load_preset(name)
    assert C.analyze(net, (128, 64)).total_flops == 4 * C.analyze(net, (64, 32)).total_flops


@pytest.mark.parametrize("name", preset_names())
def test_closed_forms_agree_on_presets(name):
    for e in C.analyze(load_preset(name), (64, 64)).entries:
        if e.formula_params is not None:
            assert (e.params, e.flops) == (e.formula_params, e.formula_flops), e.node


def test_renderers():
    report = C.analyze(network_from_dict(NET), (8, 8))
    rows = list(csv.reader(io.StringIO(C.render_csv(report))))
    assert rows[0] == ["node", "op", "params", "flops"]
    assert [r[0] for r in rows[1:]] == ["c", "r", "l"]
    doc = json.loads(C.render_json(report))
    assert doc["totals"]["params"] == report.total_params
    assert doc["entries"][0]["node"] == "c"
    assert "memory" in C.render_text(report)


def test_savings_and_flops_per_mac():
    base = C.analyze(load_preset("glcic_baseline"), (256, 256))
    m6 = C.analyze(load_preset("glcic_m6"), (256, 256))
    assert base.flops_per_mac == 2 and base.reported_flops == 2 * base.total_flops
    s = C.savings(base, m6)
    assert s["params_pct"] == pytest.approx(100 * (1 - m6.total_params / base.total_params))
    assert "params saving" in C.render_compare(base, m6)


def test_memory_estimate():
    report = C.analyze(load_preset("dncnn_baseline"), (8, 8))
    assert report.memory_mb == report.total_params * 4 / 2**20
