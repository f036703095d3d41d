"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL ...`` line; the lines are
repeated in the pytest terminal summary.  Run this file directly to print the
lines without pytest.  Reference values come from the published tables.
"""
from __future__ import annotations

import io
import json
import sys
from contextlib import redirect_stdout
from fractions import Fraction


from lwir import cli
from lwir import formulas as F
from lwir import verify as V
from lwir.cost import analyze, count_node
from lwir.graph import OPS, NodeSpec, load_preset

RESULTS: dict[int, str] = {}


class Criterion:
    def __init__(self):
        self.lines = []
        self.ok = True

    def within(self, label, got, want, rel=None, abs_=None):
        tol = want * rel if rel is not None else abs_
        good = abs(got - want) <= tol + 1e-12
        self.ok &= good
        band = f"+-{rel:.0%}" if rel is not None else f"+-{abs_}"
        self.lines.append(f"{label} {got:.4g} vs {want} {band} {'ok' if good else 'MISS'}")

    def check(self, label, good, detail=""):
        self.ok &= bool(good)
        self.lines.append(f"{label} {'ok' if good else 'MISS'}{' ' + detail if detail else ''}")


def report(number, crit: Criterion):
    line = f"criterion {number}: {'PASS' if crit.ok else 'FAIL'}  " + "; ".join(crit.lines)
    RESULTS[number] = line
    print(line)
    assert crit.ok, line


def totals(name, size):
    r = analyze(load_preset(name), size)
    return r.total_params / 1e6, r.reported_flops / 1e9


def test_criterion_1_inpainting_costs():
    c = Criterion()
    rows = {
        "glcic_baseline": (6.02, 65.0, 0.10), "glcic_m6": (0.54, 7.4, 0.10),
        "glcic_m1": (3.42, 33.1, 0.15), "glcic_m2": (2.93, 27.1, 0.15), "glcic_m3": (2.81, 26.9, 0.15),
        "glcic_m4": (2.63, 24.8, 0.15), "glcic_m5": (2.61, 24.0, 0.15),
    }
    for name, (p, f, tol) in rows.items():
        gp, gf = totals(name, (256, 256))
        c.within(f"{name} params", gp, p, rel=tol)
        c.within(f"{name} GFLOPs", gf, f, rel=tol)
    report(1, c)


def test_criterion_2_denoising_costs():
    c = Criterion()
    gp, gf = totals("dncnn_baseline", (256, 256))
    c.within("dncnn_baseline params", gp, 0.55, rel=0.05)
    c.within("dncnn_baseline GFLOPs", gf, 36.73, rel=0.05)
    gp, gf = totals("dncnn_m6", (256, 256))
    c.within("dncnn_m6 params", gp, 0.04, abs_=0.01)
    c.within("dncnn_m6 GFLOPs", gf, 2.97, rel=0.15)
    report(2, c)


def test_criterion_3_super_resolution_costs():
    c = Criterion()
    gp, gf = totals("srresnet_baseline", (80, 120))
    c.within("srresnet_baseline params", gp, 1.55, rel=0.10)
    c.within("srresnet_baseline GFLOPs", gf, 38.4, rel=0.10)
    gp, gf = totals("srresnet_m6", (80, 120))
    c.within("srresnet_m6 params", gp, 0.10, rel=0.15)
    c.within("srresnet_m6 GFLOPs", gf, 0.27, rel=0.15)
    report(3, c)


def test_criterion_4_closed_form_exactness():
    c = Criterion()
    for r in V.check_cost_formulas(trials=1000, seed=2024):
        if r["check"].startswith("formula_"):
            c.check(r["check"], r["status"] == "pass", r["detail"].split(",")[0])
    report(4, c)


def test_criterion_5_ratio_claims():
    c = Criterion()
    approx = [F.ratio_report(M, N, 4).list_approx for M, N in ((64, 64), (128, 64), (64, 128))]
    c.check("approx ratio 18/12/24", approx == [18, 12, 24], str([str(a) for a in approx]))
    worst = Fraction(0)
    for M in range(128, 2049, 16):
        for N in range(128, 2049, 16):
            r = F.ratio_report(M, N, 4)
            worst = max(worst, 1 - r.list_exact / r.list_approx)
    c.check("exact within 7% of approx for M,N >= 128", worst < Fraction(7, 100), f"worst {float(worst):.4f}")
    for g in (1, 2, 4, 8, 16):
        for M in range(32, 513, 32):
            node = NodeSpec("g", "gsat", ("input",), OPS["gsat"].normalize({"groups": g}))
            ratio = Fraction(9 * M * M, count_node(node, [(M, 8, 8)]).params)
            if ratio != Fraction(9 * g, 10):
                c.check(f"GSAT ratio M={M} g={g}", False, str(ratio))
    c.check("GSAT ratio 9g/10 for g in 1..16", c.ok)
    c.check("g=8 ratio 7.2", F.ratio_report(64, 64, g=8).gsat == Fraction(36, 5))
    report(5, c)


def test_criterion_6_subpixel_analysis():
    c = Criterion()
    ratios = {}
    for k in (3, 5):
        for c_l in (8, 16, 64):
            sep = count_node(NodeSpec("u", "upsample", ("input",), OPS["upsample"].normalize(
                {"mode": "subpixel_separable", "scale": 2, "out_channels": c_l // 4, "kernel": k})), [(32, 8, 8)])
            hr = count_node(NodeSpec("h", "conv2d", ("input",), OPS["conv2d"].normalize(
                {"out_channels": c_l // 4, "kernel": k})), [(32, 16, 16)])
            ratios[(k, c_l)] = Fraction(sep.params, hr.params)
            if ratios[(k, c_l)] != 4 * (Fraction(1, k * k) + Fraction(1, c_l)):
                c.check(f"ratio formula k={k} c_l={c_l}", False)
    c.check("param ratio < 1 for k in (3,5), c_l in (8,16,64)", all(v < 1 for v in ratios.values()),
            f"max {float(max(ratios.values())):.4f}")
    c.check("k=2 ratio is 1+4/c_l (>= 1)", all(F.subpixel_sep_ratio(2, cl) == 1 + Fraction(4, cl) for cl in (8, 16, 64)))
    lr_hr = V.check_lr_hr_macs(seed=6, cases=20)
    c.check("F_LR == F_HR, 20 cases", lr_hr["status"] == "pass")
    report(6, c)


def test_criterion_7_operator_equivalences():
    c = Criterion()
    r = V.check_grouped_vs_dense(seed=7, cases=50, tol=1e-6)
    c.check("grouped vs dense 50 cases <= 1e-6 rel", r["status"] == "pass", r["detail"].split(", ")[-1])
    c.check("sub-pixel rearrangement brute force", V.check_subpixel_bruteforce()["status"] == "pass")
    errs = [V.check_subpixel_equivalence(seed, 4, 2, 3, 2, 5, 5) for seed in range(10)]
    c.check("sub-pixel vs transposed conv 10 seeds <= 1e-4 abs", all(e["status"] == "pass" for e in errs))
    c.check("pixel shuffle round trip bit-exact", V.check_pixel_shuffle_roundtrip(7)["status"] == "pass")
    c.check("channel shuffle bijection C <= 64", V.check_channel_shuffle_bijection()["status"] == "pass")
    report(7, c)


def _bench(first, second):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(["bench", first, second, "--input-size", "256x256", "--repeat", "3", "--warmup", "1"])
    doc = json.loads(buf.getvalue())
    return code, doc["results"][0]["median_s"], doc["results"][1]["median_s"]


def test_criterion_8_runtime_direction_and_verify():
    c = Criterion()
    for light, base in (("dncnn_m6", "dncnn_baseline"), ("glcic_m6", "glcic_baseline")):
        code, t_light, t_base = _bench(light, base)
        c.check(f"{light} median {t_light:.3f}s < {base} {t_base:.3f}s", code == 0 and t_light < t_base)
    buf = io.StringIO()
    err = io.StringIO()
    with redirect_stdout(buf):
        old, sys.stderr = sys.stderr, err
        try:
            code = cli.main(["verify", "--suite", "all"])
        finally:
            sys.stderr = old
    c.check("verify --suite all exits 0", code == 0, err.getvalue().strip())
    report(8, c)


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    failed = 0
    for t in tests:
        try:
            t()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
