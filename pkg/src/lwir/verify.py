"""Seeded self-checks of operator equivalences and cost formulas.

Every check returns ``{"check": name, "status": "pass"|"fail", "detail": str}``;
suites return the list sorted by check name so the document is reproducible
byte for byte for a given seed.
"""
from __future__ import annotations

import itertools
import json
from typing import Callable

import numpy as np

from . import blocks as B
from . import formulas as F
from . import tensor as T
from .cost import count_node
from .graph import OPS, NodeSpec

SUITES = ("all", "ops", "cost", "equiv")


def _result(name, ok, detail):
    return {"check": name, "status": "pass" if ok else "fail", "detail": detail}


def _rel_err(a, b) -> float:
    a = np.asarray(a, np.float64)
    b = np.asarray(b, np.float64)
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-30))


def _randn(rng, shape):
    return rng.standard_normal(shape).astype(np.float32)


# sub-pixel convolution vs transposed convolution

def subpixel_to_transposed(v: np.ndarray, r: int) -> tuple[np.ndarray, int]:
    """Rearrange a sub-pixel kernel into the equivalent transposed-conv kernel.

    ``v`` has shape ``[o*r*r, i, K, K]`` (taps at offsets ``t - K//2``).  The
    result ``w`` has shape ``[i, o, K*r, K*r]``; running
    ``transposed_conv2d(x, w, r, padding)`` cropped to ``H*r x W*r`` reproduces
    ``pixel_shuffle(conv2d(x, v), r)``.
    """
    C, i, K, K2 = v.shape
    if K != K2 or C % (r * r):
        raise ValueError(f"sub-pixel kernel must be [o*r^2, i, K, K], got {v.shape}")
    o = C // (r * r)
    w = np.zeros((i, o, K * r, K * r), dtype=np.float32)
    for c, py, px, ty, tx in itertools.product(range(o), range(r), range(r), range(K), range(K)):
        w[:, c, (K - 1 - ty) * r + py, (K - 1 - tx) * r + px] = v[c * r * r + py * r + px, :, ty, tx]
    padding = (K - 1 - K // 2) * r
    return w, padding


def _brute_subpixel(x, v, r):
    """Scalar loops straight from the definitions of correlation and shuffling."""
    _, i_ch, H, W = x.shape
    C, _, K, _ = v.shape
    o = C // (r * r)
    out = np.zeros((o, H * r, W * r))
    for c, y, xx in itertools.product(range(o), range(H * r), range(W * r)):
        ch = c * r * r + (y % r) * r + (xx % r)
        q, p = y // r, xx // r
        acc = 0.0
        for m, ty, tx in itertools.product(range(i_ch), range(K), range(K)):
            sy, sx = q + ty - K // 2, p + tx - K // 2
            if 0 <= sy < H and 0 <= sx < W:
                acc += float(x[0, m, sy, sx]) * float(v[ch, m, ty, tx])
        out[c, y, xx] = acc
    return out


def _brute_transposed(x, w, r, padding, out_h, out_w):
    _, M, H, W = x.shape
    _, N, k, _ = w.shape
    full = np.zeros((N, (H - 1) * r + k, (W - 1) * r + k))
    for m, yi, xi, n, ky, kx in itertools.product(range(M), range(H), range(W), range(N), range(k), range(k)):
        full[n, yi * r + ky, xi * r + kx] += float(x[0, m, yi, xi]) * float(w[m, n, ky, kx])
    return full[:, padding:padding + out_h, padding:padding + out_w]


def check_subpixel_equivalence(seed: int, k: int, r: int, i: int, o: int, h: int, w: int, tol: float = 1e-4) -> dict:
    """Compare conv + pixel shuffle with the rearranged transposed conv.

    ``k`` is the transposed-conv kernel size; the sub-pixel kernel is
    ``k // r`` wide with ``o * r * r`` output channels.
    """
    name = f"subpixel_equivalence[k={k},r={r},i={i},o={o},{h}x{w},seed={seed}]"
    if r < 1 or k % r:
        return _result(name, False, f"excluded: k={k} not divisible by r={r} needs fractional kernel splitting")
    if max(i, o) > 8 or max(h, w) > 6:
        return _result(name, False, "dimension constraint violated (<= 8 channels, <= 6x6)")
    rng = np.random.default_rng(seed)
    K = k // r
    x = _randn(rng, (1, i, h, w))
    v = _randn(rng, (o * r * r, i, K, K))
    sub = T.pixel_shuffle(T.conv2d(x, v), r)
    wt, pad = subpixel_to_transposed(v, r)
    trans = T.transposed_conv2d(x, wt, r, pad, output_size=(h * r, w * r))
    err = float(np.abs(sub - trans).max())
    m = k
    inner = np.abs(sub - trans)[..., m:h * r - m, m:w * r - m]
    inner_err = float(inner.max()) if inner.size else err
    return _result(name, err <= tol, f"max abs err {err:.3e} (interior {inner_err:.3e}), tol {tol:g}")


def check_subpixel_bruteforce() -> dict:
    """k = r = 2, one channel, 1x1 input: every output enumerable by hand."""
    x = np.array([[[[1.5]]]], np.float32)
    v = np.array([1.0, 2.0, 3.0, 4.0], np.float32).reshape(4, 1, 1, 1)
    wt, pad = subpixel_to_transposed(v, 2)
    brute_sub = _brute_subpixel(x, v, 2)
    brute_tr = _brute_transposed(x, wt, 2, pad, 2, 2)
    fast_sub = T.pixel_shuffle(T.conv2d(x, v), 2)[0]
    fast_tr = T.transposed_conv2d(x, wt, 2, pad, output_size=(2, 2))[0]
    expected = 1.5 * np.array([[[1.0, 2.0], [3.0, 4.0]]])
    ok = all(np.array_equal(a, expected) for a in (brute_sub, brute_tr, fast_sub, fast_tr))
    return _result("subpixel_rearrangement_bruteforce", ok, f"outputs {fast_sub.ravel().tolist()}")


def check_subpixel_bruteforce_random(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    x = _randn(rng, (1, 2, 3, 3))
    v = _randn(rng, (4 * 2, 2, 2, 2))
    wt, pad = subpixel_to_transposed(v, 2)
    a = _brute_subpixel(x, v, 2)
    b = _brute_transposed(x, wt, 2, pad, 6, 6)
    err = float(np.abs(a - b).max())
    return _result("subpixel_rearrangement_bruteforce_random", err <= 1e-9, f"max abs err {err:.3e}")


def equiv_suite(seed: int) -> list[dict]:
    out = [check_subpixel_bruteforce(), check_subpixel_bruteforce_random(seed)]
    out.append(check_subpixel_equivalence(seed, 2, 1, 3, 2, 5, 5))
    for s in range(10):
        out.append(check_subpixel_equivalence(seed * 1000 + s, 4, 2, 3, 2, 5, 5))
    rng = np.random.default_rng(seed)
    for s in range(10):
        r = int(rng.integers(1, 4))
        k = r * int(rng.integers(1, 4))
        i, o = (int(v) for v in rng.integers(1, 5, size=2))
        h, w = (int(v) for v in rng.integers(1, 7, size=2))
        out.append(check_subpixel_equivalence(seed * 2000 + s, k, r, i, o, h, w))
    # k not divisible by r is excluded by construction and reported as such
    excluded = check_subpixel_equivalence(seed, 3, 2, 1, 1, 3, 3)
    out.append(_result("subpixel_equivalence_excludes_fractional", excluded["status"] == "fail",
                       excluded["detail"]))
    return out


# operator equivalences

def _block_diagonal(w: np.ndarray, groups: int) -> np.ndarray:
    N, Mg, kh, kw = w.shape
    Ng = N // groups
    dense = np.zeros((N, Mg * groups, kh, kw), np.float32)
    for g in range(groups):
        dense[g * Ng:(g + 1) * Ng, g * Mg:(g + 1) * Mg] = w[g * Ng:(g + 1) * Ng]
    return dense


def check_grouped_vs_dense(seed: int, cases: int = 50, tol: float = 1e-6) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        g = int(rng.choice([1, 2, 4, 8]))
        M = g * int(rng.integers(1, 8 // g + 1))
        N = g * int(rng.integers(1, 8 // g + 1))
        kk = int(rng.choice([1, 3, 5]))
        d = int(rng.integers(1, 3))
        s = int(rng.integers(1, 3))
        H, W = (int(v) for v in rng.integers(1, 6, size=2))
        x = _randn(rng, (1, M, H, W))
        w = _randn(rng, (N, M // g, kk, kk))
        a = T.conv2d(x, w, stride=s, dilation=d, groups=g)
        b = T.conv2d(x, _block_diagonal(w, g), stride=s, dilation=d)
        worst = max(worst, _rel_err(a, b))
    return _result("grouped_vs_dense_conv", worst <= tol, f"{cases} cases, max rel err {worst:.3e}")


def check_grouped_vs_dense_exhaustive(seed: int, tol: float = 1e-6) -> dict:
    """Every (g, M, N) with g | M, N <= 8, kernels 1 and 3, square inputs 1..5."""
    rng = np.random.default_rng(seed)
    worst, cases = 0.0, 0
    for g in (1, 2, 4, 8):
        for M, N in itertools.product(range(g, 9, g), repeat=2):
            for kk, size in itertools.product((1, 3), range(1, 6)):
                x = _randn(rng, (1, M, size, size))
                w = _randn(rng, (N, M // g, kk, kk))
                a = T.conv2d(x, w, groups=g)
                b = T.conv2d(x, _block_diagonal(w, g))
                worst = max(worst, _rel_err(a, b))
                cases += 1
    return _result("grouped_vs_dense_conv_exhaustive", worst <= tol, f"{cases} shapes, max rel err {worst:.3e}")


def check_separable_composition(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(10):
        M, N = (int(v) for v in rng.integers(1, 9, size=2))
        x = _randn(rng, (2, M, 5, 6))
        dw, pw = _randn(rng, (M, 1, 3, 3)), _randn(rng, (N, M, 1, 1))
        fused = T.depthwise_separable(x, dw, pw)
        two_step = T.conv2d(T.conv2d(x, dw, groups=M), pw)
        ok &= fused.tobytes() == two_step.tobytes()
    return _result("separable_equals_composition", ok, "10 random cases, bit-exact comparison")


def check_channel_shuffle_bijection() -> dict:
    bad = []
    for C in range(1, 65):
        for g in range(1, C + 1):
            if C % g:
                continue
            tags = np.arange(C, dtype=np.float32).reshape(1, C, 1, 1)
            perm = T.channel_shuffle(tags, g).ravel()
            if len(set(perm.tolist())) != C or sorted(perm.tolist()) != list(range(C)):
                bad.append((C, g))
    return _result("channel_shuffle_bijection", not bad, f"all (C, g) with g | C, C <= 64; failures {bad[:3]}")


def check_channel_shuffle_repeated(seed: int) -> dict:
    """Applying the shuffle g times keeps the multiset of channel slices intact."""
    rng = np.random.default_rng(seed)
    ok = True
    for C in range(1, 33):
        x = _randn(rng, (1, C, 2, 3))
        ref = sorted(x[0, c].tobytes() for c in range(C))
        for g in (d for d in range(1, C + 1) if C % d == 0):
            y = x
            for _ in range(g):
                y = T.channel_shuffle(y, g)
                ok &= sorted(y[0, c].tobytes() for c in range(C)) == ref
    return _result("channel_shuffle_preserves_slices", ok, "C <= 32, every divisor g, g successive shuffles")


def check_pixel_shuffle_roundtrip(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(20):
        r = int(rng.integers(1, 4))
        C = int(rng.integers(1, 4))
        H, W = (int(v) * r for v in rng.integers(1, 5, size=2))
        x = _randn(rng, (1, C, H, W))
        ok &= np.array_equal(T.pixel_shuffle(T.space_to_depth(x, r), r), x)
        y = _randn(rng, (1, C * r * r, H // r, W // r))
        ok &= np.array_equal(T.space_to_depth(T.pixel_shuffle(y, r), r), y)
    return _result("pixel_shuffle_roundtrip", ok, "20 random cases, bit-exact both directions")


def check_bilinear_properties(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(20):
        H, W, oh, ow = (int(v) for v in rng.integers(1, 12, size=4))
        c = np.float32(rng.standard_normal())
        const = np.full((1, 2, H, W), c, np.float32)
        ok &= bool((T.bilinear_resize(const, oh, ow) == c).all())
        x = _randn(rng, (1, 2, H, W))
        y = T.bilinear_resize(x, oh, ow)
        ok &= bool(y.min() >= x.min() and y.max() <= x.max())
    return _result("bilinear_constant_and_bounds", ok, "20 random cases: constants exact, outputs within input range")


def check_transposed_stride1(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(10):
        M, N = (int(v) for v in rng.integers(1, 6, size=2))
        kk = int(rng.choice([1, 3, 5]))
        x = _randn(rng, (1, M, 6, 5))
        w = _randn(rng, (M, N, kk, kk))
        a = T.transposed_conv2d(x, w, 1, kk // 2)
        flipped = np.ascontiguousarray(w.transpose(1, 0, 2, 3)[:, :, ::-1, ::-1])
        worst = max(worst, _rel_err(a, T.conv2d(x, flipped)))
    return _result("transposed_stride1_is_flipped_conv", worst <= 1e-5, f"max rel err {worst:.3e}")


def check_gsat_ungrouped(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    cfg = B.GsatConfig(6, groups=1, dilation=2)
    wts = B.random_weights(cfg.layers(), seed=int(rng.integers(1 << 31)), bn_identity=False)
    x = _randn(rng, (1, 6, 7, 7))
    got = B.gsat_forward(x, cfg, wts)
    h = T.conv2d(x, wts["dil"], dilation=2) * wts["bn1_scale"].reshape(1, -1, 1, 1) + wts["bn1_shift"].reshape(1, -1, 1, 1)
    h = np.maximum(h, 0)
    h = T.conv2d(h, wts["pw"]) * wts["bn2_scale"].reshape(1, -1, 1, 1) + wts["bn2_shift"].reshape(1, -1, 1, 1)
    ref = np.maximum(h + x, 0)
    err = _rel_err(got, ref)
    return _result("gsat_g1_matches_dense_composition", err <= 1e-6, f"max rel err {err:.3e}")


def check_lr_hr_macs(seed: int, cases: int = 20) -> dict:
    """F_LR == F_HR via the cost model: sub-pixel at H/2 x W/2 vs k x k conv at H x W."""
    rng = np.random.default_rng(seed)
    bad = []
    for _ in range(cases):
        kk = int(rng.integers(1, 6))
        c_prev = int(rng.integers(1, 65))
        c_l = 4 * int(rng.integers(1, 33))
        H, W = (2 * int(v) for v in rng.integers(1, 65, size=2))
        lr = NodeSpec("lr", "upsample", ("input",), OPS["upsample"].normalize(
            {"mode": "subpixel_normal", "scale": 2, "out_channels": c_l // 4, "kernel": kk}))
        hr = NodeSpec("hr", "conv2d", ("input",), OPS["conv2d"].normalize({"out_channels": c_l // 4, "kernel": kk}))
        f_lr = count_node(lr, [(c_prev, H // 2, W // 2)]).flops
        f_hr = count_node(hr, [(c_prev, H, W)]).flops
        if f_lr != f_hr or f_lr != F.subpixel_lr_flops(kk, c_prev, c_l, H, W):
            bad.append((kk, c_prev, c_l, H, W))
    return _result("subpixel_lr_hr_mac_equality", not bad, f"{cases} cases, mismatches {bad[:3]}")


def check_block_channels(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    bad = []
    for _ in range(20):
        M, N = 4 * int(rng.integers(1, 5)), 2 * int(rng.integers(1, 9))
        H, W = (int(v) for v in rng.integers(2, 7, size=2))
        x = _randn(rng, (1, M, H, W))
        lc = B.ListConfig(M, N)
        gc = B.GsatConfig(8, groups=int(rng.choice([1, 2, 4, 8])), dilation=int(rng.integers(1, 4)))
        uc = B.UpsampleConfig(str(rng.choice(["subpixel_normal", "subpixel_separable", "bilinear_list"])), 2, M, N)
        outs = {
            "list": (B.list_forward(x, lc, B.random_weights(lc.layers(), seed=1)), (N, H, W)),
            "gsat": (B.gsat_forward(_randn(rng, (1, 8, H, W)), gc, B.random_weights(gc.layers(), seed=2)), (8, H, W)),
            "upsample": (B.upsample_forward(x, uc, B.random_weights(uc.layers(), seed=3)), (N, 2 * H, 2 * W)),
        }
        bad += [(name, got.shape) for name, (got, want) in outs.items() if got.shape[1:] != want]
    return _result("block_output_channels", not bad, f"20 random configs per block; mismatches {bad[:3]}")


def check_determinism(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    x = _randn(rng, (1, 8, 9, 9))
    cfg = B.ListConfig(8, 8)
    wts = B.random_weights(cfg.layers(), seed=seed)
    a = B.list_forward(x, cfg, wts)
    b = B.list_forward(x.copy(), cfg, {k: v.copy() for k, v in wts.items()})
    return _result("forward_determinism", a.tobytes() == b.tobytes(), "LIST forward twice, bit-identical")


def ops_suite(seed: int) -> list[dict]:
    return [
        check_grouped_vs_dense(seed),
        check_grouped_vs_dense_exhaustive(seed),
        check_channel_shuffle_repeated(seed),
        check_block_channels(seed),
        check_separable_composition(seed),
        check_channel_shuffle_bijection(),
        check_pixel_shuffle_roundtrip(seed),
        check_bilinear_properties(seed),
        check_transposed_stride1(seed),
        check_gsat_ungrouped(seed),
        check_lr_hr_macs(seed),
        check_determinism(seed),
    ]


# cost formulas

def _node(op, **params):
    return NodeSpec("n", op, ("input",), OPS[op].normalize(params))


def _count(op, in_shape, **params):
    return count_node(_node(op, **params), [in_shape])


def _mismatch_check(name, trials, gen: Callable, detail=""):
    for t in range(trials):
        case = gen()
        if case is not None:
            return _result(name, False, f"first counterexample at trial {t}: {case}")
    return _result(name, True, f"{trials} random configs, exact integer equality{detail}")


def check_cost_formulas(trials: int = 1000, seed: int = 0) -> list[dict]:
    rng = np.random.default_rng(seed)

    def hw():
        return int(rng.integers(1, 65)), int(rng.integers(1, 65))

    def conv_case():
        M, N = (int(v) for v in rng.integers(1, 257, size=2))
        H, W = hw()
        e = _count("conv2d", (M, H, W), out_channels=N, kernel=3)
        want = (F.conv_params(M, N), F.conv_flops(M, N, H, W))
        return None if (e.params, e.flops) == want else (M, N, H, W, e.params, e.flops, want)

    def sep_case():
        M, N = (int(v) for v in rng.integers(1, 257, size=2))
        H, W = hw()
        e = _count("depthwise_separable", (M, H, W), out_channels=N, kernel=3)
        want = (F.separable_params(M, N), F.separable_flops(M, N, H, W))
        return None if (e.params, e.flops) == want else (M, N, H, W, e.params, e.flops, want)

    def list_case():
        k = int(rng.choice([2, 4, 8]))
        n_b = int(rng.choice([2, 4]))
        M = k * int(rng.integers(1, 65))
        N = n_b * int(rng.integers(1, 65))
        H, W = hw()
        e = _count("list", (M, H, W), out_channels=N, k=k, n_b=n_b)
        want = (F.list_params(M, N, k, n_b), F.list_flops(M, N, H, W, k, n_b))
        eq3 = M * M // k + M * N // (2 * k) + 9 * M // k + M * N // (2 * k) if n_b == 2 and N % (2 * k) == 0 else want[0]
        ok = (e.params, e.flops) == want and e.params == eq3
        return None if ok else (M, N, k, n_b, H, W, e.params, e.flops, want)

    def dil_case():
        M = int(rng.integers(1, 257))
        d = int(rng.integers(1, 17))
        H, W = hw()
        e = _count("conv2d", (M, H, W), out_channels=M, kernel=3, dilation=d)
        ok = e.params == F.dilated_params(M) and e.flops == F.dilated_params(M) * H * W
        return None if ok else (M, d, H, W, e.params, e.flops)

    def gsat_case():
        g = int(rng.choice([1, 2, 4, 8, 16]))
        M = g * int(rng.integers(1, 33))
        d = int(rng.integers(1, 9))
        H, W = hw()
        e = _count("gsat", (M, H, W), groups=g, dilation=d)
        ok = e.params == F.gsat_params(M, g) and e.flops == F.gsat_flops(M, g, H, W)
        return None if ok else (M, g, H, W, e.params, e.flops)

    def subpixel_case():
        kk = int(rng.integers(1, 6))
        c_prev = int(rng.integers(1, 129))
        o = int(rng.integers(1, 33))
        c_l = 4 * o
        H, W = (2 * int(v) for v in rng.integers(1, 33, size=2))
        n = _count("upsample", (c_prev, H // 2, W // 2), mode="subpixel_normal", scale=2, out_channels=o, kernel=kk)
        s = _count("upsample", (c_prev, H // 2, W // 2), mode="subpixel_separable", scale=2, out_channels=o, kernel=kk)
        hr = _count("conv2d", (c_prev, H, W), out_channels=o, kernel=kk)
        ok = (
            n.params == F.subpixel_lr_params(kk, c_prev, c_l)
            and n.flops == F.subpixel_lr_flops(kk, c_prev, c_l, H, W)
            and s.params == F.subpixel_sep_params(kk, c_prev, c_l)
            and s.flops == F.subpixel_sep_flops(kk, c_prev, c_l, H, W)
            and hr.params == F.subpixel_hr_params(kk, c_prev, c_l)
            and hr.flops == F.subpixel_hr_flops(kk, c_prev, c_l, H, W)
        )
        return None if ok else (kk, c_prev, c_l, H, W)

    out = [
        _mismatch_check("formula_conv3x3", trials, conv_case),
        _mismatch_check("formula_separable3x3", trials, sep_case),
        _mismatch_check("formula_list", trials, list_case),
        _mismatch_check("formula_dilated3x3", trials, dil_case),
        _mismatch_check("formula_gsat", trials, gsat_case),
        _mismatch_check("formula_subpixel", trials, subpixel_case),
    ]

    bad = []
    for g in (1, 2, 4, 8, 16):
        for M in range(32, 513, 16):
            if M % g:
                continue
            e = _count("gsat", (M, 4, 4), groups=g, dilation=2)
            if F.Fraction(F.dilated_params(M), e.params) != F.Fraction(9 * g, 10):
                bad.append((M, g))
    out.append(_result("gsat_ratio_is_9g_over_10", not bad, f"g in 1..16, M in 32..512; failures {bad[:3]}"))

    bad = []
    for kk in (2, 3, 5):
        for c_l in (8, 16, 64):
            sep = _count("upsample", (c_l, 4, 4), mode="subpixel_separable", scale=2, out_channels=c_l // 4, kernel=kk)
            hr = _count("conv2d", (c_l, 8, 8), out_channels=c_l // 4, kernel=kk)
            if F.Fraction(sep.params, hr.params) != F.subpixel_sep_ratio(kk, c_l):
                bad.append((kk, c_l))
    out.append(_result("separable_subpixel_ratio", not bad, f"k in (2,3,5), c_l in (8,16,64); failures {bad}"))
    return out


def check_ratio_claims() -> list[dict]:
    out = []
    k = 4
    approx = [F.ratio_report(M, N, k).list_approx for M, N in ((64, 64), (128, 64), (64, 128))]
    out.append(_result("list_ratio_18_12_24", approx == [18, 12, 24], f"approx ratios {[str(a) for a in approx]}"))

    worst = 0.0
    for M in range(128, 1025, 32):
        for N in range(128, 1025, 32):
            r = F.ratio_report(M, N, k)
            worst = max(worst, float(1 - r.list_exact / r.list_approx))
    out.append(_result("list_exact_within_7pct_of_approx", worst < 0.07, f"M, N in 128..1024: worst gap {worst:.4f}"))

    seps = [F.ratio_report(M, N, k).sep_list_approx for M, N in ((64, 64), (64, 128), (128, 64))]
    want = [2.0, 2.6, 1.3]
    ok = all(abs(float(s) - w) < 0.07 for s, w in zip(seps, want))
    out.append(_result("sep_list_ratio_2_26_13", ok, f"approx ratios {[round(float(s), 3) for s in seps]}"))

    # exact > 9N/(M+N)  <=>  (k-1)(M+N) > 9, so the bound fails only for tiny layers
    bad = []
    for M in range(1, 200, 7):
        for N in range(1, 200, 5):
            for kk in (2, 4, 8):
                above = F.ratio_report(M, N, kk).list_exact > F.Fraction(9 * N, M + N)
                if above != ((kk - 1) * (M + N) > 9):
                    bad.append((M, N, kk))
    out.append(_result("list_ratio_above_lower_bound", not bad,
                       "holds exactly when (k-1)(M+N) > 9 (all layers with M+N >= 10); "
                       f"boundary mismatches {bad[:3]}"))

    bad = []
    for N in (32, 64, 128, 256):
        for M in (N // 2, N, 2 * N):
            for kk in (4, 8):
                if M % kk:
                    continue
                lst = _count("list", (M, 8, 8), out_channels=N, k=kk).params
                sep = _count("depthwise_separable", (M, 8, 8), out_channels=N).params
                if not lst < sep:
                    bad.append((M, N, kk, lst, sep))
    out.append(_result("list_cheaper_than_separable_k_ge_4", not bad, f"M/N in (0.5, 1, 2); failures {bad[:3]}"))

    g8 = F.ratio_report(64, 64, g=8).gsat
    out.append(_result("gsat_ratio_g8", g8 == F.Fraction(36, 5), f"R = {float(g8)}"))

    ratios = {(kk, c): F.subpixel_sep_ratio(kk, c) for kk in (3, 5) for c in (8, 16, 64)}
    out.append(_result("separable_subpixel_ratio_below_one", all(v < 1 for v in ratios.values()),
                       "k in (3,5), c_l in (8,16,64): max " + f"{float(max(ratios.values())):.4f}"))
    return out


def check_resolution_linearity() -> dict:
    from .cost import analyze
    from .graph import load_preset, preset_names

    bad = []
    for name in preset_names():
        net = load_preset(name)
        small = analyze(net, (64, 64)).total_flops
        large = analyze(net, (128, 128)).total_flops
        if large != 4 * small:
            bad.append(name)
    return _result("analyze_resolution_linear", not bad, f"every preset, 64x64 vs 128x128; failures {bad}")


def cost_suite(seed: int, trials: int = 1000) -> list[dict]:
    return check_cost_formulas(trials, seed) + check_ratio_claims() + [check_resolution_linearity()]


# one owning check per module invariant
INVARIANT_OWNERS = {
    "tensor: grouped conv equals block-diagonal dense conv": "grouped_vs_dense_conv_exhaustive",
    "tensor: channel shuffle is a bijection": "channel_shuffle_bijection",
    "tensor: repeated channel shuffle preserves slices": "channel_shuffle_preserves_slices",
    "tensor: pixel shuffle and space-to-depth are inverse": "pixel_shuffle_roundtrip",
    "tensor: bilinear keeps constants and stays in range": "bilinear_constant_and_bounds",
    "tensor: ops are deterministic": "forward_determinism",
    "blocks: LIST counts equal the closed form": "formula_list",
    "blocks: GSAT counts and 9g/10 ratio": "gsat_ratio_is_9g_over_10",
    "blocks: separable sub-pixel ratio": "separable_subpixel_ratio",
    "blocks: sub-pixel LR MACs equal HR MACs": "subpixel_lr_hr_mac_equality",
    "blocks: outputs carry the declared channels": "block_output_channels",
    "cost: enumeration equals every closed form": "formula_conv3x3",
    "cost: LIST ratio above its lower bound": "list_ratio_above_lower_bound",
    "cost: LIST cheaper than separable for k >= 4": "list_cheaper_than_separable_k_ge_4",
    "cost: analyze is resolution-linear": "analyze_resolution_linear",
}


def run_suite(suite: str = "all", seed: int = 0) -> list[dict]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    results = []
    if suite in ("all", "ops"):
        results += ops_suite(seed)
    if suite in ("all", "cost"):
        results += cost_suite(seed)
    if suite in ("all", "equiv"):
        results += equiv_suite(seed)
    return sorted(results, key=lambda r: r["check"])


def results_document(results: list[dict]) -> str:
    return json.dumps(results, indent=1) + "\n"
