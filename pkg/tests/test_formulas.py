from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lwir import formulas as F


def test_plain_conv_examples():
    assert F.conv_params(3, 64) == 1728
    assert F.conv_flops(64, 64, 256, 256) == 2_415_919_104


def test_list_example():
    assert F.list_params(64, 64) == 2192


@given(mr=st.integers(1, 256), nr=st.integers(1, 256), k=st.sampled_from([2, 4, 8]))
def test_list_params_eq3_form(mr, nr, k):
    M, N = k * mr, 2 * k * nr
    assert F.list_params(M, N, k, 2) == M * M // k + M * N // (2 * k) + 9 * M // k + M * N // (2 * k)


@given(M=st.integers(1, 2048), N=st.integers(1, 2048), k=st.integers(2, 16))
def test_exact_ratio_is_conv_over_list(M, N, k):
    r = F.ratio_report(M, N, k)
    # 9MN over (M^2 + MN + 9M)/k, simplified
    assert r.list_exact == Fraction(9 * M * N * k, M * M + M * N + 9 * M)
    assert r.sep_list_exact == Fraction((9 * M + M * N) * k, M * M + M * N + 9 * M)


@pytest.mark.parametrize("M,N,want", [(64, 64, 18), (128, 64, 12), (64, 128, 24)])
def test_approx_ratio_values(M, N, want):
    assert F.ratio_report(M, N, 4).list_approx == want


@pytest.mark.parametrize("M,N,want", [(64, 64, 2.0), (64, 128, 2.6), (128, 64, 1.3)])
def test_sep_ratio_values(M, N, want):
    assert float(F.ratio_report(M, N, 4).sep_list_approx) == pytest.approx(want, abs=0.07)


def test_gsat_ratio():
    assert F.ratio_report(64, 64, g=8).gsat == Fraction(36, 5)


@given(M=st.integers(1, 4096), N=st.integers(1, 4096), k=st.integers(2, 16))
def test_lower_bound_iff(M, N, k):
    r = F.ratio_report(M, N, k)
    assert (r.list_exact > r.list_lower_bound) == ((k - 1) * (M + N) > 9)


def test_k_threshold():
    r = F.ratio_report(64, 128, 4)
    assert r.k_threshold == Fraction(3, 2) and r.k_beats_separable
    assert not F.ratio_report(256, 64, 4).k_beats_separable


@pytest.mark.parametrize("k,c_l", [(3, 8), (3, 16), (3, 64), (5, 8), (5, 16), (5, 64)])
def test_subpixel_ratio_below_one(k, c_l):
    assert F.subpixel_sep_ratio(k, c_l) < 1


@pytest.mark.parametrize("c_l", [8, 16, 64])
def test_subpixel_ratio_at_k2(c_l):
    assert F.subpixel_sep_ratio(2, c_l) == 1 + Fraction(4, c_l)


@given(k=st.integers(1, 7), c_prev=st.integers(1, 256), o=st.integers(1, 64), h=st.integers(1, 64), w=st.integers(1, 64))
def test_subpixel_identities(k, c_prev, o, h, w):
    c_l, H, W = 4 * o, 2 * h, 2 * w
    assert F.subpixel_lr_flops(k, c_prev, c_l, H, W) == F.subpixel_hr_flops(k, c_prev, c_l, H, W)
    assert F.subpixel_lr_params(k, c_prev, c_l) == 4 * F.subpixel_hr_params(k, c_prev, c_l)
    sep = Fraction(F.subpixel_sep_flops(k, c_prev, c_l, H, W), F.subpixel_hr_flops(k, c_prev, c_l, H, W))
    assert sep == F.subpixel_sep_flop_ratio(k, c_l)


def test_report_as_floats():
    d = F.ratio_report(64, 64).as_floats()
    assert d["list_approx"] == 18.0 and d["k_beats_separable"] is True
