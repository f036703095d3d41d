"""Closed-form parameter and MAC counts, and the savings ratios derived from them.

These are written directly from the algebra and deliberately share no code
with the layer enumeration in :mod:`lwir.cost`; tests compare the two.
All counts exclude bias and batch-norm terms.  One FLOP means one
multiply-accumulate.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction


def conv_params(M: int, N: int, kernel: int = 3, groups: int = 1) -> int:
    return kernel * kernel * M * N // groups


def conv_flops(M: int, N: int, H: int, W: int, kernel: int = 3, groups: int = 1) -> int:
    return conv_params(M, N, kernel, groups) * H * W


def separable_params(M: int, N: int, kernel: int = 3) -> int:
    return kernel * kernel * M + M * N


def separable_flops(M: int, N: int, H: int, W: int, kernel: int = 3) -> int:
    return kernel * kernel * H * W * M + H * W * M * N


def list_params(M: int, N: int, k: int = 4, n_b: int = 2) -> int:
    """Stage-1 1x1, branch 1x1, depthwise 3x3 and pointwise terms.

    For n_b = 2 this is M^2/k + MN/2k + 9M/k + MN/2k; the two N-terms always
    sum to MN/k whatever the split.
    """
    r = M // k
    branch = N // n_b
    return M * r + r * branch + 9 * r + r * (N - branch)


def list_flops(M: int, N: int, H: int, W: int, k: int = 4, n_b: int = 2) -> int:
    return list_params(M, N, k, n_b) * H * W


def dilated_params(M: int) -> int:
    return 9 * M * M


def gsat_params(M: int, g: int) -> int:
    return 10 * M * M // g


def gsat_flops(M: int, g: int, H: int, W: int) -> int:
    return gsat_params(M, g) * H * W


# Sub-pixel upsampling by 2: LR input (H/2, W/2, c_prev) to HR (H, W).

def subpixel_lr_params(k: int, c_prev: int, c_l: int) -> int:
    return k * k * c_prev * c_l


def subpixel_lr_flops(k: int, c_prev: int, c_l: int, H: int, W: int) -> int:
    return k * k * (H // 2) * (W // 2) * c_prev * c_l


def subpixel_hr_params(k: int, c_prev: int, c_l: int) -> int:
    return k * k * c_prev * c_l // 4


def subpixel_hr_flops(k: int, c_prev: int, c_l: int, H: int, W: int) -> int:
    return k * k * H * W * c_prev * c_l // 4


def subpixel_sep_params(k: int, c_prev: int, c_l: int) -> int:
    return k * k * c_prev + c_prev * c_l


def subpixel_sep_flops(k: int, c_prev: int, c_l: int, H: int, W: int) -> int:
    return (H // 2) * (W // 2) * (k * k * c_prev + c_prev * c_l)


def subpixel_sep_ratio(k: int, c_l: int) -> Fraction:
    """Separable LR parameters over HR-equivalent parameters: 4 (1/k^2 + 1/c_l).

    Below 1 only for k >= 3 (and c_l > 7 at k = 3); at k = 2 it is 1 + 4/c_l.
    """
    return 4 * (Fraction(1, k * k) + Fraction(1, c_l))


def subpixel_sep_flop_ratio(k: int, c_l: int) -> Fraction:
    """Separable LR MACs over HR-equivalent MACs.

    The LR stage runs on a quarter of the pixels, so the factor 4 of the
    parameter ratio cancels: 1/k^2 + 1/c_l.
    """
    return Fraction(1, k * k) + Fraction(1, c_l)


@dataclass(frozen=True)
class RatioReport:
    list_exact: Fraction
    list_approx: Fraction
    list_lower_bound: Fraction
    flops_list_exact: Fraction
    sep_list_exact: Fraction
    sep_list_approx: Fraction
    k_threshold: Fraction
    k_beats_separable: bool
    gsat: Fraction
    subpixel_param_ratio: Fraction
    subpixel_flop_ratio: Fraction

    def as_floats(self) -> dict:
        return {k: (v if isinstance(v, bool) else float(v)) for k, v in asdict(self).items()}


def ratio_report(M: int, N: int, k: int = 4, n_b: int = 2, g: int = 8, k_size: int = 3, c_l: int = 64) -> RatioReport:
    """Savings of LIST over 3x3 and separable 3x3, GSAT over dilated 3x3,
    and separable sub-pixel over the HR-equivalent conv."""
    threshold = Fraction(M, N) + 1
    return RatioReport(
        list_exact=Fraction(9 * N * k, M + N + 9),
        list_approx=Fraction(9 * N * k, M + N),
        list_lower_bound=Fraction(9 * N, M + N),
        flops_list_exact=Fraction(9 * N * k, M + N + 9),
        sep_list_exact=Fraction(k * (N + 9), M + N + 9),
        sep_list_approx=Fraction(N * k, M + N),
        k_threshold=threshold,
        k_beats_separable=k > threshold,
        gsat=Fraction(9 * g, 10),
        subpixel_param_ratio=subpixel_sep_ratio(k_size, c_l),
        subpixel_flop_ratio=subpixel_sep_flop_ratio(k_size, c_l),
    )
