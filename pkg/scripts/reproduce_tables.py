"""Print the cost tables for every shipped preset next to the published figures.

    python scripts/reproduce_tables.py [--mode paper|full]
"""
from __future__ import annotations

import argparse

from lwir.cost import analyze
from lwir.graph import load_preset

# (preset, input H x W, published params 1e6, published FLOPs 1e9)
PUBLISHED = [
    ("glcic_baseline", (256, 256), 6.02, 65.0),
    ("glcic_m1", (256, 256), 3.42, 33.1),
    ("glcic_m2", (256, 256), 2.93, 27.1),
    ("glcic_m3", (256, 256), 2.81, 26.9),
    ("glcic_m4", (256, 256), 2.63, 24.8),
    ("glcic_m5", (256, 256), 2.61, 24.0),
    ("glcic_m6", (256, 256), 0.54, 7.4),
    ("dncnn_baseline", (256, 256), 0.55, 36.73),
    ("dncnn_m6", (256, 256), 0.04, 2.97),
    ("srresnet_baseline", (80, 120), 1.55, 38.4),
    ("srresnet_m6", (80, 120), 0.10, 0.27),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mode", choices=("paper", "full"), default="paper")
    args = ap.parse_args()
    print(f"{'preset':<18}{'input':>9}{'params':>9}{'pub':>7}{'diff':>8}{'GFLOPs':>9}{'pub':>7}{'diff':>8}")
    for name, size, p_pub, f_pub in PUBLISHED:
        r = analyze(load_preset(name), size, args.mode)
        p, f = r.total_params / 1e6, r.reported_flops / 1e9
        print(f"{name:<18}{size[0]:>4}x{size[1]:<4}{p:>9.3f}{p_pub:>7.2f}{(p / p_pub - 1):>+8.1%}"
              f"{f:>9.2f}{f_pub:>7.2f}{(f / f_pub - 1):>+8.1%}")


if __name__ == "__main__":
    main()
