"""Time baseline and M6 forward passes at 256x256 with seeded weights.

    python scripts/bench_runtime.py [--repeat 5] [--size 256x256]
"""
from __future__ import annotations

import argparse

from lwir.cli import parse_size, time_forward, timing_stats
from lwir.graph import load_preset

PAIRS = [("dncnn_baseline", "dncnn_m6"), ("glcic_baseline", "glcic_m6"), ("srresnet_baseline", "srresnet_m6")]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=parse_size, default=(256, 256))
    args = ap.parse_args()
    for base, light in PAIRS:
        stats = [timing_stats(n, time_forward(load_preset(n), args.size, args.repeat, 1)) for n in (base, light)]
        b, m = stats[0]["median_s"], stats[1]["median_s"]
        print(f"{base:<18} {b:8.3f}s   {light:<14} {m:8.3f}s   speedup {b / m:5.2f}x")


if __name__ == "__main__":
    main()
