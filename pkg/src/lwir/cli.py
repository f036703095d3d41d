"""``lwir`` command line: analyze, verify, bench and infer.

Exit codes: 0 success, 1 usage, 2 input or parse failure, 3 verification failure.
``LWIR_THREADS`` caps the BLAS thread pool used by the convolution kernels.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import os
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .blocks import ConfigError
from .cost import MODES, analyze, render_compare, render_csv, render_json, render_text, savings
from .graph import GraphError, NetworkSpec, check_weights, forward, propagate, resolve_network, seed_weights
from .ppm import ImageError, read_image, write_image
from .tensor import ShapeError
from .verify import SUITES, run_suite
from .weights import WeightError, read_weights

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2, 3
INPUT_ERRORS = (GraphError, ConfigError, ShapeError, WeightError, ImageError, OSError, ValueError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_size(text: str) -> tuple[int, int]:
    try:
        h, w = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected HxW, got {text!r}") from None
    if h < 1 or w < 1:
        raise argparse.ArgumentTypeError(f"sizes must be positive, got {text!r}")
    return h, w


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _non_negative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def thread_limit():
    raw = os.environ.get("LWIR_THREADS")
    if raw is None:
        return contextlib.nullcontext()
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise UsageError(f"LWIR_THREADS must be an integer >= 1, got {raw!r}")
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    net = resolve_network(args.network)
    report = analyze(net, args.input_size, args.mode)
    if args.compare:
        other = analyze(resolve_network(args.compare), args.input_size, args.mode)
        if args.format == "json":
            text = json.dumps({"base": report.to_dict(), "other": other.to_dict(),
                               "savings": savings(report, other)}, indent=1) + "\n"
        else:
            text = render_compare(report, other)
    else:
        render = {"text": render_text, "json": render_json, "csv": render_csv}[args.format]
        text = render(report)
    _emit(text, args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_suite(args.suite, args.seed)
    sys.stdout.write(json.dumps(results, indent=1) + "\n")
    failed = [r["check"] for r in results if r["status"] != "pass"]
    print(f"verify suite={args.suite} seed={args.seed}: {len(results) - len(failed)}/{len(results)} passed"
          + (f"; failed: {', '.join(failed)}" if failed else ""), file=sys.stderr)
    return EXIT_VERIFY if failed else EXIT_OK


def _bench_input(net: NetworkSpec, size, seed: int) -> np.ndarray:
    h, w = size
    propagate(net, h, w)
    rng = np.random.default_rng(seed)
    return rng.random((1, net.in_channels, h, w), dtype=np.float32)


def time_forward(net: NetworkSpec, size, repeat: int, warmup: int, seed: int = 0) -> list[float]:
    weights = seed_weights(net, seed)
    x = _bench_input(net, size, seed)
    for _ in range(warmup):
        forward(net, weights, x)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        forward(net, weights, x)
        times.append(time.perf_counter() - t0)
    return times


def timing_stats(name: str, times: list[float]) -> dict:
    out = {"network": name, "repeat": len(times), "median_s": statistics.median(times), "min_s": min(times)}
    if len(times) > 1:
        out["max_s"] = max(times)
        out["stdev_s"] = statistics.stdev(times)
    return out


def cmd_bench(args) -> int:
    if len(args.networks) > 2:
        raise UsageError("bench takes one network or a pair")
    nets = [resolve_network(ref) for ref in args.networks]
    size = args.input_size
    results = [timing_stats(net.name, time_forward(net, size, args.repeat, args.warmup, args.seed)) for net in nets]
    doc = {"input_size": list(size), "warmup": args.warmup, "results": results}
    if len(results) == 2:
        # how many times faster the first network runs than the second
        doc["speedup"] = results[1]["median_s"] / results[0]["median_s"]
    sys.stdout.write(json.dumps(doc, indent=1) + "\n")
    return EXIT_OK


def _network_input(net: NetworkSpec, image: np.ndarray, mask_path: str | None) -> np.ndarray:
    c = image.shape[1]
    if c == net.in_channels:
        if mask_path:
            raise UsageError(f"--mask given but {net.name} takes {net.in_channels} channels without one")
        return image
    if c + 1 != net.in_channels:
        raise ImageError(f"image has {c} channels, {net.name} expects {net.in_channels}")
    if mask_path:
        mask = read_image(mask_path)
        if mask.shape[1] != 1 or mask.shape[2:] != image.shape[2:]:
            raise ImageError(f"mask must be a single-channel image of size {image.shape[2]}x{image.shape[3]}")
    else:
        mask = np.zeros((1, 1) + image.shape[2:], np.float32)
    return np.concatenate([image, mask], axis=1)


def cmd_infer(args) -> int:
    if args.weights is None and args.seed is None:
        raise ImageError("infer needs --weights or --seed")
    net = resolve_network(args.network)
    if args.weights is not None:
        weights = read_weights(args.weights)
        check_weights(net, weights)
    else:
        weights = seed_weights(net, args.seed)
    x = _network_input(net, read_image(args.image), args.mask)
    propagate(net, x.shape[2], x.shape[3])
    y = forward(net, weights, x)
    if y.shape[1] not in (1, 3):
        raise ImageError(f"network output has {y.shape[1]} channels; only 1 or 3 can be written")
    write_image(args.out, y)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lwir", description="Lightweight image-restoration blocks: cost analysis, checks, timing.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="parameter and FLOP report for a network")
    a.add_argument("network", help="network JSON file or preset name")
    a.add_argument("--input-size", type=parse_size, default=None, metavar="HxW")
    a.add_argument("--mode", choices=MODES, default="paper")
    a.add_argument("--format", choices=("text", "json", "csv"), default="text")
    a.add_argument("--compare", metavar="OTHER", help="second network; prints totals side by side with savings")
    a.add_argument("--output", "-o", metavar="FILE", help="write the report here instead of stdout")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="run the property and equivalence checks")
    v.add_argument("--suite", choices=SUITES, default="all")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="time seeded forward passes")
    b.add_argument("networks", nargs="+", metavar="network", help="one network, or two to compare")
    b.add_argument("--input-size", type=parse_size, default=(256, 256), metavar="HxW")
    b.add_argument("--repeat", type=_positive, default=5)
    b.add_argument("--warmup", type=_non_negative, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_bench)

    i = sub.add_parser("infer", help="run a network on a PPM/PGM image")
    i.add_argument("network", help="network JSON file or preset name")
    i.add_argument("--image", required=True)
    src = i.add_mutually_exclusive_group()
    src.add_argument("--weights", help="LWIR weight file")
    src.add_argument("--seed", type=int, help="use seeded random weights")
    i.add_argument("--mask", help="PGM hole mask appended as an extra channel when the network expects one")
    i.add_argument("--out", required=True)
    i.set_defaults(func=cmd_infer)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with thread_limit():
            return args.func(args)
    except UsageError as exc:
        print(f"lwir: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except INPUT_ERRORS as exc:
        print(f"lwir {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
