"""Write tests/golden/seeded_weights.json from a scalar, pure-Python generator.

Shares no code with lwir.weights: the FNV-1a hash, SplitMix64 stream and
uniform mapping are re-typed here from their definitions.
"""
from __future__ import annotations

import json
import math
import struct
from pathlib import Path

MASK = (1 << 64) - 1
OUT = Path(__file__).resolve().parents[1] / "tests" / "golden" / "seeded_weights.json"


def fnv1a(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & MASK
    return h


def stream(state: int, n: int):
    for _ in range(n):
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        yield z ^ (z >> 31)


def to_f32(v: float) -> float:
    return struct.unpack("<f", struct.pack("<f", v))[0]


def weights(name: str, n: int, fan_in: int, seed: int) -> list[float]:
    s = math.sqrt(6.0 / fan_in)
    return [to_f32((2.0 * ((z >> 11) / 2.0 ** 53) - 1.0) * s) for z in stream((seed & MASK) ^ fnv1a(name), n)]


def main():
    cases = [("conv1/weight", 9, 0), ("conv2/weight", 576, 0), ("conv2/weight", 576, 7), ("dil1/dil", 72, 123)]
    doc = {
        "splitmix64_state0": [hex(z) for z in stream(0, 3)],
        "fnv1a64": {name: hex(fnv1a(name)) for name in ("", "a", "conv1/weight")},
        "tensors": [
            {"name": name, "fan_in": fan_in, "seed": seed, "first8": weights(name, 8, fan_in, seed)}
            for name, fan_in, seed in cases
        ],
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
