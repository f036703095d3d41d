"""Named weight tensors: deterministic seeding and the LWIR binary format.

Binary layout (all little-endian)::

    b"LWIR"  u32 version=1
    repeated until EOF:
        u32 name_len, name (UTF-8), u32 rank, u32 dims[rank], f32 values[prod(dims)]

Seeded weights draw from a SplitMix64 stream keyed by
``seed ^ fnv1a64(name)``.  Each 64-bit draw ``z`` becomes
``u = (z >> 11) / 2**53`` in [0, 1) and then ``(2u - 1) * sqrt(6 / fan_in)``,
evaluated in double precision and rounded to float32.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping

import numpy as np

MAGIC = b"LWIR"
VERSION = 1

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


class WeightError(ValueError):
    pass


def fnv1a64(name: str) -> int:
    h = FNV_OFFSET
    for byte in name.encode("utf-8"):
        h = ((h ^ byte) * FNV_PRIME) & MASK64
    return h


def splitmix64(key: int, n: int) -> np.ndarray:
    """First ``n`` outputs of the SplitMix64 generator started at state ``key``."""
    steps = np.arange(1, n + 1, dtype=np.uint64)
    z = np.uint64(key & MASK64) + np.uint64(GOLDEN_GAMMA) * steps
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def uniform01(draws: np.ndarray) -> np.ndarray:
    return (draws >> np.uint64(11)).astype(np.float64) / float(1 << 53)


def seeded_tensor(name: str, shape, fan_in: int, seed: int) -> np.ndarray:
    n = int(np.prod(shape))
    u = uniform01(splitmix64((seed & MASK64) ^ fnv1a64(name), n))
    scale = math.sqrt(6.0 / fan_in)
    return ((2.0 * u - 1.0) * scale).astype(np.float32).reshape(shape)


@dataclass(frozen=True)
class WeightStore(Mapping[str, np.ndarray]):
    """Immutable map from ``"node/sublayer"`` names to float32 arrays."""

    tensors: Mapping[str, np.ndarray] = field(default_factory=dict)
    provenance: str = "file"

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.tensors[name]
        except KeyError:
            raise WeightError(f"missing weight {name!r}") from None

    def __iter__(self) -> Iterator[str]:
        return iter(self.tensors)

    def __len__(self) -> int:
        return len(self.tensors)

    def scoped(self, node_id: str) -> "_Scoped":
        return _Scoped(self, node_id)

    def equals(self, other: "WeightStore") -> bool:
        if set(self.tensors) != set(other.tensors):
            return False
        return all(
            self.tensors[k].shape == other.tensors[k].shape
            and self.tensors[k].tobytes() == other.tensors[k].tobytes()
            for k in self.tensors
        )


class _Scoped(Mapping[str, np.ndarray]):
    def __init__(self, store: WeightStore, prefix: str):
        self._store = store
        self._prefix = prefix + "/"

    def __getitem__(self, name):
        return self._store[self._prefix + name]

    def __iter__(self):
        n = len(self._prefix)
        return (k[n:] for k in self._store if k.startswith(self._prefix))

    def __len__(self):
        return sum(1 for _ in self)


def write_weights(path, store: Mapping[str, np.ndarray]) -> None:
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", VERSION))
        for name, arr in store.items():
            arr = np.asarray(arr, dtype="<f4")
            raw = name.encode("utf-8")
            f.write(struct.pack("<I", len(raw)))
            f.write(raw)
            f.write(struct.pack("<I", arr.ndim))
            f.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            f.write(np.ascontiguousarray(arr).tobytes())


def read_weights(path) -> WeightStore:
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise WeightError(f"{path}: bad magic {data[:4]!r}")
    if len(data) < 8:
        raise WeightError(f"{path}: truncated header")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != VERSION:
        raise WeightError(f"{path}: unsupported version {version}")
    pos, tensors = 8, {}
    try:
        while pos < len(data):
            (n,) = struct.unpack_from("<I", data, pos)
            pos += 4
            name = data[pos:pos + n].decode("utf-8")
            pos += n
            (rank,) = struct.unpack_from("<I", data, pos)
            pos += 4
            dims = struct.unpack_from(f"<{rank}I", data, pos)
            pos += 4 * rank
            count = int(np.prod(dims)) if rank else 1
            if pos + 4 * count > len(data):
                raise WeightError(f"{path}: truncated tensor {name!r}")
            arr = np.frombuffer(data, dtype="<f4", count=count, offset=pos).astype(np.float32)
            pos += 4 * count
            if name in tensors:
                raise WeightError(f"{path}: duplicate tensor {name!r}")
            tensors[name] = arr.reshape(dims)
    except struct.error as exc:
        raise WeightError(f"{path}: truncated record ({exc})") from None
    return WeightStore(tensors, provenance="file")
