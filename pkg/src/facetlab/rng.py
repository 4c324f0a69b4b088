"""Seeded, splittable random streams and worker-count independent block maps.

Monte Carlo loops draw samples in fixed-size blocks.  Block ``k`` of a stream
is generated from its own seed sequence derived from ``(seed, name, k)``, so
the samples do not depend on how blocks are distributed over workers.
"""

from __future__ import annotations

import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, TypeVar

import numpy as np

BLOCK_SIZE = 4096
THREADS_ENV = "FW_THREADS"

T = TypeVar("T")


@dataclass(frozen=True)
class RngStream:
    """A named random stream; ``seed`` is the 64-bit master seed."""

    seed: int = 0
    name: str = "root"

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def _key(self) -> int:
        return zlib.crc32(self.name.encode("utf-8"))

    def spawn(self, name: str) -> "RngStream":
        return RngStream(self.seed, f"{self.name}/{name}")

    def block(self, index: int) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(self._key(), int(index)))
        return np.random.Generator(np.random.Philox(ss))

    def generator(self) -> np.random.Generator:
        """A single generator for non-blocked use (e.g. restarts)."""
        return self.block(2**32 - 1)


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        value = int(raw)
    except ValueError:
        value = os.cpu_count() or 1
    return max(1, value)


def map_ordered(fn: Callable[[int], T], indices: Iterable[int], workers: int | None = None) -> list[T]:
    """Apply ``fn`` to each index, returning results in index order."""
    indices = list(indices)
    workers = worker_count() if workers is None else max(1, workers)
    if workers == 1 or len(indices) <= 1:
        return [fn(i) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, indices))


def block_sizes(total: int, block: int = BLOCK_SIZE) -> list[int]:
    full, rest = divmod(int(total), block)
    return [block] * full + ([rest] if rest else [])
