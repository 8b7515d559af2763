"""Parallel execution contract shared by every kernel backend."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ACCUMULATION_MODES = ("atomic", "privatized")


@dataclass(frozen=True)
class KernelConfig:
    """How a kernel partitions and accumulates its work.

    workers is the parallel lane count; chunk is rows (or stored entries,
    for the scatter phase) per work unit. chunk=None picks
    max(1, ceil(work_items / (8 * workers))) per call, about eight chunks
    per worker. accumulation controls the scatter phase: "atomic" uses
    indivisible adds with unspecified summation order, "privatized" gives
    each worker a private output merged in fixed worker order.
    """

    workers: int = 1
    chunk: int | None = None
    accumulation: str = "privatized"

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.chunk is not None and self.chunk < 1:
            raise ValueError("chunk must be >= 1")
        if self.accumulation not in ACCUMULATION_MODES:
            raise ValueError(f"accumulation must be one of {ACCUMULATION_MODES}")

    def resolve_chunk(self, work_items: int) -> int:
        if self.chunk is not None:
            return self.chunk
        return max(1, math.ceil(work_items / (8 * self.workers)))


def pairwise_merge(partials: np.ndarray) -> float:
    """Sum partials by pairwise tree reduction in fixed order.

    Deterministic for a fixed partial count and lower error growth than a
    single left-to-right sum.
    """
    arr = np.asarray(partials)
    if arr.size == 0:
        return 0.0
    while arr.size > 1:
        m = arr.size // 2
        head = arr[0 : 2 * m : 2] + arr[1 : 2 * m : 2]
        arr = np.concatenate([head, arr[2 * m :]]) if arr.size % 2 else head
    return float(arr[0])
