"""Deterministic row-partitioned work driver.

Verification sweeps are embarrassingly parallel over rows of the pair
grid.  Work items are read-only closures over immutable representations;
results are merged in row-index order regardless of completion order, so
the outcome is identical for any thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

T = TypeVar("T")


def map_rows(fn: Callable[[int], T], count: int, threads: int = 1) -> list[T]:
    """Apply ``fn`` to 0..count-1, returning results in index order."""
    if threads <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))
