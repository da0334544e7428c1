"""Deterministic summation and process-pool helpers.

Reduction order is fixed by a static block grid, never by thread count or
scheduling, so results are bit-identical across thread settings.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from multiprocessing import get_context

import numpy as np

from .errors import DomainError

# Block size for compensated array sums. Fixed: changing it changes rounding.
_BLOCK = 1 << 16

# x at or below this cutoff uses math.fsum on the raw terms (exact rounding).
FSUM_CUTOFF = 10**6


def two_sum(a: float, b: float) -> tuple[float, float]:
    """Error-free transform: a + b = s + e exactly."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def dd_add(hi: float, lo: float, x: float) -> tuple[float, float]:
    """Add a float to a double-double value, renormalizing."""
    s, e = two_sum(hi, x)
    e += lo
    s, e = two_sum(s, e)
    return s, e


def neumaier_blocks(block_sums: np.ndarray | list[float]) -> float:
    """Compensated (Neumaier) sum of an ordered sequence of partial sums."""
    total = 0.0
    comp = 0.0
    for x in block_sums:
        x = float(x)
        t = total + x
        if abs(total) >= abs(x):
            comp += (total - t) + x
        else:
            comp += (x - t) + total
        total = t
    return total + comp


def sum_array(values: np.ndarray) -> float:
    """Deterministic compensated sum of a float64 array.

    Blocks of fixed size are summed with numpy's pairwise reduction, then the
    block sums are combined with Neumaier compensation in index order.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    n = values.size
    if n == 0:
        return 0.0
    if n <= _BLOCK:
        return float(np.sum(values))
    sums = [np.sum(values[i : i + _BLOCK]) for i in range(0, n, _BLOCK)]
    return neumaier_blocks(sums)


def sum_chunk_results(chunks: list[tuple[float, float]]) -> float:
    """Merge per-chunk double-double partial sums in chunk-index order."""
    hi = 0.0
    lo = 0.0
    for chi, clo in chunks:
        hi, lo = dd_add(hi, lo, chi)
        hi, lo = dd_add(hi, lo, clo)
    return hi + lo


def sum_array_dd(values: np.ndarray) -> tuple[float, float]:
    """Like sum_array but returns a double-double (hi, lo) pair for merging."""
    values = np.ascontiguousarray(values, dtype=np.float64)
    hi = 0.0
    lo = 0.0
    for i in range(0, values.size, _BLOCK):
        hi, lo = dd_add(hi, lo, float(np.sum(values[i : i + _BLOCK])))
    return hi, lo


def fsum(values) -> float:
    return math.fsum(values)


def resolve_threads(requested: int | None = None) -> int:
    """Thread count: explicit argument, then PBL_THREADS, then 1."""
    if requested is None:
        env = os.environ.get("PBL_THREADS", "").strip()
        requested = int(env) if env else 1
    if requested < 1:
        raise DomainError(f"thread count must be >= 1, got {requested}")
    return requested


# --- Process-pool map with deterministic ordered reduce ------------------
#
# Workers inherit module-global read-only arrays via fork. The chunk grid is
# a pure function of the problem size, so the sequence of per-chunk results
# fed to the reducer is identical at every thread count.

_POOL_INIT = None
_POOL_ARGS: tuple = ()


def _worker_init(init, args):
    global _POOL_INIT, _POOL_ARGS
    _POOL_INIT = init
    _POOL_ARGS = args
    if init is not None:
        init(*args)


def parallel_map(fn, chunks: list, threads: int, *, initializer=None, initargs=()):
    """Map fn over chunks, preserving chunk order in the result list.

    threads == 1 runs inline (no pool, no fork), which is also the fallback
    when only one chunk exists.
    """
    if threads <= 1 or len(chunks) <= 1:
        if initializer is not None:
            initializer(*initargs)
        return [fn(c) for c in chunks]
    ctx = get_context("fork")
    with ProcessPoolExecutor(
        max_workers=min(threads, len(chunks)),
        mp_context=ctx,
        initializer=_worker_init,
        initargs=(initializer, initargs),
    ) as pool:
        return list(pool.map(fn, chunks, chunksize=1))
