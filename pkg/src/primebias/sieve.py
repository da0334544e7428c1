"""Segmented prime sieving and Chebyshev-style weighted counts.

Sums of log-weights are accumulated deterministically: exact math.fsum up to
FSUM_CUTOFF terms' worth of range, double-double with a fixed segment order
above, so results never depend on thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np

from ._accum import FSUM_CUTOFF, sum_array_dd, sum_chunk_results
from .arith import primes_upto
from .errors import CapacityError, DomainError

SEGMENT = 1 << 20
_X_CAP = 1 << 40
_WINDOW_CAP = 1 << 27


@dataclass(frozen=True)
class PrimeWindow:
    """Primality bits and proper prime powers for the half-open [lo, hi)."""

    lo: int
    hi: int
    prime_bits: np.ndarray
    prime_powers: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class TotientTable:
    """phi[n] for 0 <= n <= limit; phi[0] is unused and 0."""

    limit: int
    phi: np.ndarray


@dataclass(frozen=True)
class ProgressionQuery:
    x: int
    q: int
    a: int
    starred: bool = False
    weight: str = "lambda"


@lru_cache(maxsize=64)
def sieve_segment(lo: int, hi: int) -> PrimeWindow:
    if hi <= lo or lo < 2:
        raise DomainError(f"need 2 <= lo < hi, got [{lo}, {hi})")
    if hi > _X_CAP:
        raise CapacityError(f"hi > 2^40 not supported: {hi}")
    if hi - lo > _WINDOW_CAP:
        raise CapacityError(f"window longer than {_WINDOW_CAP} entries")
    bits = np.ones(hi - lo, dtype=bool)
    powers: list[tuple[int, float]] = []
    for p in primes_upto(math.isqrt(hi - 1)):
        p = int(p)
        start = max(p * p, lo + (-lo) % p)
        bits[start - lo :: p] = False
        lp = math.log(p)
        pe = p * p
        while pe < hi:
            if pe >= lo:
                powers.append((pe, lp))
            pe *= p
    powers.sort()
    bits.setflags(write=False)
    return PrimeWindow(lo, hi, bits, tuple(powers))


def totient_table(Q: int) -> TotientTable:
    if Q < 1:
        raise DomainError(f"Q must be >= 1, got {Q}")
    if Q > 10**8:
        raise CapacityError(f"Q > 10^8 not supported: {Q}")
    phi = np.arange(Q + 1, dtype=np.int64)
    root = math.isqrt(Q)
    for p in primes_upto(root):
        sl = phi[p::p]
        sl -= sl // p
    # each n <= Q has at most one prime factor above sqrt(Q); fix those in
    # one vectorized pass per cofactor
    if Q >= 2:
        allp = primes_upto(Q)
        large = allp[np.searchsorted(allp, root, side="right") :]
        k = 1
        while large.size and k * int(large[0]) <= Q:
            ps = large[: np.searchsorted(large, Q // k, side="right")]
            phi[ps * k] = phi[k] * (ps - 1)
            k += 1
    return TotientTable(Q, phi)


def _segments(lo: int, hi: int):
    """Fixed SEGMENT-sized cover of [lo, hi), low end first."""
    s = lo
    while s < hi:
        e = min(s + SEGMENT, hi)
        yield sieve_segment(s, e)
        s = e


def _collect_progression(window: PrimeWindow, q: int, r: int, lo_excl: int,
                         want_powers: bool) -> np.ndarray:
    lo, hi = window.lo, window.hi
    start = lo + (r - lo) % q
    prime_logs = np.empty(0, dtype=np.float64)
    if start < hi:
        idx = np.flatnonzero(window.prime_bits[start - lo :: q])
        ns = start + q * idx
        ns = ns[ns > lo_excl]
        if ns.size:
            prime_logs = np.log(ns.astype(np.float64))
    if not want_powers:
        return prime_logs
    extra = [lp for n, lp in window.prime_powers if n % q == r and n > lo_excl]
    if not extra:
        return prime_logs
    return np.concatenate([prime_logs, np.asarray(extra, dtype=np.float64)])


def progression_sum(query: ProgressionQuery) -> float:
    """Sum of the chosen log-weight over n <= x with n = a (mod q)."""
    x, q, a = int(query.x), int(query.q), int(query.a)
    if q < 1 or x < 1:
        raise DomainError(f"need q >= 1 and x >= 1, got q={q}, x={x}")
    if query.weight not in ("lambda", "theta"):
        raise DomainError(f"unknown weight {query.weight!r}")
    if x > _X_CAP:
        raise CapacityError(f"x > 2^40 not supported: {x}")
    lo_excl = abs(a) if query.starred else 0
    first = max(2, lo_excl + 1)
    if x < first:
        return 0.0
    r = a % q
    want_powers = query.weight == "lambda"
    parts = [
        _collect_progression(w, q, r, lo_excl, want_powers)
        for w in _segments(first, x + 1)
    ]
    if x <= FSUM_CUTOFF:
        return math.fsum(v for part in parts for v in part)
    return sum_chunk_results([sum_array_dd(part) for part in parts])


@lru_cache(maxsize=128)
def chebyshev_totals(x: int, weight: str = "lambda") -> float:
    """psi(x) for weight "lambda", theta(x) for weight "theta"."""
    x = int(x)
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if weight not in ("lambda", "theta"):
        raise DomainError(f"unknown weight {weight!r}")
    if x > _X_CAP:
        raise CapacityError(f"x > 2^40 not supported: {x}")
    return progression_sum(ProgressionQuery(x=x, q=1, a=0, weight=weight))


def pi_counts(x: int, q: int, a: int) -> int:
    """Number of primes p <= x with p = a (mod q)."""
    x, q = int(x), int(q)
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    if x > _X_CAP:
        raise CapacityError(f"x > 2^40 not supported: {x}")
    r = a % q
    total = 0
    for w in _segments(2, x + 1):
        start = w.lo + (r - w.lo) % q
        if start < w.hi:
            total += int(np.count_nonzero(w.prime_bits[start - w.lo :: q]))
    return total


def li(x: float) -> float:
    """Logarithmic integral from 2 to x, 1e-12 relative accuracy."""
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    if x == 2:
        return 0.0
    with mp.workdps(30):
        val = mp.quad(lambda t: 1 / mp.log(t), [2, mp.mpf(x)])
        return float(val)


def smallest_prime_factor(limit: int) -> np.ndarray:
    """spf[n] for n <= limit; 0 marks 1 and primes (the entry is n itself)."""
    if limit < 1:
        raise DomainError(f"limit must be >= 1, got {limit}")
    if limit > 10**8:
        raise CapacityError(f"limit > 10^8 not supported: {limit}")
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in primes_upto(math.isqrt(limit)):
        sl = spf[p * p :: p]
        sl[sl == 0] = p
    return spf
