"""Exact integer primitives and multiplicative functions.

All multiplicative functions treat a negative argument through its absolute
value; the sign is carried separately by FactoredInteger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import CapacityError, DomainError

_MAX_INPUT = 2**63 - 1
_TRIAL_LIMIT = 10**6
_SMOOTH_CAP = 10**8

# growing cache of small primes, resieved geometrically
_prime_cache: dict = {"limit": 1, "primes": np.empty(0, dtype=np.int64)}


def primes_upto(limit: int) -> np.ndarray:
    """Primes <= limit as an int64 array (shared read-only cache)."""
    if limit < 2:
        return _prime_cache["primes"][:0]
    if limit > _prime_cache["limit"]:
        target = max(limit, 2 * _prime_cache["limit"], 10**4)
        sieve = np.ones(target + 1, dtype=bool)
        sieve[:2] = False
        for p in range(2, math.isqrt(target) + 1):
            if sieve[p]:
                sieve[p * p :: p] = False
        _prime_cache["primes"] = np.flatnonzero(sieve).astype(np.int64)
        _prime_cache["limit"] = target
    primes = _prime_cache["primes"]
    return primes[: np.searchsorted(primes, limit, side="right")]


@dataclass(frozen=True)
class FactoredInteger:
    """Nonzero integer with its prime factorization, primes ascending."""

    value: int
    sign: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = self.sign
        for p, e in self.factors:
            prod *= p**e
        if prod != self.value:
            raise ValueError(f"inconsistent factorization for {self.value}")


@dataclass(frozen=True)
class RestrictedPart:
    """a with the squarefree product of its prime divisors p <= M."""

    a: int
    M: float
    a_M: int


class MultStats(NamedTuple):
    omega: int
    tau: int
    mobius: int
    radical: int


def _is_prime_u64(n: int) -> bool:
    # deterministic Miller-Rabin, valid for all n < 2^64
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int) -> int:
    """A nontrivial factor of composite n with no factor <= 10^6."""
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise CapacityError(f"rho failed to split {n}")


def factorize(n: int) -> FactoredInteger:
    """Full factorization of a nonzero signed 64-bit integer."""
    if n == 0:
        raise DomainError("cannot factorize 0")
    if abs(n) > _MAX_INPUT:
        raise CapacityError(f"|n| exceeds 64-bit range: {n}")
    sign = 1 if n > 0 else -1
    m = abs(n)
    factors: dict[int, int] = {}
    for p in primes_upto(min(_TRIAL_LIMIT, math.isqrt(m))):
        p = int(p)
        if p * p > m:
            break
        while m % p == 0:
            factors[p] = factors.get(p, 0) + 1
            m //= p
    stack = [m] if m > 1 else []
    while stack:
        m = stack.pop()
        if m <= _TRIAL_LIMIT**2 or _is_prime_u64(m):
            # below the trial bound squared, a survivor is prime
            factors[m] = factors.get(m, 0) + 1
            continue
        d = _brent_rho(m)
        stack.append(d)
        stack.append(m // d)
    return FactoredInteger(n, sign, tuple(sorted(factors.items())))


def _coerce(n) -> FactoredInteger:
    return n if isinstance(n, FactoredInteger) else factorize(n)


def euler_phi(n) -> int:
    """phi(|n|)."""
    f = _coerce(n)
    out = 1
    for p, e in f.factors:
        out *= p ** (e - 1) * (p - 1)
    return out


def mult_stats(n) -> MultStats:
    """(omega, tau, mobius, radical) of |n|."""
    f = _coerce(n)
    omega = len(f.factors)
    tau = 1
    radical = 1
    squarefree = True
    for p, e in f.factors:
        tau *= e + 1
        radical *= p
        if e > 1:
            squarefree = False
    mobius = 0 if not squarefree else (-1) ** omega
    return MultStats(omega, tau, mobius, radical)


def von_mangoldt(n: int) -> float:
    """log p if |n| is a prime power p^e, else 0."""
    f = _coerce(n)
    if len(f.factors) == 1:
        return math.log(f.factors[0][0])
    return 0.0


def theta_weight(n: int) -> float:
    """log p if |n| is prime, else 0."""
    f = _coerce(n)
    if len(f.factors) == 1 and f.factors[0][1] == 1:
        return math.log(f.factors[0][0])
    return 0.0


def restricted_part(a: int, M: float) -> RestrictedPart:
    """Squarefree product of the primes p | a with p <= M."""
    if a == 0:
        raise DomainError("a must be nonzero")
    if M < 1:
        raise DomainError(f"M must be >= 1, got {M}")
    f = _coerce(a)
    a_M = 1
    for p, _ in f.factors:
        if p <= M:
            a_M *= p
    return RestrictedPart(f.value, M, a_M)


def smooth_proportion(X: int, M: float) -> Fraction:
    """Proportion of a <= X whose prime divisors p <= M multiply to <= M.

    The product over p | a, p <= M is tracked with a saturating sieve; exact
    because a partial product can only exceed M if the full one does.
    """
    if X < 1:
        raise DomainError(f"X must be >= 1, got {X}")
    if M < 1:
        raise DomainError(f"M must be >= 1, got {M}")
    if X > _SMOOTH_CAP:
        raise CapacityError(f"X > {_SMOOTH_CAP} not supported")
    thr = math.floor(M)
    cap = thr + 1
    part = np.ones(X + 1, dtype=np.int64)
    for p in primes_upto(min(thr, X)):
        p = int(p)
        part[p::p] = np.minimum(part[p::p] * p, cap)
    count = int(np.count_nonzero(part[1:] <= thr))
    return Fraction(count, X)
