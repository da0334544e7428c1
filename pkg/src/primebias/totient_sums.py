"""Coprime-restricted totient sums, exact and in high precision.

Exact sums share one lcm denominator so the whole range is integer
arithmetic; the float path keeps a Dekker-style correction term per entry,
so both routes agree far below the residual scales being measured.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

from .arith import FactoredInteger, factorize, restricted_part
from .constants import c1, c3, c5
from .errors import DomainError
from .sieve import totient_table
from .zetafn import euler_gamma

EXACT_LIMIT = 10**5
_DPS = 35


@dataclass(frozen=True)
class TotientSumResult:
    M: float
    a: int
    kind: str
    exact: object
    predicted: mp.mpf
    residual: mp.mpf


@dataclass(frozen=True)
class ResidualScan:
    a: int
    points: list
    slope: float


def _coerce(a) -> FactoredInteger:
    return a if isinstance(a, FactoredInteger) else factorize(a)


def _rad(f: FactoredInteger) -> int:
    r = 1
    for p, _ in f.factors:
        r *= p
    return r


@lru_cache(maxsize=64)
def _exact_sums(Mf: int, rad: int):
    """(sum 1/phi, sum n/phi, sum 1/n) over n <= Mf coprime to rad, exact."""
    phi = totient_table(Mf).phi
    ns = np.arange(Mf + 1, dtype=np.int64)
    mask = np.gcd(ns, rad) == 1
    mask[0] = False
    idx = np.flatnonzero(mask)
    phis = [int(v) for v in phi[idx]]
    nsl = [int(v) for v in idx]
    d_phi = math.lcm(*phis)
    num1 = num2 = 0
    for n, ph in zip(nsl, phis):
        w = d_phi // ph
        num1 += w
        num2 += n * w
    d_n = math.lcm(*nsl)
    num3 = sum(d_n // n for n in nsl)
    return (Fraction(num1, d_phi), Fraction(num2, d_phi), Fraction(num3, d_n))


def _two_prod(a: np.ndarray, b: np.ndarray):
    x = a * b
    c = 134217729.0
    ah = a * c - (a * c - a)
    al = a - ah
    bh = b * c - (b * c - b)
    bl = b - bh
    err = ((ah * bh - x) + ah * bl + al * bh) + al * bl
    return x, err


def _exact_fsum(arr: np.ndarray) -> mp.mpf:
    # second pass recovers the sub-ulp residue of the first rounding
    s = math.fsum(arr)
    r = math.fsum(np.concatenate([arr, [-s]]))
    return mp.mpf(s) + mp.mpf(r)


def _dd_total(hi: np.ndarray, lo: np.ndarray) -> mp.mpf:
    return _exact_fsum(hi) + _exact_fsum(lo)


@lru_cache(maxsize=64)
def _float_sums(Mf: int, rad: int):
    """Same three sums with per-term corrected doubles, ~1e-24 absolute."""
    phi = totient_table(Mf).phi
    ns = np.arange(Mf + 1, dtype=np.int64)
    mask = np.gcd(ns, rad) == 1
    mask[0] = False
    nf = ns[mask].astype(np.float64)
    pf = phi[mask].astype(np.float64)
    with mp.workdps(_DPS):
        out = []
        for denom in (pf, nf):
            inv = 1.0 / denom
            x, err = _two_prod(inv, denom)
            # 1 - x is exact (x in [1/2, 2]); true residual of inv*denom
            corr = ((1.0 - x) - err) / denom
            out.append((inv, corr))
        (iphi_hi, iphi_lo), (in_hi, in_lo) = out
        s1 = _dd_total(iphi_hi, iphi_lo)
        s3 = _dd_total(in_hi, in_lo)
        t_hi, t_err = _two_prod(nf, iphi_hi)
        s2 = _dd_total(t_hi, t_err + nf * iphi_lo)
        return s1, s2, s3


def _sums(M: float, rad: int):
    Mf = math.floor(M)
    if Mf <= EXACT_LIMIT:
        return _exact_sums(Mf, rad), True
    return _float_sums(Mf, rad), False


def _result(M, f, kind, exact, predicted) -> TotientSumResult:
    with mp.workdps(_DPS):
        if isinstance(exact, Fraction):
            ev = mp.mpf(exact.numerator) / mp.mpf(exact.denominator)
        else:
            ev = mp.mpf(exact)
        return TotientSumResult(M, f.value, kind, exact, predicted,
                                ev - predicted)


def _check_args(M, a):
    f = _coerce(a)
    if M < 1:
        raise DomainError(f"M must be >= 1, got {M}")
    return f


def sum_inv_phi(M, a) -> TotientSumResult:
    """Sum of 1/phi(n) over n <= M coprime to a, with its predicted value."""
    f = _check_args(M, a)
    (s1, _, _), _ = _sums(M, _rad(f))
    with mp.workdps(_DPS):
        pred = c1(f).value * mp.log(M) + c1(f).value + c3(f).value
    return _result(M, f, "inv_phi", s1, pred)


def sum_n_over_phi(M, a) -> TotientSumResult:
    """Sum of n/phi(n) over n <= M coprime to a; predicted C1(a) M."""
    f = _check_args(M, a)
    (_, s2, _), _ = _sums(M, _rad(f))
    with mp.workdps(_DPS):
        pred = c1(f).value * mp.mpf(M)
    return _result(M, f, "n_over_phi", s2, pred)


def sum_inv_n_coprime(M, a) -> TotientSumResult:
    """Sum of 1/n over n <= M coprime to a; Mertens-style prediction."""
    f = _check_args(M, a)
    (_, _, s3), _ = _sums(M, _rad(f))
    with mp.workdps(_DPS):
        g = euler_gamma()[0]
        corr = mp.fsum(mp.log(p) / (p - 1) for p, _ in f.factors)
        dens = mp.mpf(1)
        for p, _ in f.factors:
            dens *= mp.mpf(p - 1) / p
        pred = dens * (mp.log(M) + g + corr)
    return _result(M, f, "inv_n", s3, pred)


def weighted_sum_inv_phi(M, a) -> TotientSumResult:
    """Sum of (1/phi(n))(1 - n/M) over n <= M coprime to a.

    Prediction splits on the restricted part of a: an extra
    (phi(a_M)/a_M) log p / (2M) appears when a_M is a single prime, and the
    a_M = 1 case carries (log M)/(2M) + C5/M.
    """
    f = _check_args(M, a)
    (s1, s2, _), is_exact = _sums(M, _rad(f))
    if is_exact and M == int(M):
        exact = s1 - s2 / Fraction(int(M))
    else:
        with mp.workdps(_DPS):
            if isinstance(s1, Fraction):
                s1 = mp.mpf(s1.numerator) / mp.mpf(s1.denominator)
                s2 = mp.mpf(s2.numerator) / mp.mpf(s2.denominator)
            exact = s1 - s2 / mp.mpf(M)
    aM = restricted_part(f.value, M).a_M
    with mp.workdps(_DPS):
        pred = c1(aM).value * mp.log(M) + c3(aM).value
        fam = factorize(aM)
        if aM == 1:
            pred += mp.log(M) / (2 * M) + c5().value / M
        elif len(fam.factors) == 1:
            # a_M is squarefree, so a single factor means a_M = p itself
            p = fam.factors[0][0]
            pred += (mp.mpf(p - 1) / p) * mp.log(p) / (2 * M)
    return _result(M, f, "weighted_inv_phi", exact, pred)


def residual_scaling_scan(a, M_grid) -> ResidualScan:
    """Fit the decay rate of the weighted-sum residual across M_grid."""
    grid = list(M_grid)
    if len(grid) < 4:
        raise DomainError("need at least 4 grid points")
    if any(m < 10 for m in grid):
        raise DomainError("grid points must all be >= 10")
    if any(b <= a_ for a_, b in zip(grid, grid[1:])):
        raise DomainError("grid must be strictly increasing")
    f = _coerce(a)
    points = []
    for M in grid:
        res = weighted_sum_inv_phi(M, f)
        e = float(res.residual)
        points.append((M, e, math.log(max(abs(e), 1e-300))))
    xs = np.log([m for m, _, _ in points])
    ys = np.array([la for _, _, la in points])
    slope = float(np.polyfit(xs, ys, 1)[0])
    return ResidualScan(f.value, points, slope)
