"""Certified evaluation of the bias constants and predicted biases.

Every constant is returned with a rigorous tail_bound covering series
truncation, the zeta-evaluation remainders, and arithmetic rounding.  Prime
sums are split at truncation_prime: primes below are summed directly, the
tail is re-expressed through log-weighted prime zeta values

    P1(s) = sum_p log p * p^-s = sum_k mu(k) * (-zeta'/zeta)(k*s)

which converge geometrically, so the default truncation already drives tails
far below 1e-15.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp

from .arith import FactoredInteger, euler_phi, factorize, mult_stats
from .errors import DomainError, NumericError
from .zetafn import euler_gamma, zeta_deriv_em, zeta_em

DEFAULT_TRUNCATION_PRIME = 10**4
_DPS = 40
_ZETA_EPS = 1e-32
_STOP = 1e-28
_MAX_TAIL = mp.mpf("1e-15")


@dataclass(frozen=True)
class CertifiedConstant:
    value: mp.mpf
    truncation_prime: int
    tail_bound: mp.mpf


@dataclass(frozen=True)
class BiasPrediction:
    a: int
    M: float
    kind: str
    value: mp.mpf


def _slop(*vals) -> mp.mpf:
    return mp.mpf(10) ** (8 - mp.mp.dps) * (1 + sum(abs(v) for v in vals))


def _cadd(x, y):
    v = x[0] + y[0]
    return v, x[1] + y[1] + _slop(v)


def _cmul(x, y):
    v = x[0] * y[0]
    return v, abs(x[0]) * y[1] + abs(y[0]) * x[1] + x[1] * y[1] + _slop(v)


def _cdiv(x, y):
    if abs(y[0]) <= y[1]:
        raise NumericError("division by an interval containing zero")
    v = x[0] / y[0]
    return v, (x[1] + abs(v) * y[1]) / (abs(y[0]) - y[1]) + _slop(v)


def _neg(x):
    return -x[0], x[1]


def _zdz(w):
    """Certified (-zeta'/zeta)(w) for real w > 1."""
    return _cdiv(_neg(zeta_deriv_em(w, _ZETA_EPS)), zeta_em(w, _ZETA_EPS))


def _mobius(k: int) -> int:
    return mult_stats(k).mobius


@lru_cache(maxsize=256)
def _p1_tail(s: int, P0: int):
    """Certified sum of log p * p^-s over primes p > P0, integer s >= 2."""
    from .arith import primes_upto

    # squarefree-k cutoff: terms beyond K contribute < 4 * 2^-(K+1)s since
    # (-zeta'/zeta)(w) <= 2*2^-w for w >= 3
    K = 1
    while 4 * mp.mpf(2) ** (-(K + 1) * s) > mp.mpf(10) ** -34:
        K += 1
    val = mp.mpf(0)
    bound = 4 * mp.mpf(2) ** (-(K + 1) * s)
    for k in range(1, K + 1):
        mu = _mobius(k)
        if mu == 0:
            continue
        tv, tb = _zdz(k * s)
        val += mu * tv
        bound += tb
    direct = mp.fsum(mp.log(int(p)) * mp.power(int(p), -s)
                     for p in primes_upto(P0))
    out = val - direct
    return out, bound + _slop(out, direct)


@lru_cache(maxsize=32)
def prime_sum_quadratic(P0: int = DEFAULT_TRUNCATION_PRIME):
    """Certified sum of log p / (p^2 - p + 1) over all primes."""
    from .arith import primes_upto

    with mp.workdps(_DPS):
        total = mp.fsum(mp.log(int(p)) / (int(p) * int(p) - int(p) + 1)
                        for p in primes_upto(P0))
        bound = _slop(total)
        # 1/(p^2-p+1) = sum_j (-1)^j (p^-(3j+2) + p^-(3j+3)), enveloping
        j = 0
        while True:
            tv1, tb1 = _p1_tail(3 * j + 2, P0)
            tv2, tb2 = _p1_tail(3 * j + 3, P0)
            pair = tv1 + tv2
            if abs(pair) + tb1 + tb2 < mp.mpf(_STOP):
                bound += abs(pair) + tb1 + tb2
                break
            total += (-1) ** j * pair
            bound += tb1 + tb2 + _slop(pair)
            j += 1
            if j > 40:
                raise NumericError("quadratic prime sum failed to converge")
        return total, bound


@lru_cache(maxsize=32)
def prime_sum_totient(P0: int = DEFAULT_TRUNCATION_PRIME):
    """Certified sum of log p / (p(p-1)) over all primes."""
    from .arith import primes_upto

    with mp.workdps(_DPS):
        total = mp.fsum(mp.log(int(p)) / (int(p) * (int(p) - 1))
                        for p in primes_upto(P0))
        bound = _slop(total)
        # 1/(p(p-1)) = sum_{e>=2} p^-e; successive tails shrink by 1/P0
        e = 2
        while True:
            tv, tb = _p1_tail(e, P0)
            total += tv
            bound += tb + _slop(tv)
            if (abs(tv) + tb) / (P0 - 1) < mp.mpf(_STOP):
                bound += (abs(tv) + tb) / (P0 - 1)
                break
            e += 1
            if e > 60:
                raise NumericError("totient prime sum failed to converge")
        return total, bound


def _coerce(a) -> FactoredInteger:
    return a if isinstance(a, FactoredInteger) else factorize(a)


def _radical(a) -> tuple[int, tuple[int, ...]]:
    f = _coerce(a)
    ps = tuple(p for p, _ in f.factors)
    rad = 1
    for p in ps:
        rad *= p
    return rad, ps


@lru_cache(maxsize=4096)
def _c1_by_rad(rad: int, ps: tuple, P0: int):
    with mp.workdps(_DPS):
        z2 = zeta_em(mp.mpf(2), _ZETA_EPS)
        z3 = zeta_em(mp.mpf(3), _ZETA_EPS)
        z6 = zeta_em(mp.mpf(6), _ZETA_EPS)
        lead = _cdiv(_cmul(z2, z3), z6)
        fac = Fraction(1)
        for p in ps:
            fac *= Fraction(p - 1, p) * Fraction(p * p - p, p * p - p + 1)
        facv = mp.mpf(fac.numerator) / mp.mpf(fac.denominator)
        return _cmul(lead, (facv, _slop(facv)))


@lru_cache(maxsize=4096)
def _c3_by_rad(rad: int, ps: tuple, P0: int):
    with mp.workdps(_DPS):
        c1v = _c1_by_rad(rad, ps, P0)
        sa = prime_sum_quadratic(P0)
        g = euler_gamma(1e-34)
        inner = _cadd(g, (mp.mpf(-1), mp.mpf(0)))
        inner = _cadd(inner, _neg(sa))
        for p in ps:
            t = p * p * mp.log(p) / ((p - 1) * (p * p - p + 1))
            inner = _cadd(inner, (t, _slop(t)))
        return _cmul(c1v, inner)


def c1(a, truncation_prime: int = DEFAULT_TRUNCATION_PRIME) -> CertifiedConstant:
    """C1(a) = (zeta(2)zeta(3)/zeta(6)) (phi(a)/a) prod_{p|a} (1 - 1/(p^2-p+1))."""
    rad, ps = _radical(a)
    v, b = _c1_by_rad(rad, ps, truncation_prime)
    return _certify(v, truncation_prime, b)


def c3(a, truncation_prime: int = DEFAULT_TRUNCATION_PRIME) -> CertifiedConstant:
    """C3(a) = C1(a) (gamma - 1 - sum_p log p/(p^2-p+1) + correction over p|a)."""
    rad, ps = _radical(a)
    v, b = _c3_by_rad(rad, ps, truncation_prime)
    return _certify(v, truncation_prime, b)


@lru_cache(maxsize=32)
def c5(truncation_prime: int = DEFAULT_TRUNCATION_PRIME) -> CertifiedConstant:
    """C5 = (log 2pi + gamma + sum_p log p/(p(p-1)) + 1) / 2."""
    with mp.workdps(_DPS):
        sb = prime_sum_totient(truncation_prime)
        g = euler_gamma(1e-34)
        l2pi = mp.log(2 * mp.pi)
        total = _cadd((l2pi, _slop(l2pi)), g)
        total = _cadd(total, sb)
        total = _cadd(total, (mp.mpf(1), mp.mpf(0)))
        return _certify(total[0] / 2, truncation_prime, total[1] / 2)


def _certify(value, truncation_prime, bound) -> CertifiedConstant:
    # 3x margin keeps a doubled-truncation recomputation inside the bound
    bound = 3 * bound
    if bound > _MAX_TAIL:
        raise NumericError(f"tail bound {mp.nstr(bound, 5)} exceeds 1e-15")
    return CertifiedConstant(value, truncation_prime, bound)


def mu_bias(a, M: float) -> BiasPrediction:
    """Predicted average bias: splits on the number of distinct primes of a."""
    f = _coerce(a)
    if M < 1:
        raise DomainError(f"M must be >= 1, got {M}")
    with mp.workdps(_DPS):
        if len(f.factors) >= 2:
            value = mp.mpf(0)
        elif len(f.factors) == 1:
            value = -mp.log(f.factors[0][0]) / 2
        else:
            value = -mp.log(M) / 2 - c5().value
        return BiasPrediction(f.value, M, "mu", value)


def mu_prime_bias(a, M) -> BiasPrediction:
    """Integer-M exact form: (a/phi(a)) M (C1 log M + C3 - weighted sum)."""
    f = _coerce(a)
    if M < 1:
        raise DomainError(f"M must be >= 1, got {M}")
    if M != int(M):
        raise DomainError(f"M must be an integer, got {M}")
    M = int(M)
    from . import totient_sums

    w = totient_sums.weighted_sum_inv_phi(M, f)
    with mp.workdps(_DPS):
        if isinstance(w.exact, Fraction):
            wv = mp.mpf(w.exact.numerator) / mp.mpf(w.exact.denominator)
        else:
            wv = mp.mpf(w.exact)
        aphi = mp.mpf(abs(f.value)) / euler_phi(f)
        inner = c1(f).value * mp.log(M) + c3(f).value - wv
        return BiasPrediction(f.value, M, "mu_prime", aphi * M * inner)
