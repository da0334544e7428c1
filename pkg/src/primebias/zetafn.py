"""Certified evaluation of the Riemann zeta function and Euler's constant.

Everything here returns a pair (value, bound) where bound is a rigorous
upper limit on the absolute error of value.  Zeta uses Euler-Maclaurin with
the Backlund remainder estimate: truncating after the k = K correction term
costs at most

    |B_{2K+2}| / (2K+2)!  *  prod_{j=0}^{2K+1} |s+j|  *  N^(-sigma-2K-1) / (sigma+2K+1)

which is valid whenever sigma + 2K + 1 > 0.
"""

from __future__ import annotations

import functools
import math

import mpmath as mp

from .errors import DomainError, NumericError

_N_LADDER = (16, 32, 64, 128, 256, 512, 1024, 2048, 4096)
_K_LADDER = (8, 12, 16, 24, 32, 40)


@functools.lru_cache(maxsize=None)
def _bern_over_fact(k: int) -> mp.mpf:
    with mp.workdps(80):
        return mp.bernoulli(k) / mp.factorial(k)


@functools.lru_cache(maxsize=None)
def _bern(k: int) -> mp.mpf:
    with mp.workdps(80):
        return mp.bernoulli(k)


def _backlund_bound(s, N: int, K: int):
    sigma = mp.re(s)
    denom = sigma + 2 * K + 1
    if denom <= 0:
        return mp.inf
    prod = mp.mpf(1)
    for j in range(2 * K + 2):
        prod *= abs(s + j)
    return abs(_bern_over_fact(2 * K + 2)) * prod * mp.power(N, -denom) / denom


def _pick_params(s, eps) -> tuple[int, int, mp.mpf]:
    for K in _K_LADDER:
        for N in _N_LADDER:
            b = _backlund_bound(s, N, K)
            if b <= eps:
                return N, K, b
    raise NumericError(
        f"Euler-Maclaurin parameters for zeta({s}) to eps={eps} not found"
    )


def _dps_for(eps: float) -> int:
    return max(20, int(round(-math.log10(eps))) + 12)


def _round_slop(val) -> mp.mpf:
    # covers mpf arithmetic rounding at the working precision
    return mp.mpf(10) ** (4 - mp.mp.dps) * (1 + abs(val))


@functools.lru_cache(maxsize=16384)
def zeta_em(s, eps: float = 1e-30):
    """zeta(s) for s != 1, any complex s with sigma + 81 > 0 in practice.

    Returns (value, bound).  The value is mpf for real input, mpc otherwise.
    """
    with mp.workdps(_dps_for(eps)):
        s = mp.mpmathify(s)
        if mp.im(s) == 0:
            s = mp.re(s)
        if s == 1:
            raise DomainError("zeta has a pole at s = 1")
        N, K, bound = _pick_params(s, mp.mpf(eps))
        val = mp.fsum(mp.power(n, -s) for n in range(1, N))
        val += mp.power(N, 1 - s) / (s - 1)
        val += mp.power(N, -s) / 2
        poch = s
        npow = mp.power(N, -s - 1)
        n2 = mp.power(N, -2)
        for k in range(1, K + 1):
            val += _bern_over_fact(2 * k) * poch * npow
            poch *= (s + 2 * k - 1) * (s + 2 * k)
            npow *= n2
        return val, +(bound + _round_slop(val))


@functools.lru_cache(maxsize=4096)
def zeta_deriv_em(s, eps: float = 1e-30):
    """zeta'(s) for real s > 1.  Returns (value, bound)."""
    with mp.workdps(_dps_for(eps)):
        s = mp.mpf(s)
        if s <= 1:
            raise DomainError("zeta_deriv_em requires real s > 1")
        N, K, base = _pick_params(s, mp.mpf(eps) / 4)
        lnN = mp.log(N)
        sigma = s
        # remainder of the differentiated series, from the integral form of
        # the Backlund remainder: d/ds brings down log(x) <= extra factors
        denom = sigma + 2 * K + 1
        prod = mp.mpf(1)
        hsum_full = mp.mpf(0)
        for j in range(2 * K + 2):
            prod *= s + j
            hsum_full += 1 / (s + j)
        npow_rem = mp.power(N, -denom)
        bf = abs(_bern_over_fact(2 * K + 2))
        bound = bf * npow_rem * (
            prod * hsum_full / denom + prod * (denom * lnN + 1) / denom**2
        )
        val = mp.fsum(-mp.log(n) * mp.power(n, -s) for n in range(2, N))
        val += mp.power(N, 1 - s) * (-lnN / (s - 1) - 1 / (s - 1) ** 2)
        val += -lnN * mp.power(N, -s) / 2
        poch = s
        hsum = 1 / s
        npow = mp.power(N, -s - 1)
        n2 = mp.power(N, -2)
        for k in range(1, K + 1):
            # d/ds [poch * N^(-s-2k+1)] = poch * N^(...) * (hsum - lnN)
            val += _bern_over_fact(2 * k) * poch * npow * (hsum - lnN)
            poch *= (s + 2 * k - 1) * (s + 2 * k)
            hsum += 1 / (s + 2 * k - 1) + 1 / (s + 2 * k)
            npow *= n2
        return val, +(bound + _round_slop(val))


@functools.lru_cache(maxsize=None)
def euler_gamma(eps: float = 1e-35):
    """Euler-Mascheroni constant via Euler-Maclaurin of the harmonic sum.

    The correction series for H_N is alternating and enveloping, so the
    error is bounded by the first omitted term.  Returns (value, bound).
    """
    with mp.workdps(_dps_for(eps)):
        N = 100
        K = None
        for k in range(4, 40):
            b = abs(_bern(2 * k + 2)) / ((2 * k + 2) * mp.power(N, 2 * k + 2))
            if b <= eps:
                K, bound = k, b
                break
        if K is None:
            raise NumericError("euler_gamma correction depth not found")
        h = mp.fsum(mp.mpf(1) / n for n in range(1, N + 1))
        val = h - mp.log(N) - mp.mpf(1) / (2 * N)
        for k in range(1, K + 1):
            val += _bern(2 * k) / (2 * k * mp.power(N, 2 * k))
        return val, +(bound + _round_slop(val))
