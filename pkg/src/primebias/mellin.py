"""Euler-product factorization checks, contour residues, Perron kernel.

The Euler factor Z(s) converges too slowly near re(s) = -1.4 for direct
truncation, so evaluation is hybrid: primes up to a cutoff are multiplied
directly and the remaining log-tail is re-expressed through prime zeta
values P(z) = sum_k mu(k)/k log zeta(k z), which converge geometrically.
The same expansion drives a float-precision evaluator used at quadrature
nodes, where ~1e-13 accuracy suffices for the 1e-12 convergence gate.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

from .arith import factorize, mult_stats, primes_upto, restricted_part
from .constants import c1, c3, c5
from .errors import CapacityError, DomainError, NumericError
from .sieve import totient_table
from .zetafn import zeta_em

_P_DIRECT = 3000
_P_FAST = 10**5
_ZETA_EPS = 1e-25
_Z_BUDGET = mp.mpf("1e-14")
_RE_MIN = -1.4


@dataclass(frozen=True)
class ComplexPoint:
    re: float
    im: float


@dataclass(frozen=True)
class ResidueCheck:
    center: ComplexPoint
    radius: float
    quadrature_nodes: int
    value: ComplexPoint
    predicted: mp.mpf


def zeta_eval(s):
    """zeta(s) with certified truncation error at most 1e-25."""
    val, _ = zeta_em(s, _ZETA_EPS)
    return val


def _am_primes(a, M) -> tuple[int, ...]:
    aM = restricted_part(a, M).a_M
    return tuple(p for p, _ in factorize(aM).factors) if aM > 1 else ()


def s_factor(s, a, M):
    """Finite Euler correction over the primes of the restricted part."""
    ps = _am_primes(a, M)
    with mp.workdps(30):
        out = mp.mpc(1)
        for p in ps:
            pw = mp.power(p, s + 1)
            den = 1 + 1 / ((p - 1) * pw)
            # exact zero is unreachable in mpf arithmetic; treat loss of
            # two thirds of the working digits as a vanishing denominator
            if abs(den) < mp.mpf(10) ** -20:
                raise DomainError(f"s_factor denominator vanishes at p={p}")
            out *= (1 - 1 / pw) / den
        return out.real if mp.im(out) == 0 else out


def _pz_tail_bound(P0: int, x) -> mp.mpf:
    """Upper bound on sum of p^-x over p > P0 (x > 1)."""
    x = mp.mpf(x)
    if x <= 1:
        raise NumericError(f"prime-zeta tail exponent {x} not summable")
    return mp.power(P0, 1 - x) / (x - 1)


@lru_cache(maxsize=8)
def _log1w_pairs(E: int, m0: int):
    """Exact monomial expansion of log(1 + w_p) in powers p^-(alpha*u + beta).

    w_p = sum_{e=2..E} (p^-(u+e) - p^-(2u+e)); keys are (alpha, beta).
    """
    base: dict = {}
    for e in range(2, E + 1):
        base[(1, e)] = base.get((1, e), Fraction(0)) + 1
        base[(2, e)] = base.get((2, e), Fraction(0)) - 1
    total: dict = {}
    power = {(0, 0): Fraction(1)}
    for m in range(1, m0 + 1):
        nxt: dict = {}
        for (a1, b1), c1_ in power.items():
            for (a2, b2), c2_ in base.items():
                k = (a1 + a2, b1 + b2)
                nxt[k] = nxt.get(k, Fraction(0)) + c1_ * c2_
        power = nxt
        sign = Fraction((-1) ** (m + 1), m)
        for k, cf in power.items():
            total[k] = total.get(k, Fraction(0)) + sign * cf
    return tuple(sorted((k, v) for k, v in total.items() if v != 0))


@lru_cache(maxsize=4096)
def _logzeta_mpf(w):
    """Certified log zeta(w) for real or complex w with re(w) > 1."""
    zv, zb = zeta_em(w, _ZETA_EPS)
    if abs(zv) <= zb:
        raise NumericError("zeta interval contains zero in log")
    val = mp.log(zv)
    return val, zb / (abs(zv) - zb) + mp.mpf(10) ** (6 - mp.mp.dps)


@lru_cache(maxsize=4096)
def _prime_zeta_tail_mpf(z, P0: int):
    """Certified sum of p^-z over p > P0, re(z) > 1.045."""
    sigma = mp.re(z)
    if sigma <= mp.mpf("1.045"):
        raise NumericError(f"prime zeta needs re > 1.045, got {sigma}")
    # |log zeta(w)| <= 3*2^-re(w) for re(w) >= 2, so the k-tail is geometric
    K = 1
    while 3 * mp.mpf(2) ** (-(K + 1) * sigma) / (K + 1) > mp.mpf(10) ** -30:
        K += 1
    val = mp.mpf(0) if mp.im(z) == 0 else mp.mpc(0)
    bound = 6 * mp.mpf(2) ** (-(K + 1) * sigma) / (K + 1)
    for k in range(1, K + 1):
        mu = mult_stats(k).mobius
        if mu == 0:
            continue
        lv, lb = _logzeta_mpf(k * z)
        val += mp.mpf(mu) / k * lv
        bound += lb / k
    direct = mp.fsum(mp.power(int(p), -z) for p in primes_upto(P0))
    out = val - direct
    return out, bound + mp.mpf(10) ** (6 - mp.mp.dps) * (1 + abs(out))


@lru_cache(maxsize=1024)
def _z_factor_cached(s_key):
    s = mp.mpf(s_key[0]) if s_key[1] == 0 else mp.mpc(s_key[0], s_key[1])
    with mp.workdps(30):
        u = s + 1
        su = mp.re(u)
        gmin = 2 + min(su, 2 * su)
        # direct factors
        direct = mp.mpf(1) if s_key[1] == 0 else mp.mpc(1)
        for p in primes_upto(_P_DIRECT):
            p = int(p)
            pu = mp.power(p, -u)
            direct *= 1 + (pu - pu * pu) / (p * (p - 1))
        budget = mp.mpf(10) ** -25 * len(primes_upto(_P_DIRECT))
        # tail via monomial expansion; |w_p| <= 4 p^-gmin for p > _P_DIRECT
        E, m0 = 7, 6
        wbar = 4 * mp.power(_P_DIRECT, -gmin)
        budget += (4 ** (m0 + 1)) * _pz_tail_bound(_P_DIRECT, gmin * (m0 + 1)) \
            / ((m0 + 1) * (1 - wbar))
        budget += mp.mpf("4.4") * _pz_tail_bound(_P_DIRECT, E + 1 + min(su, 2 * su))
        log_tail = mp.mpf(0) if s_key[1] == 0 else mp.mpc(0)
        for (alpha, beta), coef in _log1w_pairs(E, m0):
            x_re = alpha * su + beta
            cf = abs(mp.mpf(coef.numerator) / coef.denominator)
            if x_re > 7:
                budget += cf * _pz_tail_bound(_P_DIRECT, x_re)
                continue
            pv, pb = _prime_zeta_tail_mpf(alpha * u + beta, _P_DIRECT)
            log_tail += (mp.mpf(coef.numerator) / coef.denominator) * pv
            budget += cf * pb
        value = direct * mp.exp(log_tail)
        budget += mp.mpf(10) ** -27 * (1 + abs(value))
        if budget > _Z_BUDGET:
            raise NumericError(f"Z tail budget {mp.nstr(budget, 4)} too large")
        return value


def z_factor(s):
    """Certified Euler product Z(s) for re(s) > -1.4."""
    re_s = float(mp.re(s)) if isinstance(s, (mp.mpf, mp.mpc)) else complex(s).real
    if re_s <= _RE_MIN:
        raise DomainError(f"z_factor needs re(s) > {_RE_MIN}, got {re_s}")
    im_s = float(mp.im(s)) if isinstance(s, (mp.mpf, mp.mpc)) else complex(s).imag
    return _z_factor_cached((re_s, im_s))


def series_direct(s, a, M, N_trunc: int):
    """Truncated sum of n^-s / phi(n) over n coprime to the restricted part."""
    sc = complex(s)
    if sc.real <= 0:
        raise DomainError(f"series needs re(s) > 0, got {sc.real}")
    if N_trunc < 1:
        raise DomainError("N_trunc must be >= 1")
    if N_trunc > 10**7:
        raise CapacityError("N_trunc > 10^7 not supported")
    aM = restricted_part(a, M).a_M
    phi = totient_table(N_trunc).phi
    ns = np.arange(N_trunc + 1, dtype=np.int64)
    mask = np.gcd(ns, aM) == 1
    mask[0] = False
    nf = ns[mask].astype(np.float64)
    terms = np.exp(-sc * np.log(nf)) / phi[mask]
    out = complex(np.sum(terms))
    return out if sc.imag else out.real


# float-precision zeta for quadrature nodes: fixed Euler-Maclaurin depth,
# accurate to ~1e-20 for re(s) > -0.5, |im(s)| <= 40
_EM_N = 64
_EM_K = 12
_EM_BERN = None


def _em_tables():
    global _EM_BERN
    if _EM_BERN is None:
        with mp.workdps(30):
            _EM_BERN = [float(mp.bernoulli(2 * k) / mp.factorial(2 * k))
                        for k in range(1, _EM_K + 1)]
    return _EM_BERN


def _zeta_c128(s: complex) -> complex:
    if s == 1:
        raise DomainError("zeta pole at s=1")
    bern = _em_tables()
    ns = np.arange(1, _EM_N, dtype=np.float64)
    total = complex(np.sum(np.exp(-s * np.log(ns))))
    lnN = math.log(_EM_N)
    npow = cmath.exp(-s * lnN)
    total += npow * _EM_N / (s - 1) + npow / 2
    poch = s
    npow_k = npow / _EM_N
    for k in range(1, _EM_K + 1):
        total += bern[k - 1] * poch * npow_k
        poch *= (s + 2 * k - 1) * (s + 2 * k)
        npow_k /= _EM_N * _EM_N
    return total


def _logzeta_c128(w: complex) -> complex:
    return cmath.log(_zeta_c128(w))


def _prime_zeta_tail_c128(z: complex, logp: np.ndarray) -> complex:
    sigma = z.real
    K = max(2, math.ceil(60.0 / sigma))
    val = 0j
    for k in range(1, K + 1):
        mu = mult_stats(k).mobius if k > 1 else 1
        if mu == 0:
            continue
        val += mu / k * _logzeta_c128(k * z)
    val -= complex(np.sum(np.exp(-z * logp)))
    return val


_FAST_LOGP = None


def _fast_tables():
    global _FAST_LOGP
    if _FAST_LOGP is None:
        ps = primes_upto(_P_FAST).astype(np.float64)
        _FAST_LOGP = (ps, np.log(ps))
    return _FAST_LOGP


def _z_fast(s: complex, sigma_min: float) -> complex:
    """Z(s) in double precision; sigma_min = min re(s) on the contour."""
    ps, logp = _fast_tables()
    u = s + 1
    pu = np.exp(-u * logp)
    w = (pu - pu * pu) / (ps * (ps - 1.0))
    # log(1+w) without forming 1+w: series for small w, np.log for the rest
    small = ps > 200.0
    ws = w[small]
    log_small = ws * (1 - ws * (0.5 - ws * (1 / 3 - 0.25 * ws)))
    log_big = np.log(1.0 + w[~small])
    total = complex(np.sum(log_big)) + complex(np.sum(log_small))
    su = sigma_min + 1
    for (alpha, beta), coef in _log1w_pairs(7, 6):
        if alpha * su + beta > 4.6:
            continue
        total += float(coef) * _prime_zeta_tail_c128(alpha * u + beta, logp)
    return cmath.exp(total)


def _f_integrand(s: complex, prime_list: tuple, M: float, sigma_min: float) -> complex:
    sf = 1.0 + 0j
    for p in prime_list:
        pw = cmath.exp((s + 1) * math.log(p))
        sf *= (1 - 1 / pw) / (1 + 1 / ((p - 1) * pw))
    num = sf * _zeta_c128(s + 1) * _zeta_c128(s + 2) * _z_fast(s, sigma_min)
    return num * cmath.exp(s * math.log(M)) / (s * (s + 1))


def _predicted_residue(center: int, a, M) -> mp.mpf:
    aM = restricted_part(a, M).a_M
    with mp.workdps(30):
        if center == 0:
            return c1(aM).value * mp.log(M) + c3(aM).value
        fam = factorize(aM)
        if aM == 1:
            return mp.log(M) / (2 * M) + c5().value / M
        if len(fam.factors) == 1:
            p = fam.factors[0][0]
            return (mp.mpf(p - 1) / p) * mp.log(p) / (2 * M)
        return mp.mpf(0)


def residue_check(center: int, a, M, radius: float = 0.25) -> ResidueCheck:
    """Contour residue of the generating integrand versus its closed form."""
    if center not in (0, -1):
        raise DomainError(f"center must be 0 or -1, got {center}")
    if M < 2:
        raise DomainError(f"M must be >= 2, got {M}")
    if not 0 < radius <= 0.3:
        raise DomainError(f"radius must lie in (0, 0.3], got {radius}")
    prime_list = _am_primes(a, M)
    sigma_min = center - radius
    cache: dict = {}

    def node(j: int, n: int) -> complex:
        key = Fraction(j, n)
        if key not in cache:
            theta = 2 * math.pi * float(key)
            sp = center + radius * cmath.exp(1j * theta)
            cache[key] = _f_integrand(sp, prime_list, M, sigma_min) \
                * cmath.exp(1j * theta)
        return cache[key]

    prev = None
    n = 16
    while n <= 2**16:
        half = n // 2
        acc = node(0, n).real + node(half, n).real
        acc += 2 * math.fsum(node(j, n).real for j in range(1, half))
        val = radius * acc / n
        if prev is not None and abs(val - prev) < 1e-12:
            return ResidueCheck(ComplexPoint(float(center), 0.0), radius, n,
                                ComplexPoint(val, 0.0),
                                _predicted_residue(center, a, M))
        prev = val
        n *= 2
    raise NumericError("residue quadrature failed to converge by 2^16 nodes")


def perron_kernel_check(y: float, kappa: float, T: float):
    """Finite-T Perron integral against the exact step kernel."""
    if y <= 0:
        raise DomainError(f"y must be positive, got {y}")
    if not 0 < kappa < 1:
        raise DomainError(f"kappa must lie in (0,1), got {kappa}")
    if T < 1:
        raise DomainError(f"T must be >= 1, got {T}")
    width = min(T / 16, math.pi / (2 * max(abs(math.log(y)), 0.5)))
    n_panels = max(16, math.ceil(T / width))
    edges = np.linspace(0.0, T, n_panels + 1)
    gl_x, gl_w = np.polynomial.legendre.leggauss(12)
    mid = (edges[:-1] + edges[1:]) / 2
    hw = (edges[1:] - edges[:-1]) / 2
    ts = (mid[:, None] + hw[:, None] * gl_x[None, :]).ravel()
    wts = (hw[:, None] * gl_w[None, :]).ravel()
    s = kappa + 1j * ts
    vals = (y ** s / (s * (s + 1))).real
    integral = float(np.dot(wts, vals)) / math.pi
    exact = max(0.0, 1.0 - 1.0 / y) if y >= 1 else 0.0
    if y == 1:
        bound = 10.0 / T
    else:
        bound = 10.0 * y**kappa / (T**2 * abs(math.log(y)))
    return integral, exact, bound
