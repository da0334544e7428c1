"""Averaged progression error terms by two independent algorithms.

The headline quantity averages W(x;q,a) - w(a) - W(x)/phi(q) over moduli
q <= x/M coprime to a, normalized by (phi(a)/a)(x/M). The direct algorithm
walks progressions against a prime bitmap, splitting moduli at B ~ sqrt(Q):
small q by stepped slices, large q by enumerating n = a + k*q for each
cofactor k. The switched algorithm replaces the modulus sum with a divisor
count at p - a plus a short tail, and must agree with the direct one.

x up to 10^6 is summed with math.fsum on the raw terms. Above that, fixed
chunk grids feed double-double partial sums, so every reported field except
wall_time is bit-identical at any thread count.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

from ._accum import (FSUM_CUTOFF, parallel_map, resolve_threads, sum_array,
                     sum_array_dd, sum_chunk_results)
from .arith import (euler_phi, factorize, mult_stats, theta_weight,
                    von_mangoldt)
from .constants import mu_bias, mu_prime_bias
from .errors import (CapacityError, DomainError, NumericError,
                     UnsupportedModeError)
from .sieve import (_segments, chebyshev_totals, li, pi_counts,
                    smallest_prime_factor, totient_table)

_SPF_LIMIT = 10**7
_X_CAP = 2**31  # the prime bitmap for [0, x] must stay addressable
_COUNTINGS = ("psi", "theta", "pi")
_BASELINES = ("chebyshev", "x_linear")

# read-only arrays shared with forked workers
_G: dict = {}


@dataclass(frozen=True)
class BiasReport:
    a: int
    x: int
    M: float
    counting: str
    baseline: str
    algorithm: str
    observed_average: float
    predicted: mp.mpf
    residual: float
    wall_time: float


@dataclass(frozen=True)
class TitchmarshReport:
    a: int
    x: int
    sum_value: float
    predicted: mp.mpf
    relative_residual: float


@dataclass(frozen=True)
class SweepFailure:
    a: int
    M: float
    message: str


def _coerce_x(x) -> int:
    ix = int(x)
    if ix != x or ix < 2:
        raise DomainError(f"x must be an integer >= 2, got {x}")
    if ix > _X_CAP:
        raise CapacityError(f"x > {_X_CAP} not supported")
    return ix


def _floor_q(x: int, M) -> int:
    if M < 1:
        raise DomainError(f"M must be >= 1, got {M}")
    Q = int(Fraction(x) / Fraction(M))
    if Q < 1:
        raise DomainError("x/M < 1")
    return Q


def _radical(a: int) -> int:
    return mult_stats(a).radical if abs(a) != 1 else 1


@lru_cache(maxsize=2)
def _phi_table(Q: int) -> np.ndarray:
    return totient_table(Q).phi


@lru_cache(maxsize=2)
def _coprime_mask(Q: int, rad: int) -> np.ndarray:
    mask = np.gcd(np.arange(Q + 1, dtype=np.int64), rad) == 1
    mask[0] = False
    mask.setflags(write=False)
    return mask


@lru_cache(maxsize=4)
def weight_array(x: int, counting: str) -> np.ndarray:
    """wt[n] = the counting weight of n (0 when n contributes nothing)."""
    if x > FSUM_CUTOFF:
        raise DomainError(f"weight arrays only kept up to x={FSUM_CUTOFF}")
    wt = np.zeros(x + 1, dtype=np.float64)
    bits, ppn, ppw = _prime_tables(x)
    ns = np.flatnonzero(bits)
    if counting == "pi":
        wt[ns] = 1.0
    else:
        wt[ns] = np.log(ns.astype(np.float64))
        if counting == "psi":
            wt[ppn] = ppw
    wt.setflags(write=False)
    return wt


_PRIME_STATE: dict = {}


def _prime_tables(x: int):
    """Prime bitmap for [0, x] plus proper prime powers; one x cached."""
    if _PRIME_STATE.get("x") != x:
        bits = np.zeros(x + 1, dtype=bool)
        pn: list[int] = []
        pw: list[float] = []
        for win in _segments(2, x + 1):
            bits[win.lo : win.hi] = win.prime_bits
            for n, w in win.prime_powers:
                pn.append(n)
                pw.append(w)
        bits.setflags(write=False)
        _PRIME_STATE.clear()
        _PRIME_STATE.update(
            x=x, bits=bits,
            ppn=np.asarray(pn, dtype=np.int64),
            ppw=np.asarray(pw, dtype=np.float64),
        )
    return _PRIME_STATE["bits"], _PRIME_STATE["ppn"], _PRIME_STATE["ppw"]


def _mode_pieces(a: int, x: int, counting: str, baseline: str, M):
    """Returns (W(x) for the baseline, w(a), normalization divisor)."""
    if counting not in _COUNTINGS:
        raise DomainError(f"unknown counting mode {counting!r}")
    if baseline not in _BASELINES:
        raise DomainError(f"unknown baseline {baseline!r}")
    ratio = euler_phi(a) / abs(a)
    if counting == "psi":
        wbar = chebyshev_totals(x, "lambda") if baseline == "chebyshev" else float(x)
        wa = von_mangoldt(a)
        norm = ratio * (x / M)
    elif counting == "theta":
        wbar = chebyshev_totals(x, "theta") if baseline == "chebyshev" else float(x)
        wa = theta_weight(a)
        norm = ratio * (x / M)
    else:
        lix = li(float(x))
        wbar = float(pi_counts(x, 1, 0)) if baseline == "chebyshev" else lix
        wa = 1.0 if theta_weight(a) > 0 else 0.0
        norm = ratio * (lix / M)
    return wbar, wa, norm


def average_direct(a: int, x, M, counting: str = "psi",
                   baseline: str = "chebyshev", threads=None) -> BiasReport:
    """Normalized average error over q <= x/M by direct progression walks."""
    t0 = time.perf_counter()
    x = _coerce_x(x)
    if a == 0 or abs(a) >= x:
        raise DomainError(f"need 0 < |a| < x, got a={a}, x={x}")
    Q = _floor_q(x, M)
    wbar, wa, norm = _mode_pieces(a, x, counting, baseline, M)
    rad = _radical(a)
    mask = _coprime_mask(Q, rad)
    n_q = int(np.count_nonzero(mask))
    phi = _phi_table(Q)
    if x <= FSUM_CUTOFF:
        total = _direct_small(a, x, Q, counting, wbar, mask, phi)
    else:
        total = _direct_large(a, x, Q, counting, wbar, mask, phi, rad,
                              resolve_threads(threads))
    if not 2 <= a <= x:
        total -= wa * n_q
    observed = total / norm
    predicted = mu_bias(a, M).value
    return BiasReport(a, x, M, counting, baseline, "direct", observed,
                      predicted, observed - float(predicted),
                      time.perf_counter() - t0)


def _direct_small(a, x, Q, counting, wbar, mask, phi) -> float:
    wt = weight_array(x, counting)
    if 2 <= a <= x and wt[a] != 0.0:
        wt = wt.copy()
        wt[a] = 0.0  # ownership of the n = a term sits with the w(a) formula
    qs = np.flatnonzero(mask)
    pieces = []
    for q in qs:
        sl = wt[a % q :: q]
        pieces.append(sl[sl != 0.0])
    prog = math.fsum(np.concatenate(pieces)) if pieces else 0.0
    base = wbar * math.fsum(1.0 / phi[qs].astype(np.float64))
    return prog - base


def _direct_large(a, x, Q, counting, wbar, mask, phi, rad, threads) -> float:
    bits, ppn, ppw = _prime_tables(x)
    b_eff = min(Q, max(math.isqrt(Q), 2 * abs(a) + 1, 64))
    _G.clear()
    _G.update(bits=bits, ppn=ppn if counting == "psi" else ppn[:0],
              ppw=ppw, phi=phi, mask=mask, a=a, x=x, Q=Q, B=b_eff, rad=rad,
              counting=counting, wbar=wbar)
    chunks = [("q", c) for c in range(64)] + [("k", c) for c in range(128)]
    total = sum_chunk_results(parallel_map(_bias_chunk, chunks, threads))
    if counting == "psi":
        total += _powers_large_q(a, Q, b_eff, rad, ppn, ppw)
    inv_high = 1.0 / phi[b_eff + 1 :][mask[b_eff + 1 :]].astype(np.float64)
    total -= wbar * float(np.sum(inv_high))
    return total


def _bias_chunk(chunk) -> tuple[float, float]:
    tag, c = chunk
    g = _G
    bits = g["bits"]
    a, x, Q, B = g["a"], g["x"], g["Q"], g["B"]
    pi_mode = g["counting"] == "pi"
    sums = []
    if tag == "q":
        mask, phi, wbar = g["mask"], g["phi"], g["wbar"]
        ppn, ppw = g["ppn"], g["ppw"]
        for q in range(1 + c, B + 1, 64):
            if not mask[q]:
                continue
            r = a % q
            ns = r + q * np.flatnonzero(bits[r::q]).astype(np.int64)
            if 2 <= a <= x:
                ns = ns[ns != a]
            if pi_mode:
                s = float(ns.size)
            else:
                s = sum_array(np.log(ns.astype(np.float64)))
                if ppn.size:
                    psel = ppw[(ppn % q == r) & (ppn != a)]
                    s += float(np.sum(psel))
            sums.append(s - wbar / float(phi[q]))
    else:
        rad = g["rad"]
        kmax = max(0, (x - a) // (B + 1))
        for k in range(1 + c, kmax + 1, 128):
            j0 = max(B + 1, -((2 - a) // -k))
            jmax = min(Q, (x - a) // k)
            if j0 > jmax:
                continue
            start = a + k * j0
            sl = bits[start : a + k * jmax + 1 : k]
            idx = np.flatnonzero(sl)
            if not idx.size:
                continue
            ns = start + k * idx.astype(np.int64)
            keep = np.gcd((ns - a) // k, rad) == 1
            if pi_mode:
                sums.append(float(np.count_nonzero(keep)))
            else:
                ns = ns[keep]
                if ns.size:
                    sums.append(sum_array(np.log(ns.astype(np.float64))))
    return sum_array_dd(np.asarray(sums, dtype=np.float64))


def _divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n).factors:
        ds = [d * p**i for d in ds for i in range(e + 1)]
    return ds


def _powers_large_q(a, Q, b_eff, rad, ppn, ppw) -> float:
    vals = []
    for m, w in zip(ppn.tolist(), ppw.tolist()):
        mm = m - a
        if mm <= b_eff:
            continue
        cnt = sum(1 for d in _divisors(mm)
                  if b_eff < d <= Q and math.gcd(d, rad) == 1)
        if cnt:
            vals.append(w * cnt)
    return math.fsum(vals)


def _tau_coprime_batch(vals: np.ndarray, rad: int) -> np.ndarray:
    """Divisor counts restricted to divisors coprime to rad, vectorized."""
    out = np.ones(vals.size, dtype=np.int64)
    rem = vals.astype(np.int64).copy()
    if not rem.size:
        return out
    lim = min(int(rem.max()), _SPF_LIMIT)
    spf = smallest_prime_factor(max(lim, 2)).astype(np.int64)
    for i in np.flatnonzero(rem > lim):
        t = 1
        for p, e in factorize(int(rem[i])).factors:
            if math.gcd(p, rad) == 1:
                t *= e + 1
        out[i] = t
        rem[i] = 1
    idx = np.flatnonzero(rem > 1)
    while idx.size:
        r = rem[idx]
        p = spf[r]
        p = np.where(p > 0, p, r)  # table stores 0 at primes
        e = np.ones(idx.size, dtype=np.int64)
        r = r // p
        while True:
            div = r % p == 0
            if not div.any():
                break
            r = np.where(div, r // p, r)
            e += div
        out[idx] *= np.where(np.gcd(p, rad) == 1, e + 1, 1)
        rem[idx] = r
        idx = idx[r > 1]
    return out


def average_switched(a: int, x, M, counting: str = "theta",
                     baseline: str = "chebyshev", threads=None) -> BiasReport:
    """Same average via divisor switching: exact identity for positive a."""
    t0 = time.perf_counter()
    if a <= 0:
        raise UnsupportedModeError(f"switched algorithm needs a > 0, got {a}")
    if counting != "theta":
        raise UnsupportedModeError("switched algorithm runs in theta mode")
    x = _coerce_x(x)
    if a >= x:
        raise DomainError(f"need 0 < a < x, got a={a}, x={x}")
    Q = _floor_q(x, M)
    wbar, _, norm = _mode_pieces(a, x, counting, baseline, M)
    rad = _radical(a)
    mask = _coprime_mask(Q, rad)
    phi = _phi_table(Q)
    bits, _, _ = _prime_tables(x)
    small = x <= FSUM_CUTOFF

    # main term: log p times the count of divisors of p - a that are coprime
    ps = np.flatnonzero(bits).astype(np.int64)
    ps = ps[ps > a]
    tau = _tau_coprime_batch(ps - a, rad)
    terms = np.log(ps.astype(np.float64)) * tau
    t1 = math.fsum(terms) if small else sum_chunk_results([sum_array_dd(terms)])

    # switched tail: progressions counted past a + rQ for each cofactor r
    rmax = (x - a - 1) // Q
    tail_pieces = []
    for r in range(1, rmax + 1):
        if math.gcd(r, rad) != 1:
            continue
        start = a + r * (Q + 1)
        if start > x:
            continue
        ns = start + r * np.flatnonzero(bits[start :: r]).astype(np.int64)
        tail_pieces.append(np.log(ns.astype(np.float64)))
    if tail_pieces:
        cat = np.concatenate(tail_pieces)
        t2 = math.fsum(cat) if small else sum_chunk_results([sum_array_dd(cat)])
    else:
        t2 = 0.0

    # primes below a re-enter the unstarred count once per admissible modulus
    sub = []
    for p in range(2, a):
        if not bits[p]:
            continue
        cnt = sum(1 for d in _divisors(a - p)
                  if d <= Q and math.gcd(d, rad) == 1)
        if cnt:
            sub.append(math.log(p) * cnt)
    c_sub = math.fsum(sub)

    qs = np.flatnonzero(mask)
    base = wbar * math.fsum(1.0 / phi[qs].astype(np.float64))
    observed = (t1 - t2 + c_sub - base) / norm
    predicted = mu_bias(a, M).value
    return BiasReport(a, x, M, counting, baseline, "switched", observed,
                      predicted, observed - float(predicted),
                      time.perf_counter() - t0)


def predict(a: int, M, regime: str = "limit") -> mp.mpf:
    """Closed-form bias: the M -> infinity value, or the finite-M refinement."""
    if regime == "limit":
        return mu_bias(a, M).value
    if regime == "finite":
        return mu_prime_bias(a, M).value
    raise DomainError(f"unknown regime {regime!r}")


def titchmarsh_sum(a: int, x) -> TitchmarshReport:
    """Sum of Lambda(n) tau(n - a) for |a| < n <= x versus its asymptotic."""
    x = _coerce_x(x)
    if a == 0 or abs(a) ** 4 >= x:
        raise DomainError(f"need 0 < |a| < x^(1/4), got a={a}, x={x}")
    from .constants import c1, c3
    bits, ppn, ppw = _prime_tables(x)
    ps = np.flatnonzero(bits).astype(np.int64)
    ps = ps[ps > abs(a)]
    values = [(ps, np.log(ps.astype(np.float64)))]
    keep = (ppn > abs(a)) & (ppn - a > 0)
    values.append((ppn[keep], ppw[keep]))
    parts = []
    for ns, ws in values:
        tau = _tau_coprime_batch(ns - a, 1)
        parts.append(ws * tau)
    cat = np.concatenate(parts)
    total = math.fsum(cat) if x <= FSUM_CUTOFF \
        else sum_chunk_results([sum_array_dd(cat)])
    with mp.workdps(30):
        c1v = c1(a).value
        pred = c1v * x * mp.log(x) + (2 * c3(a).value + c1v) * x
        rel = float((total - pred) / pred)
    return TitchmarshReport(a, x, total, pred, rel)


def bias_sweep(a_list, x, M_list, counting: str = "psi",
               baseline: str = "chebyshev", threads=None) -> list:
    """Direct reports over the (a, M) grid; failed cells become flags."""
    out = []
    for a in sorted(a_list):
        for M in sorted(M_list):
            try:
                out.append(average_direct(a, x, M, counting, baseline, threads))
            except (DomainError, UnsupportedModeError, NumericError) as exc:
                out.append(SweepFailure(a, M, str(exc)))
    return out
