"""Shared test fixtures: a self-contained oracle for the averaged error,
a session-cached acceptance battery, and a per-criterion summary section.

The oracle rebuilds every ingredient (smallest-factor sieve, totients,
weights) in plain Python so it shares no code path with the library. Only
the logarithmic-integral normalization of pi mode is borrowed, since that
is infrastructure rather than the quantity under test.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import pytest

import primebias as pb


# ---------------------------------------------------------------- oracle

@lru_cache(maxsize=8)
def naive_spf(x: int):
    spf = list(range(x + 1))
    for p in range(2, math.isqrt(x) + 1):
        if spf[p] == p:
            for m in range(p * p, x + 1, p):
                if spf[m] == m:
                    spf[m] = p
    return spf


@lru_cache(maxsize=8)
def naive_weights(x: int, counting: str):
    spf = naive_spf(x)
    wt = [0.0] * (x + 1)
    for n in range(2, x + 1):
        p = spf[n]
        m = n
        while m % p == 0:
            m //= p
        if m != 1:
            continue
        if counting == "psi":
            wt[n] = math.log(p)
        elif counting == "theta":
            wt[n] = math.log(n) if n == p else 0.0
        else:
            wt[n] = 1.0 if n == p else 0.0
    return wt


@lru_cache(maxsize=8)
def naive_phi(Q: int):
    phi = list(range(Q + 1))
    for p in range(2, Q + 1):
        if phi[p] == p:
            for m in range(p, Q + 1, p):
                phi[m] -= phi[m] // p
    return phi


def naive_point_weight(a: int, counting: str) -> float:
    n = abs(a)
    if n < 2:
        return 0.0
    p = next((q for q in range(2, n + 1) if n % q == 0), n)
    m = n
    while m % p == 0:
        m //= p
    if m != 1:
        return 0.0
    if counting == "psi":
        return math.log(p)
    return (math.log(n) if counting == "theta" else 1.0) if n == p else 0.0


_ORACLE_CACHE: dict = {}


def oracle_average(a, x, M, counting="psi", baseline="chebyshev"):
    key = (a, x, M, counting, baseline)
    if key in _ORACLE_CACHE:
        return _ORACLE_CACHE[key]
    Q = int(Fraction(x) / Fraction(M))
    wt = naive_weights(x, counting)
    phi = naive_phi(Q)
    ratio = sum(1 for k in range(1, abs(a) + 1)
                if math.gcd(k, abs(a)) == 1) / abs(a)
    if baseline == "chebyshev":
        wbar = math.fsum(wt) if counting != "pi" else float(sum(
            1 for v in wt if v == 1.0))
    else:
        wbar = pb.li(float(x)) if counting == "pi" else float(x)
    norm = ratio * ((pb.li(float(x)) if counting == "pi" else x) / M)
    wa = naive_point_weight(a, counting)
    terms = []
    for q in range(1, Q + 1):
        if math.gcd(q, abs(a)) != 1:
            continue
        s = math.fsum(wt[n] for n in range(a % q, x + 1, q))
        terms.append(s - wa - wbar / phi[q])
    value = math.fsum(terms) / norm
    _ORACLE_CACHE[key] = value
    return value


# ------------------------------------------------------------- battery

C1_GRID = [(a, x, M) for a in (1, 2, 3, 4, 5, -5, 6, 12, 30)
           for x in (10**3, 10**4) for M in (2, 5, 10, 50)]
C2_GRID = [(a, M) for a in (1, 2, 3, 6) for M in (5, 20)]
C5_GRID = [10**2, 10**3, 10**4, 10**5, 10**6]
C8_POINTS = [(s, a) for s in (1.0, 1.5, 1 + 1j) for a in (1, 2, 6)]
C9_GRID = [(y, T) for T in (100.0, 1000.0) for y in (0.5, 1.0, 2.0, 10.0)]

_BATTERIES: dict = {}


def run_battery(threads: int) -> dict:
    """Every acceptance-criterion output, computed at one thread count.

    Values are plain floats/ints/bools so the determinism criterion can
    compare batteries across thread counts by repr equality.
    """
    if threads in _BATTERIES:
        return _BATTERIES[threads]
    b: dict = {"walls": {}}

    t0 = time.perf_counter()
    b["c1"] = {(a, x, M): pb.average_direct(
        a, x, M, "psi", "chebyshev", threads).observed_average
        for a, x, M in C1_GRID}
    for a, x, M in C1_GRID:
        oracle_average(a, x, M)
    b["walls"]["c1"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    b["c2"] = {}
    for a, M in C2_GRID:
        d = pb.average_direct(a, 10**5, M, "theta", "chebyshev", threads)
        s = pb.average_switched(a, 10**5, M, "theta", "chebyshev", threads)
        b["c2"][(a, M)] = (d.observed_average, s.observed_average)
    b["walls"]["c2"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    b["c3"] = {a: pb.average_direct(a, 10**8, 30, "psi", "chebyshev",
                                    threads).observed_average
               for a in (1, 2, 6)}
    b["walls"]["c3"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    b["c4"] = {M: (b["c3"][1] if M == 30 else pb.average_direct(
        1, 10**8, M, "psi", "chebyshev", threads).observed_average)
        for M in (10, 30, 100)}
    b["walls"]["c4"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    b["c5"] = {}
    for M in C5_GRID:
        res = pb.sum_inv_phi(M, 1)
        with mp.workdps(30):
            b["c5"][M] = (float(res.residual), float(5 * mp.log(M) / M))
    b["walls"]["c5"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    b["c6"] = {a: pb.residual_scaling_scan(a, C5_GRID).slope
               for a in (1, 2, 6)}
    b["walls"]["c6"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    res_m1 = pb.residue_check(-1, 1, 100)
    res_0 = pb.residue_check(0, 1, math.e)
    with mp.workdps(30):
        b["c7"] = {
            "c5_prime_sum": float(pb.c5().value),
            "c5_from_residue": 100.0 * res_m1.value.re
                - 0.5 * math.log(100.0),
            "s0_residue": res_0.value.re,
            "c1_plus_c3": float(pb.c1(1).value + pb.c3(1).value),
        }
    b["walls"]["c7"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    b["c8"] = {"points": {}}
    from primebias.mellin import zeta_eval
    for s, a in C8_POINTS:
        direct = pb.series_direct(s, a, 100, 10**6)
        with mp.workdps(30):
            factored = pb.s_factor(s, a, 100) * zeta_eval(s + 1) \
                * zeta_eval(s + 2) * pb.z_factor(s)
            rel = abs(mp.mpc(direct) - factored) / abs(factored)
        b["c8"]["points"][(str(s), a)] = float(rel)
    with mp.workdps(40):
        z0_err = float(abs(pb.z_factor(0) - zeta_eval(3) / zeta_eval(6)))
    b["c8"]["z0_err"] = z0_err
    b["c8"]["zm1_exact"] = bool(pb.z_factor(-1) == 1)
    b["walls"]["c8"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    b["c9"] = {}
    for y, T in C9_GRID:
        integral, exact, bound = pb.perron_kernel_check(y, 0.3, T)
        b["c9"][(y, T)] = (abs(integral - exact), bound)
    b["walls"]["c9"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    b["c10"] = {x: pb.titchmarsh_sum(1, x).relative_residual
                for x in (10**6, 10**7)}
    b["walls"]["c10"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    with mp.workdps(30):
        target = float(mp.e ** (-mp.euler))
    b["c11"] = {"target": target}
    for M in (10**2, 10**3, 10**4):
        prop = float(pb.smooth_proportion(10**7, M))
        b["c11"][M] = abs(prop - target)
    b["walls"]["c11"] = time.perf_counter() - t0

    _BATTERIES[threads] = b
    return b


@pytest.fixture(scope="session")
def battery():
    return run_battery(1)


# ------------------------------------------------- criterion summary

_CRITERION_STATUS: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    out = yield
    rep = out.get_result()
    if rep.when != "call" or "test_acceptance" not in str(item.fspath):
        return
    if not item.name.startswith("test_criterion"):
        return
    if hasattr(rep, "wasxfail"):
        status = "XFAIL (documented deviation)" if rep.skipped else "XPASS"
    elif rep.passed:
        status = "PASS"
    elif rep.failed:
        status = "FAIL"
    else:
        status = rep.outcome.upper()
    _CRITERION_STATUS[item.name] = status


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERION_STATUS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERION_STATUS):
        label = name.replace("test_", "").replace("_", " ")
        terminalreporter.write_line(f"{label}: {_CRITERION_STATUS[name]}")
