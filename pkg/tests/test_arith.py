"""Factorization and multiplicative-function checks against brute force."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import primebias as pb
from primebias.errors import CapacityError, DomainError


def brute_factors(n):
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def test_factorize_small_range():
    for n in range(1, 2000):
        f = pb.factorize(n)
        assert f.factors == brute_factors(n), n
        assert math.prod(p**e for p, e in f.factors) == n


def test_factorize_negative_and_units():
    f = pb.factorize(-12)
    assert f.sign == -1 and f.factors == ((2, 2), (3, 1))
    assert pb.factorize(1).factors == ()
    assert pb.factorize(-1).sign == -1


def test_factorize_rejects_zero_and_overflow():
    with pytest.raises(DomainError):
        pb.factorize(0)
    with pytest.raises(CapacityError):
        pb.factorize(2**63)


def test_factorize_large_semiprimes():
    for p, q in [(1000003, 1000033), (2147483647, 2147483629),
                 (99999989, 99999971)]:
        f = pb.factorize(p * q)
        assert f.factors == ((min(p, q), 1), (max(p, q), 1))
    f = pb.factorize(2**61 - 1)  # Mersenne prime
    assert f.factors == ((2**61 - 1, 1),)


@settings(derandomize=True, max_examples=60, deadline=None)
@given(st.lists(st.sampled_from([2, 3, 5, 7, 11, 97, 65537, 1000003]),
                min_size=1, max_size=4))
def test_factorize_roundtrip_property(primes):
    n = math.prod(primes)
    if n >= 2**63:
        return
    f = pb.factorize(n)
    assert math.prod(p**e for p, e in f.factors) == n
    assert all(brute_factors(p) == ((p, 1),) for p, _ in f.factors)


def test_euler_phi_and_mult_stats():
    for n in range(1, 500):
        phi = sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
        assert pb.euler_phi(n) == phi
        assert pb.euler_phi(-n) == phi
        s = pb.mult_stats(n)
        fac = brute_factors(n)
        assert s.omega == len(fac)
        assert s.radical == math.prod(p for p, _ in fac) if fac else 1
        tau = math.prod(e + 1 for _, e in fac)
        assert s.tau == tau
        sq_free = all(e == 1 for _, e in fac)
        assert s.mobius == ((-1) ** len(fac) if sq_free else 0)


def test_point_weights():
    for n in range(1, 300):
        lam = 0.0
        fac = brute_factors(n)
        if len(fac) == 1:
            lam = math.log(fac[0][0])
        assert abs(pb.von_mangoldt(n) - lam) < 1e-15
        assert abs(pb.von_mangoldt(-n) - lam) < 1e-15
        th = math.log(n) if len(fac) == 1 and fac[0][1] == 1 else 0.0
        assert abs(pb.theta_weight(n) - th) < 1e-15


def test_restricted_part():
    assert pb.restricted_part(12, 2).a_M == 2
    assert pb.restricted_part(12, 3).a_M == 6
    assert pb.restricted_part(30, 10).a_M == 30
    assert pb.restricted_part(7, 2).a_M == 1
    assert pb.restricted_part(-45, 4).a_M == 3
    assert pb.restricted_part(1, 100).a_M == 1


def test_smooth_proportion_brute():
    X, M = 240, 7
    count = 0
    for n in range(1, X + 1):
        rad_small = math.prod({p for p, _ in brute_factors(n) if p <= M},
                              start=1)
        if rad_small <= M:
            count += 1
    assert pb.smooth_proportion(X, M) == Fraction(count, X)
    assert pb.smooth_proportion(10, 1) == Fraction(1)  # no primes <= 1


def test_smooth_proportion_validation():
    with pytest.raises(DomainError):
        pb.smooth_proportion(0, 10)
    with pytest.raises(DomainError):
        pb.smooth_proportion(10, 0.5)
