"""Certified constants against an independently frozen high-precision oracle.

The digit strings below were computed once with a standalone mpmath script
(60 decimal digits, enveloping tail sums over primes to 10^6) and frozen
before the library existed; they are the reference, not a regression echo.
"""

import math

import mpmath as mp
import pytest

import primebias as pb
from primebias.constants import prime_sum_quadratic, prime_sum_totient
from primebias.errors import DomainError

ORACLE = {
    "S_A": "0.608381717863324722683834585815620187759148598",
    "S_B": "0.755366610831688021159316685988625317796300153",
    "C1_1": "1.9435964368207592050570703625747634371878585",
    "C3_1": "-2.00417066630706493721804476374107727754283079",
    "C5": "2.08522967107128318266324412444113151428062722",
    "MU_1_100": "-4.38781476407",
}


def _check(value, bound, key, tol=1e-25):
    with mp.workdps(60):
        ref = mp.mpf(ORACLE[key])
        err = abs(value - ref)
        assert err <= bound + mp.mpf(tol), (key, float(err), float(bound))
        assert bound < 1e-14


def test_prime_sums_match_oracle():
    v, b = prime_sum_quadratic()
    _check(v, b, "S_A")
    v, b = prime_sum_totient()
    _check(v, b, "S_B")


def test_c1_c3_c5_match_oracle():
    _check(pb.c1(1).value, pb.c1(1).tail_bound, "C1_1")
    _check(pb.c3(1).value, pb.c3(1).tail_bound, "C3_1")
    _check(pb.c5().value, pb.c5().tail_bound, "C5")


def test_c1_euler_factors():
    # C1(a) rescales by (p-1)/p * (1 - 1/(p^2-p+1)) per new prime p | a
    with mp.workdps(40):
        for a, parts in ((2, (2,)), (6, (2, 3)), (30, (2, 3, 5)),
                         (12, (2, 3)), (-6, (2, 3))):
            expect = pb.c1(1).value
            for p in parts:
                expect *= mp.mpf(p - 1) / p * (1 - mp.mpf(1) / (p * p - p + 1))
            assert abs(pb.c1(a).value - expect) < 1e-24, a


def test_c1_of_a_depends_on_radical_only():
    assert pb.c1(12).value == pb.c1(6).value
    assert pb.c1(-6).value == pb.c1(6).value
    assert pb.c3(8).value == pb.c3(2).value


def test_mu_bias_cases():
    with mp.workdps(40):
        # two or more prime factors: exactly zero
        for a in (6, -6, 12, 30, 210):
            assert pb.mu_bias(a, 50).value == 0
        # prime powers: -log(p)/2 independent of M
        for a, p in ((2, 2), (9, 3), (-8, 2), (125, 5), (7, 7)):
            assert abs(pb.mu_bias(a, 50).value + mp.log(p) / 2) < 1e-24, a
        # units: -log(M)/2 - C5
        for M in (10, 100, 1000):
            expect = -mp.log(M) / 2 - pb.c5().value
            assert abs(pb.mu_bias(1, M).value - expect) < 1e-24
            assert abs(pb.mu_bias(-1, M).value - expect) < 1e-24
        ref = mp.mpf(ORACLE["MU_1_100"])
        assert abs(pb.mu_bias(1, 100).value - ref) < 1e-11


def test_mu_prime_bias():
    with mp.workdps(40):
        for a in (1, 2, 6, 30):
            ratio = mp.mpf(abs(a)) / pb.euler_phi(a)
            expect = ratio * pb.c3(a).value
            assert abs(pb.mu_prime_bias(a, 1).value - expect) < 1e-20, a
    with pytest.raises(DomainError):
        pb.mu_prime_bias(2, 2.5)  # integer M only
    # the finite-M bias approaches the M -> infinity prediction
    with mp.workdps(40):
        for a in (1, 2, 6):
            gap100 = abs(pb.mu_prime_bias(a, 100).value
                         - pb.mu_bias(a, 100).value)
            gap10k = abs(pb.mu_prime_bias(a, 10**4).value
                         - pb.mu_bias(a, 10**4).value)
            assert gap10k < gap100 < 0.2, (a, float(gap100), float(gap10k))


def test_certified_constant_fields():
    c = pb.c1(6)
    assert c.truncation_prime == 10**4
    assert c.tail_bound > 0
    assert isinstance(pb.mu_bias(2, 30).kind, str)


def test_mu_bias_validation():
    with pytest.raises(DomainError):
        pb.mu_bias(0, 10)
    with pytest.raises(DomainError):
        pb.mu_bias(1, 0.5)
