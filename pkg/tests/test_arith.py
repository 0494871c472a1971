import math
import random

import pytest
from hypothesis import given, strategies as st

from carmichael.arith import (
    ArithmeticDomainError,
    CRTInconsistentError,
    FactoredNat,
    FactorizationIncomplete,
    NotInvertibleError,
    Residue,
    crt_combine,
    divisors,
    euler_phi,
    factor,
    format_factorization,
    is_prime,
    isqrt,
    legendre,
    mod_inverse,
    mod_pow,
    parse_factorization,
    parse_nat,
    primes_up_to,
)


def naive_is_prime(n):
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def test_mod_pow_examples():
    assert mod_pow(2, 10, 1000) == 24
    assert mod_pow(7, 560, 561) == 1
    assert mod_pow(5, 0, 1) == 0
    with pytest.raises(ArithmeticDomainError):
        mod_pow(2, 3, 0)


@given(st.integers(0, 10**6), st.integers(0, 200), st.integers(1, 10**6))
def test_mod_pow_matches_repeated_multiplication(b, e, m):
    r = 1 % m
    for _ in range(e):
        r = r * b % m
    assert mod_pow(b, e, m) == r


def test_is_prime_small_range_exhaustive():
    for n in range(0, 5000):
        assert is_prime(n) == naive_is_prime(n), n


def test_is_prime_known_values():
    assert is_prime(2**61 - 1)
    assert not is_prime(561)
    assert not is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7
    assert not is_prime(3825123056546413051)
    assert is_prime(2**127 - 1)
    assert not is_prime((2**61 - 1) * (2**31 - 1))


def test_primes_up_to():
    assert primes_up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert primes_up_to(1) == []


@given(st.integers(1, 10**12))
def test_factor_product_and_primality(n):
    f = factor(n)
    assert f.value == n
    assert math.prod(p**e for p, e in f.factors) == n
    assert all(is_prime(p) for p, _ in f.factors)
    assert [p for p, _ in f.factors] == sorted({p for p, _ in f.factors})


def test_factor_large_semiprime():
    p, q = 1000000007, 998244353
    assert factor(p * q * 12).factors == ((2, 2), (3, 1), (q, 1), (p, 1))


def test_factor_incomplete_reports_partial():
    n = 2**3 * 1000000007 * 998244353
    with pytest.raises(FactorizationIncomplete) as info:
        factor(n, rho_iterations=1)
    assert info.value.partial == [(2, 3)]
    assert info.value.cofactor == 1000000007 * 998244353


def test_factored_nat_invariants():
    with pytest.raises(ArithmeticDomainError):
        FactoredNat.from_factors([(4, 1)])
    with pytest.raises(ArithmeticDomainError):
        FactoredNat.from_factors([(3, 1), (2, 1)])
    one = parse_factorization("1")
    assert one.value == 1 and one.factors == ()
    assert FactoredNat.from_primes([3, 11, 17]).value == 561


@given(st.integers(2, 10**9))
def test_factorization_string_round_trip(n):
    f = factor(n)
    assert parse_factorization(format_factorization(f)) == f
    assert parse_nat(str(n)) == f


def test_parse_rejects_malformed():
    for bad in ["2^", "x*3", "4*5", "5*3", ""]:
        with pytest.raises(ArithmeticDomainError):
            parse_factorization(bad)


@given(st.integers(1, 5000))
def test_divisors_and_phi(n):
    f = factor(n)
    ds = sorted(divisors(f))
    assert ds == [d for d in range(1, n + 1) if n % d == 0]
    assert euler_phi(f) == sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


@given(st.integers(0, 10**6), st.integers(1, 10**6))
def test_mod_inverse(a, m):
    if math.gcd(a, m) != 1:
        with pytest.raises(NotInvertibleError):
            mod_inverse(a, m)
    else:
        assert a * mod_inverse(a, m) % m == 1 % m


@given(st.integers(1, 3000), st.integers(1, 3000), st.integers(0, 10**6), st.integers(0, 10**6))
def test_crt_combine(m1, m2, a, b):
    r1, r2 = Residue(a, m1), Residue(b, m2)
    g = math.gcd(m1, m2)
    if (a - b) % g:
        with pytest.raises(CRTInconsistentError) as info:
            crt_combine(r1, r2)
        assert info.value.gcd == g
    else:
        r = crt_combine(r1, r2)
        assert r.modulus == m1 * m2 // g
        assert r.value % m1 == a % m1 and r.value % m2 == b % m2


def test_residue_machine_bound():
    assert Residue.machine(5, 7).value == 5
    with pytest.raises(ArithmeticDomainError):
        Residue.machine(1, 2**63)


def test_isqrt_and_legendre():
    assert isqrt(49) == (7, True) and isqrt(50) == (7, False)
    p = 1009
    squares = {x * x % p for x in range(1, p)}
    rng = random.Random(1)
    for a in rng.sample(range(1, p), 50):
        assert legendre(a, p) == (1 if a in squares else -1)
    assert legendre(0, p) == 0
