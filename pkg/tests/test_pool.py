import math

import pytest
from hypothesis import given, settings, strategies as st

from carmichael import fixtures
from carmichael.arith import euler_phi, factor, is_prime, primes_up_to
from carmichael.pool import (
    FecundityRecord,
    PoolError,
    ScanTooLarge,
    expected_count,
    fecundity,
    fecundity_scan,
    pool_conditions,
    prime_pool,
)

SIEVE = primes_up_to(10**6 + 1)


def brute_pool(m, L):
    return [p for p in SIEVE if p <= L + 1 and L % p and all(L % (p**r - 1) == 0 for r in range(1, m + 1))]


@settings(max_examples=60)
@given(st.integers(1, 10**6 - 1), st.sampled_from([1, 2, 3]))
def test_pool_matches_brute_force(L, m):
    assert list(prime_pool(m, factor(L)).primes) == brute_pool(m, L)


@pytest.mark.parametrize("L", [24, 120, 720, 5040, 55440, 720720 // 2])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_pool_smooth_moduli(L, m):
    assert list(prime_pool(m, factor(L)).primes) == brute_pool(m, L)


def test_pool_small_examples():
    assert prime_pool(1, factor(120)).primes == (7, 11, 13, 31, 41, 61)
    assert prime_pool(2, factor(1)).primes == ()
    assert prime_pool(2, factor(2)).primes == ()


def test_pool_sizes_published_moduli():
    assert len(prime_pool(2, fixtures.L1.factored)) == 45
    assert len(prime_pool(2, fixtures.L2.factored)) == 58
    for p in prime_pool(2, fixtures.L2.factored):
        assert is_prime(p) and pool_conditions(p, 2, fixtures.L2.value)


def test_pool_monotone_in_order():
    L = fixtures.L1.factored
    p1, p2, p3 = (set(prime_pool(m, L).primes) for m in (1, 2, 3))
    assert p3 <= p2 <= p1


def test_pool_guards():
    with pytest.raises(PoolError):
        prime_pool(0, factor(12))
    with pytest.raises(PoolError):
        prime_pool(2, factor(2**63))


def test_fecundity_values():
    f1, f2 = fecundity(fixtures.L1.factored), fecundity(fixtures.L2.factored)
    assert abs(f1.fecundity - 8.039) <= 1e-3
    assert abs(f2.fecundity - 16.132) <= 1e-3
    assert math.isclose(f1.phi_log2, math.log2(euler_phi(fixtures.L1.factored)))
    assert expected_count(fixtures.L1.factored) == f1.fecundity


def test_fecundity_record_round_trip():
    rec = fecundity(fixtures.L2.factored)
    assert FecundityRecord.from_json(rec.to_json()) == rec


def test_fecundity_scan_agrees_with_direct():
    recs = fecundity_scan(13, {2: 4, 3: 2}, 10**5, m=2, top_k=50)
    for r in recs:
        direct = fecundity(r.L, 2)
        assert r.pool_size == direct.pool_size
        assert math.isclose(r.fecundity, direct.fecundity, abs_tol=1e-9)
    keys = [(-r.fecundity, r.L.value) for r in recs]
    assert keys == sorted(keys)


def test_fecundity_scan_ranks_l2_first():
    recs = fecundity_scan(37, {2: 7, 3: 3, 5: 2}, 2 * fixtures.L2.value, m=2, top_k=200)
    assert recs[0].L.value == fixtures.L2.value
    assert fixtures.L1.value in [r.L.value for r in recs]


def test_fecundity_scan_guards():
    with pytest.raises(PoolError):
        fecundity_scan(101, None, 10**6)
    with pytest.raises(ScanTooLarge):
        fecundity_scan(97, {2: 20}, 2**62, ceiling=1000)
    assert fecundity_scan(7, None, 100, top_k=0) == []
