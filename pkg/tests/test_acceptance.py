"""One test per acceptance criterion; each reports a PASS/FAIL line."""
import math
import os
import time

import pytest

from carmichael import fixtures
from carmichael.arith import FactoredNat, factor, is_prime
from carmichael.cli import main
from carmichael.korselt import Verdict, check_order
from carmichael.mitm import SubsetProductInstance, census_rigid, enumerate_hits, single_block_probe
from carmichael.nonrigid import GcdConditionFailed, search_nonrigid, smallest_valid_p0, validate
from carmichael.oracle import binomial_lemma_check, exhaustive_order1, probe_all
from carmichael.pool import fecundity, prime_pool

from _instances import brute_masks, random_instances

L1, L2 = fixtures.L1.factored, fixtures.L2.factored


def timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t


def test_criterion_1_pool_sizes(report_criterion):
    (p1, p2), dt = timed(lambda: (len(prime_pool(2, L1)), len(prime_pool(2, L2))))
    ok = p1 == 45 and p2 == 58 and dt < 1.0
    assert report_criterion(1, ok, f"#P(2,L1)={p1} (45), #P(2,L2)={p2} (58), {dt:.3f}s < 1s")


def test_criterion_2_fecundity(report_criterion):
    (f1, f2), dt = timed(lambda: (fecundity(L1).fecundity, fecundity(L2).fecundity))
    ok = abs(f1 - 8.039) <= 1e-3 and abs(f2 - 16.132) <= 1e-3 and dt < 1.0
    assert report_criterion(2, ok, f"F(L1)={f1:.6f} (8.039+-0.001), F(L2)={f2:.6f} (16.132+-0.001), {dt:.3f}s < 1s")


def test_criterion_3_census_l1(report_criterion):
    t = time.perf_counter()
    a = census_rigid(2, L1, "sorted", threads=1)
    b = census_rigid(2, L1, "balanced", (19, 19, 7), threads=1)
    dt = time.perf_counter() - t
    least = min(len(h.factors) for h in a.hits)
    minimal = sorted(h.product for h in a.hits if len(h.factors) == least)
    ok = (
        a.count == 246
        and a.products == b.products
        and minimal == sorted(f.value for f in fixtures.C2_L1_MINIMAL)
        and dt < 300
    )
    assert report_criterion(
        3, ok,
        f"#C(2,L1)={a.count} (246), sorted == balanced(19,19,7): {a.products == b.products}, "
        f"{len(minimal)} minimal {least}-prime hits match, {dt:.1f}s single-threaded < 300s",
    )


def test_criterion_4_pinch(report_criterion):
    n = fixtures.PINCH.factored
    verdict = check_order(n, 2).verdict
    dt = min(timed(check_order, n, 2)[1] for _ in range(20))
    ok = verdict is Verdict.RIGID and dt < 1e-3
    assert report_criterion(4, ok, f"Pinch number -> {verdict.value} of order 2, {dt * 1e3:.3f}ms < 1ms")


def test_criterion_5_fourfold(report_criterion):
    rows, dt = timed(single_block_probe, 2, L2, "sorted", (20, 20, 18), threads=1)
    productive = [r for r in rows if r.hit_count]
    found = sorted(h.product for r in productive for h in r.hits)
    ok = len(rows) == 18 and len(productive) == 4 and found == sorted(f.value for f in fixtures.C2_L2_FOUR) and dt < 60
    assert report_criterion(
        5, ok,
        f"{len(productive)} of {len(rows)} sweep primes productive {[r.d for r in productive]}, "
        f"numbers match displayed: {found == sorted(f.value for f in fixtures.C2_L2_FOUR)}, {dt:.1f}s < 60s",
    )


def test_criterion_6_smallest_p0(report_criterion):
    p0, dt = timed(smallest_valid_p0, L2)
    validate(L2, 1153)
    with pytest.raises(GcdConditionFailed):
        validate(L2, 37)
    ok = p0 == 1153 and dt < 1.0
    assert report_criterion(6, ok, f"smallest p0={p0} (1153) in {dt:.3f}s; validate(L2,1153) ok; validate(L2,37) -> gcd-condition")


def test_criterion_7_nonrigid_verify_only(report_criterion, capsys):
    t = time.perf_counter()
    code = main(["--no-record", "search-nonrigid", "--l0", fixtures.L2.factorization, "--p0", "1153", "--verify-only"])
    dt = time.perf_counter() - t
    out = capsys.readouterr().out
    ok = code == 0 and dt < 1.0 and fixtures.NONRIGID_SMALLEST.decimal in out and fixtures.NONRIGID_LARGEST.decimal in out
    assert report_criterion(7, ok, f"--verify-only: both displayed elements non-rigid order-2 Carmichael, {dt:.3f}s < 1s "
                            "(full census: run with --runslow)")


@pytest.mark.slow
def test_criterion_7_nonrigid_full_census(report_criterion):
    threads = int(os.environ.get("CARMICHAEL_THREADS", os.cpu_count() or 1))
    (res, hits), dt = timed(search_nonrigid, validate(L2, 1153), "qr5", threads=threads)
    ok = (
        len(hits) == 53
        and hits[0].n == fixtures.NONRIGID_SMALLEST.value
        and hits[-1].n == fixtures.NONRIGID_LARGEST.value
        and dt < 4 * 3600
    )
    assert report_criterion(7, ok, f"full census #C(2,L2,1153)={len(hits)} (53), smallest/largest match, "
                            f"{dt:.0f}s on {threads} thread(s) < 4h")


def test_criterion_8_oracle_agreement(report_criterion):
    t = time.perf_counter()
    exhaustive = exhaustive_order1(10**5)
    korselt = [n for n in range(4, 10**5 + 1) if not is_prime(n) and check_order(factor(n), 1).is_carmichael]
    census_ok = exhaustive == list(fixtures.CLASSIC_ORDER1_BELOW_1E5) == korselt
    disagreements = []
    cases = 0
    numbers = [f.factored for f in fixtures.ALL] + [factor(n) for n in (561, 1105, 41041)]
    for n in numbers:
        for m in (1, 2):
            rep = probe_all(n, m, trials=100, seed=2024)
            cases += 1
            if rep.all_consistent != check_order(n, m).is_carmichael:
                disagreements.append((n.value, m))
    dt = time.perf_counter() - t
    ok = census_ok and not disagreements
    assert report_criterion(
        8, ok,
        f"exhaustive order-1 census to 1e5 = 16 classic = korselt census: {census_ok}; "
        f"{cases} (number, m) cases with >=100 trials per ring, {len(disagreements)} disagreements, {dt:.1f}s",
    )


def test_criterion_9_property_suites(report_criterion):
    lemma_ok = all(
        binomial_lemma_check(f.factored, 2) and min(f.factored.primes) > 2 for f in fixtures.CARMICHAEL
    )
    mismatches = partition_diffs = 0
    instances = random_instances(200)
    for primes, L, t in instances:
        assert len(primes) <= 22 and L < 10**6
        want = brute_masks(primes, L, t, 2)
        products = []
        for strategy in ("sorted", "balanced", "qr5"):
            res = enumerate_hits(SubsetProductInstance.build(primes, L, t, strategy))
            mismatches += sorted(h.subset for h in res.hits) != want
            products.append(res.products)
        partition_diffs += not (products[0] == products[1] == products[2])
    small_rigid = 0
    for m, L in ((1, 120), (1, 5040), (2, 55440), (2, 360360)):
        for h in census_rigid(m, factor(L)).hits:
            small_rigid += len(h.factors) < 3
    for h in census_rigid(2, L1).hits:
        small_rigid += len(h.factors) < 3
    ok = lemma_ok and mismatches == 0 and partition_diffs == 0 and small_rigid == 0
    assert report_criterion(
        9, ok,
        f"lemma checks on {len(fixtures.CARMICHAEL)} fixtures: {lemma_ok}; {len(instances)} random instances: "
        f"{mismatches} brute-force mismatches, {partition_diffs} partition differences; "
        f"rigid hits with < 3 primes: {small_rigid}",
    )
