"""Seeded random subset-product instances shared by the MITM suites."""
import random

import numpy as np

from carmichael.arith import factor, primes_up_to
from carmichael.pool import prime_pool

SMALL_PRIMES = primes_up_to(5000)


def subset_residues_reference(primes, L):
    """Residue of every subset product, indexed by bitmask (no compiled code)."""
    arr = np.array([1 % L], dtype=np.int64)
    for p in primes:
        arr = np.concatenate([arr, arr * (p % L) % L])
    return arr


def brute_masks(primes, L, target, min_size):
    res = subset_residues_reference(primes, L)
    masks = np.nonzero(res == target % L)[0]
    return sorted(int(m) for m in masks if m and int(m).bit_count() >= min_size)


def random_instances(count=200, seed=20240601, max_primes=22):
    """Mix of pool-derived instances (target 1) and arbitrary coprime primes."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        if rng.random() < 0.6:
            L = 1
            for p, cap in ((2, 6), (3, 4), (5, 2), (7, 2), (11, 1), (13, 1), (17, 1), (19, 1)):
                e = rng.randint(0, cap)
                if L * p**e < 10**6:
                    L *= p**e
            pool = list(prime_pool(rng.choice([1, 2]), factor(L)).primes)
            if len(pool) < 3:
                continue
            primes = sorted(rng.sample(pool, min(len(pool), rng.randint(3, max_primes))))
            target = 1
        else:
            L = rng.randrange(3, 10**6)
            cands = [p for p in SMALL_PRIMES if L % p]
            primes = sorted(rng.sample(cands, rng.randint(3, max_primes)))
            while True:
                target = rng.randrange(1, L)
                if np.gcd(target, L) == 1:
                    break
        out.append((tuple(primes), L, target))
    return out
