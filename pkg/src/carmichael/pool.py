"""Prime pools P(m, L) and the fecundity heuristic.

``P(m, L)`` holds the primes ``p`` not dividing ``L`` with ``p**r - 1 | L``
for every ``1 <= r <= m``.  Any squarefree product of pool primes that is
``1 mod L`` is a rigid Carmichael number of order ``m``.  About
``2**#P / phi(L)`` such products are expected; the log2 of that estimate is
the fecundity.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .arith import (
    MAX_MACHINE_MODULUS,
    ArithmeticDomainError,
    FactoredNat,
    divisors,
    format_factorization,
    is_prime,
    lcm,
    parse_factorization,
    primes_up_to,
)


class PoolError(ArithmeticDomainError):
    pass


def _check_modulus(L: FactoredNat) -> None:
    if L.value < 1:
        raise PoolError("modulus must be >= 1")
    if L.value >= MAX_MACHINE_MODULUS:
        raise PoolError(f"modulus {L.value} is not below 2**63")


@dataclass(frozen=True)
class PrimePool:
    order: int
    modulus: FactoredNat
    primes: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)


@dataclass(frozen=True)
class FecundityRecord:
    L: FactoredNat
    pool_size: int
    phi_log2: float
    fecundity: float
    order: int = 2

    @property
    def expected_count_log2(self) -> float:
        return self.fecundity

    def to_json(self) -> str:
        return json.dumps(
            {
                "L": str(self.L.value),
                "factors": format_factorization(self.L),
                "order": self.order,
                "pool_size": self.pool_size,
                "phi_log2": self.phi_log2,
                "fecundity": self.fecundity,
                "expected_count_log2": self.expected_count_log2,
            }
        )

    @classmethod
    def from_json(cls, line: str) -> "FecundityRecord":
        obj = json.loads(line)
        return cls(
            L=parse_factorization(obj["factors"]),
            pool_size=obj["pool_size"],
            phi_log2=obj["phi_log2"],
            fecundity=obj["fecundity"],
            order=obj["order"],
        )


def pool_conditions(p: int, m: int, L: int) -> bool:
    """Direct membership test for ``p`` (assumed prime) in ``P(m, L)``."""
    return L % p != 0 and all(L % (p**r - 1) == 0 for r in range(1, m + 1))


def prime_pool(m: int, L: FactoredNat) -> PrimePool:
    if m < 1:
        raise PoolError("order must be positive")
    _check_modulus(L)
    Lv = L.value
    found = []
    for d in divisors(L):
        p = d + 1
        if not is_prime(p) or Lv % p == 0:
            continue
        if all(Lv % (p**r - 1) == 0 for r in range(2, m + 1)):
            found.append(p)
    return PrimePool(m, L, tuple(sorted(found)))


def _phi_log2(L: FactoredNat) -> float:
    return sum((e - 1) * math.log2(p) + math.log2(p - 1) for p, e in L.factors)


def fecundity(L: FactoredNat, m: int = 2) -> FecundityRecord:
    pool = prime_pool(m, L)
    phi_log2 = _phi_log2(L)
    return FecundityRecord(L, len(pool), phi_log2, len(pool) - phi_log2, m)


def expected_count(L: FactoredNat, m: int = 2) -> float:
    """log2 of the heuristic count ``2**#P(m,L) / phi(L)``."""
    return fecundity(L, m).fecundity


class ScanTooLarge(PoolError):
    pass


def _enumerate_moduli(primes: list[int], caps: list[int], bound: int, ceiling: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []

    def rec(i: int, value: int, exps: list[int]) -> None:
        if i == len(primes):
            out.append(tuple(exps))
            if len(out) > ceiling:
                raise ScanTooLarge(
                    f"more than {ceiling} moduli below {bound}; tighten --cap or --bound"
                )
            return
        p = primes[i]
        v = value
        for e in range(caps[i] + 1):
            if v > bound:
                break
            exps.append(e)
            rec(i + 1, v, exps)
            exps.pop()
            v *= p

    rec(0, 1, [])
    return out


def fecundity_scan(
    prime_bound: int,
    exponent_caps: dict[int, int] | None,
    L_bound: int,
    m: int = 2,
    top_k: int = 20,
    default_cap: int = 1,
    ceiling: int = 2_000_000,
) -> list[FecundityRecord]:
    """Rank every ``L = prod p**e`` (``p <= prime_bound``, ``e <= cap``, ``L <= L_bound``).

    Pools are computed against a shared candidate list (primes ``p`` whose
    ``p**r - 1`` all divide the largest admissible modulus), then filtered
    per modulus in vectorized form.
    """
    if prime_bound > 100:
        raise PoolError("prime_bound above 100 is refused")
    if L_bound >= MAX_MACHINE_MODULUS:
        raise PoolError("L_bound must be below 2**63")
    if top_k <= 0:
        return []
    caps = dict(exponent_caps or {})
    primes = primes_up_to(prime_bound)
    cap_list = [caps.get(p, default_cap) for p in primes]
    for i, p in enumerate(primes):
        # no point allowing p**e beyond the bound
        while cap_list[i] > 0 and p ** cap_list[i] > L_bound:
            cap_list[i] -= 1
    exps = _enumerate_moduli(primes, cap_list, L_bound, ceiling)

    top = FactoredNat.from_factors(list(zip(primes, cap_list)), check=False)
    cand, need = [], []
    for d in divisors(top):
        p = d + 1
        if d > L_bound or not is_prime(p):
            continue
        req = 1
        for r in range(1, m + 1):
            req = lcm(req, p**r - 1)
        if top.value % req == 0 and req <= L_bound:
            cand.append(p)
            need.append(req)
    order = np.argsort(cand)
    cand_arr = np.array(cand, dtype=np.int64)[order]
    need_arr = np.array(need, dtype=np.int64)[order]

    E = np.array(exps, dtype=np.int64).reshape(len(exps), len(primes))
    logp = np.log2(np.array(primes, dtype=np.float64))
    logpm1 = np.log2(np.array(primes, dtype=np.float64) - 1.0)
    phi_log2 = ((E - 1).clip(min=0) * logp + (E > 0) * logpm1).sum(axis=1)
    values = np.array([math.prod(p**e for p, e in zip(primes, row)) for row in exps], dtype=np.int64)

    sizes = np.zeros(len(exps), dtype=np.int64)
    step = max(1, 4_000_000 // max(1, len(cand_arr)))
    for lo in range(0, len(values), step):
        v = values[lo : lo + step, None]
        ok = (v % need_arr[None, :] == 0) & (v % cand_arr[None, :] != 0)
        sizes[lo : lo + step] = ok.sum(axis=1)
    fec = sizes - phi_log2

    ranked = sorted(range(len(exps)), key=lambda k: (-fec[k], int(values[k])))[:top_k]
    out = []
    for k in ranked:
        L = FactoredNat.from_factors([(p, int(e)) for p, e in zip(primes, exps[k]) if e], check=False)
        out.append(FecundityRecord(L, int(sizes[k]), float(phi_log2[k]), float(fec[k]), m))
    return out
