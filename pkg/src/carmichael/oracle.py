"""Direct test of whether ``x -> x**n`` is additive on small Z/nZ-algebras.

This is deliberately independent of :mod:`carmichael.korselt`: it never
looks at congruences modulo ``p**r - 1``.  It raises random elements of
finite fields and of quotient rings ``(Z/nZ)[x]/(f)`` to the n-th power
(full exponent, no reduction) and compares ``(x+y)**n`` with
``x**n + y**n``.  Multiplicativity and ``1**n = 1`` hold in any commutative
ring, so additivity is all that needs probing.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

from .arith import ArithmeticDomainError, FactoredNat, is_prime

Poly = tuple[int, ...]  # coefficients, constant term first


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mulmod(a: Poly, b: Poly, f: Poly, N: int) -> Poly:
    """``a*b mod (f, N)`` for monic ``f``; inputs have ``len == deg f``."""
    d = len(f) - 1
    prod = [0] * (2 * d - 1 if d else 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    for k in range(len(prod) - 1, d - 1, -1):
        c = prod[k] % N
        if c:
            for j in range(d):
                prod[k - d + j] -= c * f[j]
    return tuple(c % N for c in prod[:d]) if d else ()


def _pow_deg2(a0: int, a1: int, e: int, f0: int, f1: int, N: int) -> Poly:
    # x**2 = -f1*x - f0
    r0, r1 = 1 % N, 0
    for bit in bin(e)[2:]:
        s = r1 * r1 % N
        r0, r1 = (r0 * r0 - s * f0) % N, (2 * r0 * r1 - s * f1) % N
        if bit == "1":
            s = r1 * a1 % N
            r0, r1 = (r0 * a0 - s * f0) % N, (r0 * a1 + r1 * a0 - s * f1) % N
    return (r0, r1)


def poly_pow(a: Poly, e: int, f: Poly, N: int) -> Poly:
    d = len(f) - 1
    if d == 1:
        return (pow(a[0], e, N),)
    if d == 2:
        return _pow_deg2(a[0], a[1], e, f[0], f[1], N)
    result: Poly = tuple([1 % N] + [0] * (d - 1)) if d else ()
    for bit in bin(e)[2:]:
        result = poly_mulmod(result, result, f, N)
        if bit == "1":
            result = poly_mulmod(result, a, f, N)
    return result


def _poly_divmod_p(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    inv = pow(b[-1], -1, p)
    q = [0] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b) and a:
        c = a[-1] * inv % p
        shift = len(a) - len(b)
        q[shift] = c
        for j, bj in enumerate(b):
            a[shift + j] = (a[shift + j] - c * bj) % p
        _trim(a)
    return q, a


def _poly_gcd_p(a: list[int], b: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    while b:
        _, r = _poly_divmod_p(a, b, p)
        a, b = b, r
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _x_power_minus_x(f: Poly, p: int, k: int) -> list[int]:
    # x**(p**k) - x reduced mod f, by k successive p-th powers
    d = len(f) - 1
    x = tuple([0, 1] + [0] * (d - 2)) if d >= 2 else (0 % p,)
    if d == 1:
        x = ((-f[0]) % p,)
    t = x
    for _ in range(k):
        t = poly_pow(t, p, f, p)
    out = list(t)
    if d >= 2:
        out[1] = (out[1] - 1) % p
    else:
        out[0] = (out[0] - x[0]) % p
    return out


def is_irreducible(f: Poly, p: int) -> bool:
    """Rabin's test for a monic polynomial over the field with ``p`` elements."""
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    if any(_trim(_x_power_minus_x(f, p, d))):
        return False
    for q in {q for q in range(2, d + 1) if d % q == 0 and is_prime(q)}:
        g = _poly_gcd_p(list(f), _x_power_minus_x(f, p, d // q), p)
        if len(g) > 1:
            return False
    return True


@dataclass(frozen=True)
class FiniteField:
    p: int
    r: int
    modulus_poly: Poly

    @property
    def size(self) -> int:
        return self.p**self.r

    def describe(self) -> str:
        return f"GF({self.p}^{self.r}) mod {list(self.modulus_poly)}"

    def random_element(self, rng: random.Random) -> Poly:
        return tuple(rng.randrange(self.p) for _ in range(self.r))

    def add(self, a: Poly, b: Poly) -> Poly:
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def pow(self, a: Poly, e: int) -> Poly:
        return poly_pow(a, e, self.modulus_poly, self.p)


def make_field(p: int, r: int, seed: int = 0) -> FiniteField:
    if not is_prime(p):
        raise ArithmeticDomainError(f"{p} is not prime")
    if r < 1:
        raise ArithmeticDomainError("degree must be positive")
    if r == 1:
        return FiniteField(p, 1, (0, 1))
    rng = random.Random(seed * 1_000_003 + p * 131 + r)
    while True:
        f = tuple(rng.randrange(p) for _ in range(r)) + (1,)
        if f[0] and is_irreducible(f, p):
            return FiniteField(p, r, f)


@dataclass(frozen=True)
class QuotientRing:
    """``(Z/nZ)[x]/(f)`` for monic ``f`` of degree ``d >= 1``."""

    n: int
    f: Poly

    def __post_init__(self):
        if self.n < 2:
            raise ArithmeticDomainError("ring characteristic must be >= 2")
        if len(self.f) < 2 or self.f[-1] % self.n != 1:
            raise ArithmeticDomainError("f must be monic of degree >= 1")
        object.__setattr__(self, "f", tuple(c % self.n for c in self.f))

    @property
    def degree(self) -> int:
        return len(self.f) - 1

    def describe(self) -> str:
        return f"(Z/{self.n}Z)[x]/({list(self.f)})"

    def random_element(self, rng: random.Random) -> Poly:
        return tuple(rng.randrange(self.n) for _ in range(self.degree))

    def add(self, a: Poly, b: Poly) -> Poly:
        return tuple((x + y) % self.n for x, y in zip(a, b))

    def pow(self, a: Poly, e: int) -> Poly:
        return poly_pow(a, e, self.f, self.n)


CONSISTENT = "ConsistentWithEndomorphism"
REFUTED = "RefutedWithWitness"


@dataclass
class OracleVerdict:
    subject: str
    n: int
    trials: int
    failures: int
    seed: int
    witness: tuple[Poly, Poly] | None = None
    orbit_failures: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return CONSISTENT if self.failures == 0 and self.orbit_failures == 0 else REFUTED

    @property
    def consistent(self) -> bool:
        return self.verdict == CONSISTENT

    def to_json(self) -> str:
        return json.dumps(
            {
                "subject": self.subject,
                "n": str(self.n),
                "trials": self.trials,
                "failures": self.failures,
                "orbit_failures": self.orbit_failures,
                "seed": self.seed,
                "verdict": self.verdict,
                "witness": None if self.witness is None else [[str(c) for c in w] for w in self.witness],
                **self.extra,
            }
        )


def _probe(ring, n: int, trials: int, seed: int, rng: random.Random) -> OracleVerdict:
    failures = 0
    witness = None
    for _ in range(trials):
        x = ring.random_element(rng)
        y = ring.random_element(rng)
        if ring.pow(ring.add(x, y), n) != ring.add(ring.pow(x, n), ring.pow(y, n)):
            failures += 1
            if witness is None:
                witness = (x, y)
    return OracleVerdict(ring.describe(), n, trials, failures, seed, witness)


def endo_probe_field(F: FiniteField, n: int, trials: int = 100, seed: int = 0) -> OracleVerdict:
    """Sample additivity of ``x -> x**n`` on ``F`` (a Z/nZ-algebra since ``p | n``).

    Also checks, per sampled ``x``, that ``x**n`` is one of ``x**(p**i)``.
    """
    if n % F.p:
        raise ArithmeticDomainError(f"characteristic {F.p} does not divide n")
    rng = random.Random(seed)
    verdict = _probe(F, n, trials, seed, rng)
    orbit_rng = random.Random(seed + 1)
    for _ in range(min(trials, 32)):
        x = F.random_element(orbit_rng)
        xn = F.pow(x, n)
        orbit = [x]
        for _ in range(F.r - 1):
            orbit.append(F.pow(orbit[-1], F.p))
        if xn not in orbit:
            verdict.orbit_failures += 1
    return verdict


def endo_probe_quotient(R: QuotientRing, n: int, trials: int = 100, seed: int = 0) -> OracleVerdict:
    return _probe(R, n, trials, seed, random.Random(seed))


def recheck(verdict: OracleVerdict, ring) -> bool:
    """True iff the stored witness still refutes additivity."""
    if verdict.witness is None:
        return False
    x, y = verdict.witness
    n = verdict.n
    return ring.pow(ring.add(x, y), n) != ring.add(ring.pow(x, n), ring.pow(y, n))


def exhaustive_order1(limit: int, max_limit: int = 10**5) -> list[int]:
    """Composite ``n <= limit`` with ``a**n = a (mod n)`` for every ``a < n``."""
    if limit > max_limit:
        raise ArithmeticDomainError(f"limit above {max_limit}; raise max_limit explicitly")
    out = []
    for n in range(4, limit + 1):
        if is_prime(n):
            continue
        if all(pow(a, n, n) == a for a in range(2, n)):
            out.append(n)
    return out


def binomial_lemma_check(n: FactoredNat | int, m: int) -> bool:
    v = int(n)
    return all(math.comb(v, r) % v == 0 for r in range(1, m + 1))


def quotient_family(n: FactoredNat, m: int, count: int = 20, seed: int = 0) -> list[QuotientRing]:
    """Monogenic test rings of degree <= m over Z/nZ.

    Always includes ``x**d`` for each ``d <= m`` and, for ``m >= 2``,
    ``x**2 - p`` for the smallest prime ``p | n``; the rest are random monic.
    """
    v = n.value
    rings = [QuotientRing(v, tuple([0] * d + [1])) for d in range(1, m + 1)]
    if m >= 2:
        rings.append(QuotientRing(v, (-n.primes[0] % v, 0, 1)))
    rng = random.Random(seed)
    while len(rings) < count:
        d = rng.randint(1, m)
        rings.append(QuotientRing(v, tuple(rng.randrange(v) for _ in range(d)) + (1,)))
    return rings


@dataclass
class AgreementReport:
    n: FactoredNat
    order: int
    field_verdicts: list[OracleVerdict]
    quotient_verdicts: list[OracleVerdict]

    @property
    def all_consistent(self) -> bool:
        return all(v.consistent for v in self.field_verdicts + self.quotient_verdicts)


def probe_all(
    n: FactoredNat,
    m: int,
    trials: int = 100,
    seed: int = 0,
    quotient_count: int = 20,
) -> AgreementReport:
    """Field probes for every ``p | n``, ``r <= m`` plus a family of quotient rings."""
    fields = []
    for p in n.primes:
        for r in range(1, m + 1):
            F = make_field(p, r, seed)
            fields.append(endo_probe_field(F, n.value, trials, seed + 7 * p + r))
    quots = [
        endo_probe_quotient(R, n.value, trials, seed + 1000 + i)
        for i, R in enumerate(quotient_family(n, m, quotient_count, seed))
    ]
    return AgreementReport(n, m, fields, quots)
