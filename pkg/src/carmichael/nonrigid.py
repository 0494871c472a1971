"""Non-rigid order-2 Carmichael numbers of the form ``p0 * n0``.

``n0`` is a squarefree product of primes from ``P(2, L0)`` with
``n0 = 1 (mod p0**2 - 1)`` and ``p0 * n0 = 1 (mod L0)``.  Then ``n`` is
congruent to 1 modulo ``p**2 - 1`` for every other prime factor but to
``p0`` modulo ``p0**2 - 1``, so the n-th power map is Frobenius, not the
identity, on the field with ``p0**2`` elements.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .arith import (
    MAX_MACHINE_MODULUS,
    ArithmeticDomainError,
    CRTInconsistentError,
    FactoredNat,
    Residue,
    crt_combine,
    factor,
    format_factorization,
    is_prime,
    lcm,
    mod_inverse,
    parse_factorization,
)
from .korselt import Verdict, check_order, frobenius_exponent
from .mitm import (
    CensusResult,
    InternalConsistencyError,
    SubsetProductInstance,
    enumerate_hits,
)
from .pool import prime_pool


class NonRigidValidationError(ArithmeticDomainError):
    condition = "invalid"


class P0NotPrime(NonRigidValidationError):
    condition = "p0-not-prime"


class P0DividesL0(NonRigidValidationError):
    condition = "p0-divides-L0"


class GcdConditionFailed(NonRigidValidationError):
    condition = "gcd-condition"


class ModulusTooLarge(NonRigidValidationError):
    condition = "modulus-too-large"


class BoundExceeded(ArithmeticDomainError):
    pass


@dataclass(frozen=True)
class NonRigidInstance:
    L0: FactoredNat
    p0: int
    L: int
    target: Residue


def validate(L0: FactoredNat, p0: int) -> NonRigidInstance:
    if not is_prime(p0):
        raise P0NotPrime(f"p0 = {p0} is not prime")
    if L0.value % p0 == 0:
        raise P0DividesL0(f"p0 = {p0} divides L0")
    q = p0 * p0 - 1
    g = math.gcd(L0.value, q)
    if (p0 - 1) % g:
        raise GcdConditionFailed(f"gcd(L0, p0^2-1) = {g} does not divide p0-1 = {p0 - 1}")
    L = lcm(L0.value, q)
    if L >= MAX_MACHINE_MODULUS:
        raise ModulusTooLarge(f"lcm(L0, p0^2-1) = {L} is not below 2**63")
    try:
        t = crt_combine(Residue(mod_inverse(p0, L0.value), L0.value), Residue(1 % q, q))
    except CRTInconsistentError as exc:  # excluded by the gcd condition
        raise GcdConditionFailed(str(exc)) from exc
    return NonRigidInstance(L0, p0, L, t)


def smallest_valid_p0(L0: FactoredNat, search_bound: int = 10**7) -> int:
    p = 2
    while p <= search_bound:
        if is_prime(p):
            try:
                validate(L0, p)
                return p
            except (P0DividesL0, GcdConditionFailed):
                pass
        p += 1
    raise BoundExceeded(f"no valid p0 up to {search_bound}")


@dataclass(frozen=True)
class NonRigidHit:
    n: int
    n0: int
    p0: int
    factors: tuple[int, ...]

    def to_json(self) -> str:
        return json.dumps(
            {"n": str(self.n), "n0": str(self.n0), "p0": str(self.p0),
             "factors": "*".join(map(str, self.factors)), "rigid": False}
        )

    @classmethod
    def from_json(cls, line: str) -> "NonRigidHit":
        obj = json.loads(line)
        return cls(int(obj["n"]), int(obj["n0"]), int(obj["p0"]),
                   tuple(int(p) for p in obj["factors"].split("*")))


def usable_primes(inst: NonRigidInstance) -> tuple[int, ...]:
    """Pool primes that can occur in ``n0``.

    A prime dividing ``p0**2 - 1`` would break ``n0 = 1 (mod p0**2 - 1)``,
    and ``p0`` itself would make ``n`` non-squarefree.
    """
    q = inst.p0 * inst.p0 - 1
    return tuple(p for p in prime_pool(2, inst.L0).primes if q % p and p != inst.p0)


def _instance_for(inst: NonRigidInstance, strategy: str, sizes) -> SubsetProductInstance:
    return SubsetProductInstance.build(usable_primes(inst), inst.L, inst.target.value, strategy, sizes)


def check_nonrigid(n: FactoredNat, p0: int) -> None:
    """Raise unless ``n`` is order-2 Carmichael with Frobenius exponent 1 at ``p0``."""
    report = check_order(n, 2)
    if report.verdict is not Verdict.CARMICHAEL:
        raise InternalConsistencyError(f"{n.value} checked as {report.verdict.value}")
    if frobenius_exponent(n.value, p0, 2) != 1:
        raise InternalConsistencyError(f"{n.value} is not congruent to p0 modulo p0^2-1")


def search_nonrigid(
    inst: NonRigidInstance,
    strategy: str = "sorted",
    sizes: tuple[int, int, int] | None = None,
    **kwargs,
) -> tuple[CensusResult, list[NonRigidHit]]:
    """Enumerate ``C(2, L0, p0)``; the census counts the ``n0`` found."""
    sp = _instance_for(inst, strategy, sizes)
    phi_log2 = math.log2(math.prod(p ** (e - 1) * (p - 1) for p, e in _factor_L(inst).factors))
    # n0 may be a single prime: p0*q is still composite
    result = enumerate_hits(sp, min_size=1, expected_log2=len(sp.primes) - phi_log2, **kwargs)
    out = []
    for hit in result.hits:
        factors = tuple(sorted(hit.factors + (inst.p0,)))
        n = FactoredNat.from_primes(factors)
        check_nonrigid(n, inst.p0)
        out.append(NonRigidHit(n.value, hit.product, inst.p0, factors))
    out.sort(key=lambda h: h.n)
    result.instance.update({"p0": str(inst.p0), "L0": format_factorization(inst.L0)})
    return result, out


def _factor_L(inst: NonRigidInstance) -> FactoredNat:
    counts = dict(inst.L0.factors)
    q = inst.p0 * inst.p0 - 1
    for p, e in factor(q).factors:
        counts[p] = max(counts.get(p, 0), e)
    return FactoredNat.from_factors(counts, check=False)


def verify_listed(factorization: str, p0: int) -> FactoredNat:
    """Fast path: confirm a displayed element without running the census."""
    n = parse_factorization(factorization)
    check_nonrigid(n, p0)
    return n
