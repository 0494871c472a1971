"""Order-m Carmichael test via the generalized Korselt criterion.

A composite ``n`` is a Carmichael number of order ``m`` iff it is squarefree
and, for each prime ``p | n`` and each ``1 <= r <= m``, ``n`` is congruent
to some power of ``p`` modulo ``p**r - 1``.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass

from .arith import FactoredNat, format_factorization, parse_factorization


class Verdict(str, enum.Enum):
    CARMICHAEL = "CarmichaelOfOrder"
    RIGID = "RigidCarmichaelOfOrder"
    NOT_CARMICHAEL = "NotCarmichael"
    NOT_COMPOSITE = "NotComposite"


@dataclass(frozen=True)
class FrobeniusWitness:
    prime: int
    degree: int
    exponent: int | None

    def as_dict(self) -> dict:
        return {"p": str(self.prime), "r": self.degree, "i": self.exponent}


@dataclass(frozen=True)
class KorseltReport:
    n: FactoredNat
    order: int
    squarefree: bool
    composite: bool
    witnesses: tuple[FrobeniusWitness, ...]
    verdict: Verdict

    @property
    def is_carmichael(self) -> bool:
        return self.verdict in (Verdict.CARMICHAEL, Verdict.RIGID)

    @property
    def is_rigid(self) -> bool:
        return self.verdict is Verdict.RIGID

    def failing(self) -> list[FrobeniusWitness]:
        return [w for w in self.witnesses if w.exponent is None]

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": str(self.n.value),
                "factors": format_factorization(self.n),
                "order": self.order,
                "verdict": self.verdict.value,
                "squarefree": self.squarefree,
                "composite": self.composite,
                "witnesses": [w.as_dict() for w in self.witnesses],
            }
        )

    @classmethod
    def from_json(cls, line: str) -> "KorseltReport":
        obj = json.loads(line)
        n = parse_factorization(obj["factors"])
        if str(n.value) != obj["n"]:
            raise ValueError("report value does not match its factorization")
        return cls(
            n=n,
            order=obj["order"],
            squarefree=obj["squarefree"],
            composite=obj["composite"],
            witnesses=tuple(FrobeniusWitness(int(w["p"]), w["r"], w["i"]) for w in obj["witnesses"]),
            verdict=Verdict(obj["verdict"]),
        )


def frobenius_exponent(n: int, p: int, r: int) -> int | None:
    """Least ``i`` in ``[0, r)`` with ``n = p**i (mod p**r - 1)``, else None.

    The powers of ``p`` modulo ``p**r - 1`` repeat with period exactly ``r``
    (``p**r = 1`` and ``p**i < p**r - 1`` for ``i < r``), so a search over
    ``[0, r)`` is complete.  For ``p**r - 1 == 1`` every ``n`` gives 0.
    """
    if r < 1:
        raise ValueError("degree must be positive")
    q = p**r - 1
    target = n % q
    power = 1 % q
    for i in range(r):
        if power == target:
            return i
        power = power * p % q
    return None


def check_order(n: FactoredNat, m: int) -> KorseltReport:
    if m < 1:
        raise ValueError("order must be positive")
    if n.value < 2:
        raise ValueError("check_order needs n >= 2")
    squarefree = n.is_squarefree
    composite = sum(e for _, e in n.factors) >= 2
    witnesses = tuple(
        FrobeniusWitness(p, r, frobenius_exponent(n.value, p, r))
        for p in n.primes
        for r in range(1, m + 1)
    )
    if not composite:
        verdict = Verdict.NOT_COMPOSITE
    elif not squarefree or any(w.exponent is None for w in witnesses):
        verdict = Verdict.NOT_CARMICHAEL
    elif all(w.exponent == 0 for w in witnesses):
        verdict = Verdict.RIGID
    else:
        verdict = Verdict.CARMICHAEL
    return KorseltReport(n, m, squarefree, composite, witnesses, verdict)


def is_carmichael(n: FactoredNat, m: int) -> bool:
    return check_order(n, m).is_carmichael


def is_rigid(n: FactoredNat, m: int) -> bool:
    return check_order(n, m).is_rigid


def max_order(n: FactoredNat, m_cap: int) -> int:
    """Largest ``m <= m_cap`` for which ``n`` is Carmichael of order ``m``; 0 if none."""
    # Cumulative in r, so stop at the first failing order.
    best = 0
    for m in range(1, m_cap + 1):
        if not check_order(n, m).is_carmichael:
            break
        best = m
    return best
