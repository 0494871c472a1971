"""Integer primitives: primality, factorization, divisors, totient, CRT.

Everything here works on plain Python ints.  ``FactoredNat`` is the
currency passed between the rest of the package.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import product as _cartesian
from typing import Iterator, Sequence

MAX_MACHINE_MODULUS = 1 << 63

DEFAULT_TRIAL_BOUND = 10**6
DEFAULT_RHO_ITERATIONS = 10**7
DEFAULT_MR_ROUNDS = 64

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)

# (bound, bases): Miller-Rabin with `bases` is exact for n < bound.
_MR_BASE_TABLE = (
    (2047, (2,)),
    (1373653, (2, 3)),
    (25326001, (2, 3, 5)),
    (3215031751, (2, 3, 5, 7)),
    (2152302898747, (2, 3, 5, 7, 11)),
    (3474749660383, (2, 3, 5, 7, 11, 13)),
    (341550071728321, (2, 3, 5, 7, 11, 13, 17)),
    (1 << 64, (2, 325, 9375, 28178, 450775, 9780504, 1795265022)),
)


class ArithmeticDomainError(ValueError):
    pass


class NotInvertibleError(ArithmeticDomainError):
    def __init__(self, a: int, m: int, g: int):
        super().__init__(f"{a} is not invertible modulo {m} (gcd = {g})")
        self.gcd = g


class CRTInconsistentError(ArithmeticDomainError):
    def __init__(self, r1: "Residue", r2: "Residue", g: int):
        super().__init__(
            f"congruences {r1.value} mod {r1.modulus} and {r2.value} mod {r2.modulus} "
            f"disagree modulo gcd {g}"
        )
        self.gcd = g


class FactorizationIncomplete(ArithmeticDomainError):
    """Raised when the effort ceiling is hit; ``partial`` holds what was found.

    ``partial`` lists proven prime factors; ``cofactor`` is the unfactored rest.
    """

    def __init__(self, n: int, partial: list[tuple[int, int]], cofactor: int):
        super().__init__(f"factorization of {n} incomplete; unfactored cofactor {cofactor}")
        self.n = n
        self.partial = partial
        self.cofactor = cofactor


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)


def lcm(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return a // math.gcd(a, b) * b


def isqrt(n: int) -> tuple[int, bool]:
    """Return ``(floor(sqrt(n)), exact)``."""
    if n < 0:
        raise ArithmeticDomainError("isqrt of a negative number")
    s = math.isqrt(n)
    return s, s * s == n


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    """Left-to-right square-and-multiply."""
    if modulus < 1:
        raise ArithmeticDomainError("modulus must be >= 1")
    if exponent < 0:
        raise ArithmeticDomainError("negative exponent")
    if modulus == 1:
        return 0
    base %= modulus
    result = 1
    for bit in bin(exponent)[2:]:
        result = result * result % modulus
        if bit == "1":
            result = result * base % modulus
    return result


def _mr_round(n: int, d: int, s: int, a: int) -> bool:
    # True when n is a strong probable prime to base a.
    a %= n
    if a == 0:
        return True
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int, rounds: int = DEFAULT_MR_ROUNDS, rng: random.Random | None = None) -> bool:
    """Miller-Rabin primality test.

    Deterministic for ``n < 2**64`` (fixed witness sets).  Above that,
    ``rounds`` random bases are used, so a True answer is probabilistic
    with error below ``4**-rounds``.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < 53 * 53:
        return True
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for bound, bases in _MR_BASE_TABLE:
        if n < bound:
            return all(_mr_round(n, d, s, a) for a in bases)
    rng = rng or random.Random(n)
    if not _mr_round(n, d, s, 2):
        return False
    return all(_mr_round(n, d, s, rng.randrange(2, n - 1)) for _ in range(rounds))


def primes_up_to(limit: int) -> list[int]:
    if limit < 2:
        return []
    sieve = bytearray([1]) * (limit + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytes(len(range(i * i, limit + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]


_trial_cache: dict[int, list[int]] = {}


def _trial_primes(bound: int) -> list[int]:
    if bound not in _trial_cache:
        _trial_cache[bound] = primes_up_to(bound)
    return _trial_cache[bound]


@dataclass(frozen=True)
class Residue:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ArithmeticDomainError("residue modulus must be >= 1")
        if not 0 <= self.value < self.modulus:
            object.__setattr__(self, "value", self.value % self.modulus)

    @classmethod
    def machine(cls, value: int, modulus: int) -> "Residue":
        """A residue whose modulus must fit the 63-bit search engine."""
        if modulus >= MAX_MACHINE_MODULUS:
            raise ArithmeticDomainError(f"modulus {modulus} is not below 2**63")
        return cls(value % modulus, modulus)


@dataclass(frozen=True)
class FactoredNat:
    """A natural number together with its prime factorization.

    ``factors`` is a tuple of ``(prime, exponent)`` with strictly increasing
    primes.  Construct through :func:`factor`, :meth:`from_factors` or
    :func:`parse_factorization`; the raw constructor trusts its input.
    """

    value: int
    factors: tuple[tuple[int, int], ...]

    @classmethod
    def from_factors(cls, pairs: Sequence[tuple[int, int]] | dict[int, int], check: bool = True) -> "FactoredNat":
        items = sorted(pairs.items()) if isinstance(pairs, dict) else list(pairs)
        items = [(int(p), int(e)) for p, e in items if e != 0]
        if check:
            prev = 1
            for p, e in items:
                if p <= prev:
                    raise ArithmeticDomainError("primes must be strictly increasing")
                if e < 1:
                    raise ArithmeticDomainError(f"exponent {e} of {p} is not positive")
                if not is_prime(p):
                    raise ArithmeticDomainError(f"{p} is not prime")
                prev = p
        value = 1
        for p, e in items:
            value *= p**e
        return cls(value, tuple(items))

    @classmethod
    def from_primes(cls, primes: Sequence[int]) -> "FactoredNat":
        counts: dict[int, int] = {}
        for p in primes:
            counts[p] = counts.get(p, 0) + 1
        return cls.from_factors(counts)

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    @property
    def num_divisors(self) -> int:
        return math.prod(e + 1 for _, e in self.factors)

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return format_factorization(self)


def format_factorization(f: FactoredNat) -> str:
    if not f.factors:
        return "1"
    return "*".join(str(p) if e == 1 else f"{p}^{e}" for p, e in f.factors)


def parse_factorization(text: str) -> FactoredNat:
    """Parse ``p1^e1*p2^e2*...``; ``^1`` may be omitted.

    Bases must be prime and strictly increasing.
    """
    text = text.strip().replace(" ", "").replace("·", "*")
    if text == "1":
        return FactoredNat(1, ())
    pairs = []
    for term in text.split("*"):
        base, caret, exp = term.partition("^")
        if not base.isdigit() or (caret and not exp.isdigit()):
            raise ArithmeticDomainError(f"malformed factor {term!r}")
        pairs.append((int(base), int(exp) if exp else 1))
    return FactoredNat.from_factors(pairs)


def parse_nat(text: str) -> FactoredNat:
    """Accept either a decimal integer or a factorization string."""
    text = text.strip()
    if text.isdigit():
        return factor(int(text))
    return parse_factorization(text)


def _pollard_brent(n: int, rng: random.Random, budget: list[int]) -> int | None:
    # Brent's cycle-finding variant; returns a nontrivial factor or None when budget runs out.
    if n % 2 == 0:
        return 2
    while budget[0] > 0:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g, r, q = 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            budget[0] -= r
            r *= 2
            if budget[0] <= 0 and g == 1:
                return None
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    return None


def factor(
    n: int,
    trial_bound: int = DEFAULT_TRIAL_BOUND,
    rho_iterations: int = DEFAULT_RHO_ITERATIONS,
    seed: int = 0,
) -> FactoredNat:
    """Complete factorization by trial division then Pollard-Brent rho.

    Raises :class:`FactorizationIncomplete` once ``rho_iterations`` is spent.
    """
    if n < 1:
        raise ArithmeticDomainError("can only factor positive integers")
    original = n
    counts: dict[int, int] = {}
    for p in _trial_primes(trial_bound):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            counts[p] = e
    stack = [n] if n > 1 else []
    rng = random.Random(seed)
    budget = [rho_iterations]
    stuck: list[int] = []
    while stack:
        c = stack.pop()
        if is_prime(c):
            counts[c] = counts.get(c, 0) + 1
            continue
        s, exact = isqrt(c)
        if exact:
            stack.extend((s, s))
            continue
        d = _pollard_brent(c, rng, budget)
        if d is None:
            stuck.append(c)
            continue
        stack.extend((d, c // d))
    if stuck:
        raise FactorizationIncomplete(original, sorted(counts.items()), math.prod(stuck))
    return FactoredNat(original, tuple(sorted(counts.items())))


def divisors(f: FactoredNat) -> Iterator[int]:
    """Yield every divisor of ``f`` once, lazily, in mixed-radix order."""
    if not f.factors:
        yield 1
        return
    ladders = [[p**k for k in range(e + 1)] for p, e in f.factors]
    for combo in _cartesian(*ladders):
        yield math.prod(combo)


def euler_phi(f: FactoredNat) -> int:
    return math.prod(p ** (e - 1) * (p - 1) for p, e in f.factors)


def mod_inverse(a: int, m: int) -> int:
    if m < 1:
        raise ArithmeticDomainError("modulus must be >= 1")
    old_r, r = a % m, m
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    if old_r != 1 and m != 1:
        raise NotInvertibleError(a, m, old_r)
    return old_s % m


def crt_combine(r1: Residue, r2: Residue) -> Residue:
    m1, m2 = r1.modulus, r2.modulus
    g = math.gcd(m1, m2)
    if (r2.value - r1.value) % g:
        raise CRTInconsistentError(r1, r2, g)
    m2g = m2 // g
    k = (r2.value - r1.value) // g * mod_inverse(m1 // g, m2g) % m2g
    mod = m1 * m2g
    return Residue((r1.value + m1 * k) % mod, mod)


def legendre(a: int, p: int) -> int:
    """Legendre symbol for an odd prime ``p`` (0, 1 or -1)."""
    t = pow(a % p, (p - 1) // 2, p)
    return -1 if t == p - 1 else t
