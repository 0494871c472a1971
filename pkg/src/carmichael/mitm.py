"""Meet-in-the-middle search for subsets of primes with a given product mod L.

The primes are split into three blocks.  ``X`` holds ``t * e**-1`` for every
subset product ``e`` of block 1, ``Y`` holds every subset product ``f`` of
block 2, and the sweep walks every subset product ``d`` of block 3 looking
up ``d * y`` in ``X``.  A match means ``d * e * f = t (mod L)``.
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernel
from .arith import (
    MAX_MACHINE_MODULUS,
    ArithmeticDomainError,
    FactoredNat,
    factor,
    format_factorization,
    legendre,
    mod_inverse,
)
from .korselt import Verdict, check_order
from .pool import fecundity, prime_pool

log = logging.getLogger(__name__)

MAX_TABLE_BITS = 30
MAX_PRIMES = 63
DEFAULT_TABLE_BITS = 20
DEFAULT_TABLE_BUDGET = 1 << 32  # bytes
# bytes per X entry (residues, sort order, hash slots, filters) and per Y entry
_X_ENTRY_BYTES = 72
_Y_ENTRY_BYTES = 8

STRATEGIES = ("sorted", "balanced", "qr5")


class SearchError(ArithmeticDomainError):
    pass


class TableBudgetExceeded(SearchError):
    pass


class CheckpointMismatch(SearchError):
    pass


class InternalConsistencyError(AssertionError):
    """A produced number failed the Korselt check it is guaranteed to pass."""


@dataclass(frozen=True)
class Partition:
    s1: tuple[int, ...]
    s2: tuple[int, ...]
    s3: tuple[int, ...]

    @property
    def sizes(self) -> tuple[int, int, int]:
        return len(self.s1), len(self.s2), len(self.s3)


def default_sizes(n: int, table_bits: int = DEFAULT_TABLE_BITS) -> tuple[int, int, int]:
    """Two largest feasible table blocks, remainder swept."""
    a = min(table_bits, (n + 1) // 2)
    b = min(table_bits, n - a)
    return a, b, n - a - b


def partition(
    primes: Sequence[int],
    strategy: str = "sorted",
    sizes: tuple[int, int, int] | None = None,
) -> Partition:
    """Split prime indices into (S1, S2, S3).

    ``sorted``: smallest ``a`` primes to S1, next ``b`` to S2, the rest to S3.
    ``balanced``: indices dealt round-robin over the blocks with room left.
    ``qr5``: quadratic residues mod 5 fill S1 and S2 first (smallest first).
    """
    n = len(primes)
    a, b, c = sizes if sizes is not None else default_sizes(n)
    if min(a, b, c) < 0 or a + b + c != n:
        raise SearchError(f"block sizes {(a, b, c)} do not cover {n} primes")
    by_value = sorted(range(n), key=lambda i: primes[i])
    if strategy == "sorted":
        blocks = [by_value[:a], by_value[a : a + b], by_value[a + b :]]
    elif strategy == "balanced":
        blocks = [[], [], []]
        room = [a, b, c]
        k = 0
        for i in range(n):
            while room[k % 3] == 0:
                k += 1
            blocks[k % 3].append(i)
            room[k % 3] -= 1
            k += 1
    elif strategy == "qr5":
        qr = [i for i in by_value if primes[i] % 5 in (1, 4)]
        rest = [i for i in by_value if primes[i] % 5 not in (1, 4)]
        table = (qr + rest)[: a + b]
        chosen = set(table)
        blocks = [table[:a], table[a:], [i for i in by_value if i not in chosen]]
    else:
        raise SearchError(f"unknown partition strategy {strategy!r}")
    return Partition(*(tuple(sorted(bl)) for bl in blocks))


@dataclass(frozen=True)
class SubsetProductInstance:
    primes: tuple[int, ...]
    modulus: int
    target: int
    blocks: Partition

    def __post_init__(self):
        n = len(self.primes)
        if n > MAX_PRIMES:
            raise SearchError(f"at most {MAX_PRIMES} primes supported, got {n}")
        if not 1 <= self.modulus < MAX_MACHINE_MODULUS:
            raise SearchError("modulus must lie in [1, 2**63)")
        if len(set(self.primes)) != n:
            raise SearchError("primes must be distinct")
        for p in self.primes:
            if math.gcd(p, self.modulus) != 1:
                raise SearchError(f"prime {p} is not coprime to the modulus")
        t = self.target % self.modulus
        object.__setattr__(self, "target", t)
        if math.gcd(t, self.modulus) != 1:
            raise SearchError(f"target {t} is not a unit modulo {self.modulus}")
        idx = sorted(self.blocks.s1 + self.blocks.s2 + self.blocks.s3)
        if idx != list(range(n)):
            raise SearchError("partition blocks must be disjoint and cover every prime")
        if len(self.blocks.s1) > MAX_TABLE_BITS or len(self.blocks.s2) > MAX_TABLE_BITS:
            raise SearchError(f"table blocks are limited to {MAX_TABLE_BITS} primes")

    @classmethod
    def build(
        cls,
        primes: Sequence[int],
        modulus: int,
        target: int = 1,
        strategy: str = "sorted",
        sizes: tuple[int, int, int] | None = None,
    ) -> "SubsetProductInstance":
        primes = tuple(primes)
        return cls(primes, modulus, target, partition(primes, strategy, sizes))

    def digest(self) -> str:
        blob = json.dumps(
            [list(map(str, self.primes)), str(self.modulus), str(self.target),
             self.blocks.s1, self.blocks.s2, self.blocks.s3]
        )
        return hashlib.sha256(blob.encode()).hexdigest()

    def summary(self) -> dict:
        return {
            "primes": len(self.primes),
            "modulus": str(self.modulus),
            "target": str(self.target),
            "blocks": list(self.blocks.sizes),
        }

    def mask_primes(self, mask: int) -> list[int]:
        return [p for i, p in enumerate(self.primes) if mask >> i & 1]


@dataclass(frozen=True)
class SearchHit:
    subset: int
    product: int
    d_part: int
    e_part: int
    f_part: int
    factors: tuple[int, ...] = field(default=(), compare=False)

    def to_json(self) -> str:
        return json.dumps(
            {
                "product": str(self.product),
                "factors": "*".join(map(str, self.factors)),
                "subset": str(self.subset),
                "d": str(self.d_part),
                "e": str(self.e_part),
                "f": str(self.f_part),
            }
        )

    @classmethod
    def from_json(cls, line: str) -> "SearchHit":
        obj = json.loads(line)
        factors = tuple(int(p) for p in obj["factors"].split("*")) if obj["factors"] else ()
        return cls(int(obj["subset"]), int(obj["product"]), int(obj["d"]), int(obj["e"]), int(obj["f"]), factors)


@dataclass
class CensusResult:
    instance: dict
    hits: list[SearchHit]
    expected_log2: float
    elapsed: float = 0.0

    @property
    def count(self) -> int:
        return len(self.hits)

    @property
    def products(self) -> list[int]:
        return [h.product for h in self.hits]

    def summary_json(self, **extra) -> str:
        rec = {"kind": "summary", "count": self.count, "expected_log2": self.expected_log2,
               "elapsed": round(self.elapsed, 3), **self.instance}
        rec.update(extra)
        return json.dumps(rec)


def _table_residues(backend, primes: Sequence[int], start: int, L: int) -> np.ndarray:
    return backend.subset_residues(np.array([p % L for p in primes], dtype=np.uint64), start % L, L)


def side_table(
    S: Sequence[int],
    primes: Sequence[int],
    L: int,
    transform: str = "identity",
    target: int = 1,
    backend: str | None = None,
) -> dict[int, list[int]]:
    """Residue -> list of block-local bitmasks, one entry per subset of ``S``.

    ``identity`` records the subset product; ``inverse_times_target`` records
    ``target * product**-1``.  Masks index positions within ``S``.
    """
    if len(S) > MAX_TABLE_BITS:
        raise SearchError(f"table blocks are limited to {MAX_TABLE_BITS} primes")
    k = kernel.get_backend(backend)
    block = [primes[i] for i in S]
    if transform == "identity":
        res = _table_residues(k, block, 1, L)
    elif transform == "inverse_times_target":
        res = _table_residues(k, [mod_inverse(p, L) for p in block], target, L)
    else:
        raise SearchError(f"unknown transform {transform!r}")
    table: dict[int, list[int]] = {}
    for mask, r in enumerate(res.tolist()):
        table.setdefault(r, []).append(mask)
    return table


def _character_filter(inst: SubsetProductInstance) -> list[tuple[int, int, int]]:
    """Quadratic characters that every table prime is trivial on.

    For such an odd prime ``q | L``, ``chi_q(d)`` must equal ``chi_q(t)``;
    returns ``(q, nonresidue bitmask over S3, required parity)``.
    """
    L = inst.modulus
    if L < 3:
        return []
    table_primes = [inst.primes[i] for i in inst.blocks.s1 + inst.blocks.s2]
    out = []
    for q, _ in factor(L).factors:
        if q == 2:
            continue
        if all(legendre(p, q) == 1 for p in table_primes):
            nonres = 0
            for j, i in enumerate(inst.blocks.s3):
                if legendre(inst.primes[i], q) == -1:
                    nonres |= 1 << j
            out.append((q, nonres, 0 if legendre(inst.target, q) == 1 else 1))
    return out


def sweep_masks(inst: SubsetProductInstance, d_masks: Iterable[int] | None = None) -> np.ndarray:
    """Sweep-block subsets that survive the quadratic-character filter."""
    if d_masks is None:
        masks = np.arange(1 << len(inst.blocks.s3), dtype=np.int64)
    else:
        masks = np.fromiter(d_masks, dtype=np.int64)
    for _, nonres, parity in _character_filter(inst):
        keep = (np.bitwise_count(masks & nonres) & 1) == parity
        masks = masks[keep]
    return masks


def _block_to_global(block: Sequence[int], local: int) -> int:
    g = 0
    j = 0
    while local:
        if local & 1:
            g |= 1 << block[j]
        local >>= 1
        j += 1
    return g


class _Checkpoint:
    """Append-only JSON-lines log of completed sweep chunks."""

    def __init__(self, path: Path, digest: str, chunk: int):
        self.path = Path(path)
        self.done: dict[int, list[list[int]]] = {}
        if self.path.exists() and self.path.stat().st_size:
            with open(self.path) as fh:
                header = json.loads(fh.readline())
                if header.get("digest") != digest or header.get("chunk") != chunk:
                    raise CheckpointMismatch(f"checkpoint {self.path} belongs to a different search")
                for line in fh:
                    if not line.strip():
                        continue
                    try:
                        rec = json.loads(line)
                    except json.JSONDecodeError:
                        break  # torn final line from an interrupted write
                    self.done[rec["index"]] = rec["hits"]
        else:
            with open(self.path, "w") as fh:
                fh.write(json.dumps({"kind": "header", "digest": digest, "chunk": chunk}) + "\n")

    def record(self, index: int, hits: list[list[int]]) -> None:
        with open(self.path, "a") as fh:
            fh.write(json.dumps({"kind": "block", "index": index, "hits": hits}) + "\n")
            fh.flush()
            os.fsync(fh.fileno())


def enumerate_hits(
    inst: SubsetProductInstance,
    *,
    min_size: int = 2,
    d_masks: Iterable[int] | None = None,
    backend: str | None = None,
    threads: int = 1,
    chunk: int = 256,
    checkpoint: str | Path | None = None,
    table_budget: int = DEFAULT_TABLE_BUDGET,
    expected_log2: float | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> CensusResult:
    """Every subset whose product is ``target`` mod ``L``, each exactly once.

    Subsets with fewer than ``min_size`` primes are dropped (the empty subset
    is always dropped).  Hits come back sorted by product.
    """
    started = time.perf_counter()
    k = kernel.get_backend(backend)
    L, t = inst.modulus, inst.target
    s1, s2, s3 = inst.blocks.s1, inst.blocks.s2, inst.blocks.s3
    need = (_X_ENTRY_BYTES << len(s1)) + (_Y_ENTRY_BYTES << len(s2)) + (8 << len(s3))
    if need > table_budget:
        raise TableBudgetExceeded(f"tables need about {need} bytes, budget is {table_budget}")

    X = _table_residues(k, [mod_inverse(inst.primes[i], L) for i in s1], t, L)
    order = np.argsort(X, kind="stable")
    Xs = np.ascontiguousarray(X[order])
    Y = np.ascontiguousarray(_table_residues(k, [inst.primes[i] for i in s2], 1, L))
    D = _table_residues(k, [inst.primes[i] for i in s3], 1, L)
    matcher = k.Matcher(Xs, L)
    masks = sweep_masks(inst, d_masks)
    chunks = [masks[i : i + chunk] for i in range(0, len(masks), chunk)]

    ckpt = _Checkpoint(Path(checkpoint), inst.digest() + f":{min_size}", chunk) if checkpoint else None

    def run(ci: int) -> list[list[int]]:
        cm = chunks[ci]
        dd, xp, yy = matcher.sweep(Y, np.ascontiguousarray(D[cm]))
        triples = []
        for a, p0, f in zip(dd.tolist(), xp.tolist(), yy.tolist()):
            p = p0
            while p < len(Xs) and Xs[p] == Xs[p0]:
                triples.append([int(cm[a]), int(order[p]), f])
                p += 1
        return triples

    raw: list[list[int]] = []
    todo = []
    for ci in range(len(chunks)):
        if ckpt is not None and ci in ckpt.done:
            raw.extend(ckpt.done[ci])
        else:
            todo.append(ci)
    done = len(chunks) - len(todo)

    def finish(ci: int, triples: list[list[int]]) -> None:
        nonlocal done
        raw.extend(triples)
        if ckpt is not None:
            ckpt.record(ci, triples)
        done += 1
        if progress is not None:
            progress(done, len(chunks))

    if threads > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for ci, triples in zip(todo, pool.map(run, todo)):
                finish(ci, triples)
    else:
        for ci in todo:
            finish(ci, run(ci))

    hits = {}
    for dm, em, fm in raw:
        subset = _block_to_global(s3, dm) | _block_to_global(s1, em) | _block_to_global(s2, fm)
        if subset == 0 or subset.bit_count() < min_size or subset in hits:
            continue
        ps = inst.mask_primes(subset)
        part = lambda block, m: math.prod(inst.primes[block[j]] for j in range(len(block)) if m >> j & 1)
        hits[subset] = SearchHit(subset, math.prod(ps), part(s3, dm), part(s1, em), part(s2, fm), tuple(ps))
    ordered = sorted(hits.values(), key=lambda h: h.product)
    if expected_log2 is None:
        expected_log2 = len(inst.primes) - math.log2(_phi(L))
    return CensusResult(inst.summary(), ordered, expected_log2, time.perf_counter() - started)


def _phi(L: int) -> int:
    return math.prod(p ** (e - 1) * (p - 1) for p, e in factor(L).factors)


def census_rigid(
    m: int,
    L: FactoredNat,
    strategy: str = "sorted",
    sizes: tuple[int, int, int] | None = None,
    **kwargs,
) -> CensusResult:
    """``C(m, L)``: composite squarefree pool products that are 1 mod L."""
    pool = prime_pool(m, L)
    rec = fecundity(L, m)
    if len(pool) == 0:
        return CensusResult({"primes": 0, "modulus": str(L.value), "target": "1", "blocks": [0, 0, 0]},
                            [], rec.fecundity)
    inst = SubsetProductInstance.build(pool.primes, L.value, 1, strategy, sizes)
    result = enumerate_hits(inst, expected_log2=rec.fecundity, **kwargs)
    for hit in result.hits:
        report = check_order(FactoredNat.from_primes(hit.factors), m)
        if report.verdict is not Verdict.RIGID:
            raise InternalConsistencyError(f"{hit.product} from C({m},{L}) checked as {report.verdict.value}")
    result.instance["order"] = m
    result.instance["fecundity"] = rec.fecundity
    return result


@dataclass(frozen=True)
class BlockProbe:
    d: int
    hit_count: int
    hits: tuple[SearchHit, ...]


def single_block_probe(
    m: int,
    L: FactoredNat,
    strategy: str = "sorted",
    sizes: tuple[int, int, int] | None = None,
    **kwargs,
) -> list[BlockProbe]:
    """Per sweep prime ``q``: the hits whose sweep part is exactly ``q``."""
    pool = prime_pool(m, L)
    inst = SubsetProductInstance.build(pool.primes, L.value, 1, strategy, sizes)
    s3 = inst.blocks.s3
    res = enumerate_hits(inst, d_masks=[1 << j for j in range(len(s3))], **kwargs)
    out = []
    for i in s3:
        q = inst.primes[i]
        hits = tuple(h for h in res.hits if h.d_part == q)
        out.append(BlockProbe(q, len(hits), hits))
    return out


def brute_force_hits(primes: Sequence[int], L: int, target: int = 1, min_size: int = 2) -> list[int]:
    """Direct enumeration of all ``2**n`` subsets; products hitting ``target``."""
    out = []
    for mask in range(1, 1 << len(primes)):
        if mask.bit_count() < min_size:
            continue
        prod = 1
        for i, p in enumerate(primes):
            if mask >> i & 1:
                prod *= p
        if prod % L == target % L:
            out.append(prod)
    return sorted(out)


def format_hit_factors(hit: SearchHit) -> str:
    return format_factorization(FactoredNat.from_primes(hit.factors))
