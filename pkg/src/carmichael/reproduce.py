"""Named checks of the published counts and numbers."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import fixtures as fx
from .mitm import census_rigid, single_block_probe
from .nonrigid import search_nonrigid, smallest_valid_p0, validate
from .pool import fecundity, prime_pool

FECUNDITY_TOL = 1e-3


@dataclass
class Outcome:
    target: str
    passed: bool
    detail: dict


def _pool(fixture, expected):
    n = len(prime_pool(2, fixture.factored))
    return n == expected, {"pool_size": n, "expected": expected}


def _fec(fixture, expected):
    f = fecundity(fixture.factored, 2).fecundity
    return abs(f - expected) <= FECUNDITY_TOL, {"fecundity": f, "expected": expected}


def _census_l1(**kw):
    a = census_rigid(2, fx.L1.factored, "sorted", **kw)
    b = census_rigid(2, fx.L1.factored, "balanced", (19, 19, 7), **kw)
    same = a.products == b.products
    return a.count == 246 and same, {"count": a.count, "balanced_count": b.count, "identical": same}


def _minimal_l1(**kw):
    res = census_rigid(2, fx.L1.factored, "sorted", **kw)
    least = min(len(h.factors) for h in res.hits)
    found = sorted(h.product for h in res.hits if len(h.factors) == least)
    want = sorted(f.value for f in fx.C2_L1_MINIMAL)
    return found == want, {"prime_count": least, "found": [str(v) for v in found]}


def _fourfold_l2(**kw):
    rows = single_block_probe(2, fx.L2.factored, "sorted", (20, 20, 18), **kw)
    productive = [r for r in rows if r.hit_count]
    found = sorted(h.product for r in productive for h in r.hits)
    want = sorted(f.value for f in fx.C2_L2_FOUR)
    return len(productive) == 4 and found == want, {
        "productive_primes": [r.d for r in productive],
        "sweep_primes": len(rows),
    }


def _nonrigid_53(**kw):
    inst = validate(fx.L2.factored, fx.NONRIGID_P0)
    res, hits = search_nonrigid(inst, "qr5", **kw)
    ok = (
        len(hits) == 53
        and hits[0].n == fx.NONRIGID_SMALLEST.value
        and hits[-1].n == fx.NONRIGID_LARGEST.value
    )
    return ok, {"count": len(hits), "expected_log2": res.expected_log2}


def _p0():
    p0 = smallest_valid_p0(fx.L2.factored)
    return p0 == 1153, {"p0": p0}


TARGETS: dict[str, tuple[Callable, bool]] = {
    "pool-L1-45": (lambda **kw: _pool(fx.L1, 45), False),
    "pool-L2-58": (lambda **kw: _pool(fx.L2, 58), False),
    "fecundity-L1": (lambda **kw: _fec(fx.L1, 8.039), False),
    "fecundity-L2": (lambda **kw: _fec(fx.L2, 16.132), False),
    "census-L1-246": (_census_l1, False),
    "minimal-elements-L1": (_minimal_l1, False),
    "fourfold-L2": (_fourfold_l2, False),
    "nonrigid-53": (_nonrigid_53, True),
    "smallest-p0-1153": (lambda **kw: _p0(), False),
}


def is_long(target: str) -> bool:
    return TARGETS[target][1]


def run_target(target: str, **search_kwargs) -> Outcome:
    fn, _ = TARGETS[target]
    passed, detail = fn(**search_kwargs)
    return Outcome(target, passed, detail)
