"""``carmichael`` command line.

Exit codes: 0 claim verified / found, 1 refuted, 2 usage error,
3 resource or effort ceiling reached.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from contextlib import contextmanager

from . import __version__, fixtures, kernel
from .arith import (
    ArithmeticDomainError,
    FactorizationIncomplete,
    format_factorization,
    parse_factorization,
    parse_nat,
)
from .korselt import check_order
from .mitm import (
    CheckpointMismatch,
    InternalConsistencyError,
    SearchError,
    SubsetProductInstance,
    TableBudgetExceeded,
    census_rigid,
    enumerate_hits,
)
from .nonrigid import BoundExceeded, NonRigidValidationError, check_nonrigid, search_nonrigid, validate
from .oracle import probe_all
from .pool import ScanTooLarge, fecundity, fecundity_scan, prime_pool
from .reproduce import TARGETS, is_long, run_target
from .store import RunRecord, append_run, now

EXIT_OK, EXIT_REFUTED, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

log = logging.getLogger("carmichael")

_STRATEGY_ALIASES = {"sorted": "sorted", "sorted_prefix": "sorted", "balanced": "balanced",
                     "qr5": "qr5", "qr5_filtered": "qr5"}


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    env = os.environ.get("CARMICHAEL_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def _sizes(text: str | None):
    if not text:
        return None
    parts = tuple(int(x) for x in text.split(","))
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--partition takes a,b,c")
    return parts


def _caps(text: str | None) -> dict[int, int]:
    caps: dict[int, int] = {}
    if text:
        for item in text.split(","):
            p, _, e = item.partition("=")
            caps[int(p)] = int(e)
    return caps


@contextmanager
def _output(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "a", encoding="utf-8") as fh:
            yield fh


def _record(args, command: str, started: str, summary: dict) -> None:
    if args.no_record:
        return
    params = {k: v for k, v in vars(args).items() if k not in ("func", "no_record", "runs_file", "stream")}
    append_run(RunRecord(command, params, started, now(), summary), args.runs_file)


def _progress(done: int, total: int) -> None:
    if done == total or done % max(1, total // 20) == 0:
        log.info("sweep %d/%d chunks", done, total)


def cmd_verify(args) -> int:
    try:
        n = parse_nat(args.input)
    except FactorizationIncomplete as exc:
        partial = "*".join(str(p) if e == 1 else f"{p}^{e}" for p, e in exc.partial) or "1"
        print(json.dumps({"n": args.input, "error": "factorization incomplete",
                          "partial": partial, "cofactor": str(exc.cofactor)}), file=args.stream)
        return EXIT_RESOURCE
    if n.value < 2:
        raise ArithmeticDomainError("verify needs n >= 2")
    report = check_order(n, args.order)
    print(report.to_json(), file=args.stream)
    ok = report.is_rigid if args.rigid else report.is_carmichael
    return EXIT_OK if ok else EXIT_REFUTED


def cmd_pool(args) -> int:
    L = parse_factorization(args.modulus)
    pool = prime_pool(args.order, L)
    rec = fecundity(L, args.order)
    obj = json.loads(rec.to_json())
    obj["primes"] = [str(p) for p in pool.primes]
    print(json.dumps(obj), file=args.stream)
    return EXIT_OK


def cmd_fecundity_scan(args) -> int:
    records = fecundity_scan(args.primes_up_to, _caps(args.cap), args.bound, args.order, args.top,
                             default_cap=args.default_cap)
    for rec in records:
        print(rec.to_json(), file=args.stream)
    return EXIT_OK


def cmd_search(args) -> int:
    started = now()
    L = parse_factorization(args.modulus)
    strategy = _STRATEGY_ALIASES[args.strategy]
    kw = dict(threads=_threads(args), checkpoint=args.resume, backend=args.backend,
              progress=_progress, min_size=1 if args.include_small else 2)
    fec = fecundity(L, args.order).fecundity
    if args.target % L.value == 1 % L.value:
        result = census_rigid(args.order, L, strategy, _sizes(args.partition), **kw)
    else:
        pool = prime_pool(args.order, L)
        inst = SubsetProductInstance.build(pool.primes, L.value, args.target, strategy, _sizes(args.partition))
        result = enumerate_hits(inst, expected_log2=fec, **kw)
    for hit in result.hits:
        print(hit.to_json(), file=args.stream)
    print(result.summary_json(fecundity=fec), file=args.stream)
    _record(args, "search", started, {"count": result.count, "elapsed": result.elapsed})
    return EXIT_OK if result.count else EXIT_REFUTED


def cmd_search_nonrigid(args) -> int:
    started = now()
    L0 = parse_factorization(args.l0)
    inst = validate(L0, args.p0)
    if args.verify_only:
        elements = list(args.element or [])
        if not elements and L0.value == fixtures.L2.value and args.p0 == fixtures.NONRIGID_P0:
            elements = [fixtures.NONRIGID_SMALLEST.factorization, fixtures.NONRIGID_LARGEST.factorization]
        if not elements:
            raise SearchError("--verify-only needs --element for this (L0, p0)")
        status = EXIT_OK
        for text in elements:
            n = parse_factorization(text)
            in_family = n.value % args.p0 == 0 and (n.value // args.p0) % (args.p0**2 - 1) == 1 \
                and n.value % inst.L0.value == 1
            try:
                check_nonrigid(n, args.p0)
                ok = in_family
            except InternalConsistencyError:
                ok = False
            print(json.dumps({"n": str(n.value), "factors": format_factorization(n), "p0": str(args.p0),
                              "verified": ok, "rigid": False if ok else None}), file=args.stream)
            if not ok:
                status = EXIT_REFUTED
        return status
    result, hits = search_nonrigid(inst, _STRATEGY_ALIASES[args.strategy], _sizes(args.partition),
                                   threads=_threads(args), checkpoint=args.resume, backend=args.backend,
                                   progress=_progress)
    for h in hits:
        print(h.to_json(), file=args.stream)
    print(result.summary_json(), file=args.stream)
    _record(args, "search-nonrigid", started, {"count": len(hits), "elapsed": result.elapsed})
    return EXIT_OK if hits else EXIT_REFUTED


def cmd_oracle(args) -> int:
    n = parse_nat(args.n)
    rep = probe_all(n, args.order, args.trials, args.seed, args.rings)
    for v in rep.field_verdicts + rep.quotient_verdicts:
        print(v.to_json(), file=args.stream)
    print(json.dumps({"kind": "summary", "n": str(n.value), "order": args.order,
                      "all_consistent": rep.all_consistent,
                      "korselt": check_order(n, args.order).verdict.value}), file=args.stream)
    return EXIT_OK if rep.all_consistent else EXIT_REFUTED


def cmd_reproduce(args) -> int:
    targets = list(TARGETS) if args.target == "all" else [args.target]
    status = EXIT_OK
    for t in targets:
        if is_long(t) and not args.allow_long:
            if args.target == "all":
                print(f"SKIP {t} (long-running; pass --allow-long)", file=args.stream)
                continue
            print(f"{t} is long-running; pass --allow-long", file=sys.stderr)
            return EXIT_USAGE
        started = now()
        t0 = time.perf_counter()
        kw = {"threads": _threads(args), "progress": _progress} if t in ("nonrigid-53",) else {}
        out = run_target(t, **kw)
        elapsed = time.perf_counter() - t0
        print(f"{'PASS' if out.passed else 'FAIL'} {t} {json.dumps(out.detail)} ({elapsed:.2f}s)", file=args.stream)
        _record(args, f"reproduce {t}", started, {"passed": out.passed, **out.detail})
        if not out.passed:
            status = EXIT_REFUTED
    return status


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="carmichael", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({kernel.BACKEND} kernel)")
    ap.add_argument("--out", help="append results here instead of stdout")
    ap.add_argument("--runs-file", help="run log (default: $CARMICHAEL_RUNS_FILE or ~/.local/share)")
    ap.add_argument("--no-record", action="store_true", help="do not append to the run log")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="Korselt-type check of order m")
    p.add_argument("input", help="decimal integer or factorization like 3*11*17")
    p.add_argument("--order", "-m", type=int, default=1)
    p.add_argument("--rigid", action="store_true", help="require a rigid Carmichael number")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("pool", help="prime pool P(m, L) and fecundity")
    p.add_argument("--modulus", required=True)
    p.add_argument("--order", "-m", type=int, default=2)
    p.set_defaults(func=cmd_pool)

    p = sub.add_parser("fecundity-scan", help="rank moduli by fecundity")
    p.add_argument("--primes-up-to", type=int, default=37)
    p.add_argument("--cap", help="exponent caps, e.g. 2=7,3=3,5=2")
    p.add_argument("--default-cap", type=int, default=1)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--order", "-m", type=int, default=2)
    p.add_argument("--top", type=int, default=20)
    p.set_defaults(func=cmd_fecundity_scan)

    def search_opts(p):
        p.add_argument("--partition", help="block sizes a,b,c")
        p.add_argument("--strategy", choices=sorted(_STRATEGY_ALIASES), default="sorted")
        p.add_argument("--resume", metavar="CHECKPOINT", help="checkpoint file (created if missing)")
        p.add_argument("--threads", type=int)
        p.add_argument("--backend", choices=kernel.available_backends())

    p = sub.add_parser("search", help="meet-in-the-middle census of C(m, L)")
    p.add_argument("--modulus", required=True)
    p.add_argument("--order", "-m", type=int, default=2)
    p.add_argument("--target", type=int, default=1)
    p.add_argument("--include-small", action="store_true", help="keep single-prime subsets")
    search_opts(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("search-nonrigid", help="census of C(2, L0, p0)")
    p.add_argument("--l0", required=True)
    p.add_argument("--p0", type=int, required=True)
    p.add_argument("--verify-only", action="store_true")
    p.add_argument("--element", action="append", help="factorization to check with --verify-only")
    search_opts(p)
    p.set_defaults(func=cmd_search_nonrigid)

    p = sub.add_parser("oracle", help="probe x -> x^n on fields and quotient rings")
    p.add_argument("--n", required=True)
    p.add_argument("--order", "-m", type=int, default=2)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rings", type=int, default=20, help="quotient rings to probe")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("reproduce", help="check a published count or number")
    p.add_argument("target", choices=[*TARGETS, "all"])
    p.add_argument("--allow-long", action="store_true")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_reproduce)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s", stream=sys.stderr)
    try:
        with _output(args.out) as stream:
            args.stream = stream
            return args.func(args)
    except (FactorizationIncomplete, TableBudgetExceeded, ScanTooLarge, BoundExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (NonRigidValidationError, CheckpointMismatch, ArithmeticDomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
