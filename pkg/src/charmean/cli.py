"""Command line: ``charmean verify | show | bench``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from collections import defaultdict
from pathlib import Path

from charmean import __version__
from charmean import combinatorics as comb
from charmean.fp import UnsupportedModulus, build_context, legendre
from charmean.identities import DEFAULT_CUBIC_GUARD, IdentityId, Tolerance, parse_identities, run_identity
from charmean.report import InvalidRange, ReportWriteError, SweepConfig, emit_report, run_sweep

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            return int(lo), int(lo)
        return int(lo), int(hi)
    except ValueError:
        raise UsageError(f"bad prime range {text!r}, expected A..B") from None


def _add_sweep_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--primes", default="5..97", help="inclusive prime range A..B (default 5..97)")
    sp.add_argument("--identities", default="all", help="comma-separated identity ids, or 'all'")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--tolerance", type=float, default=None, help="absolute tolerance floor (default 1e-6)")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--max-cubic-prime", type=int, default=DEFAULT_CUBIC_GUARD)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="charmean", description=__doc__)
    ap.add_argument("--version", action="version", version=f"charmean {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="sweep a prime range and check identities")
    _add_sweep_args(v)
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--out", default=None, help="report path (default: stdout)")
    v.add_argument("--cache", default=None, help="cache directory (default: $CHARMEAN_CACHE, else none)")
    v.add_argument("--vary-nk", action="store_true", help="also run at three random coprime (n, k) pairs")
    v.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("show", help="one identity at one prime, with intermediate quantities")
    s.add_argument("--prime", type=int, required=True)
    s.add_argument("--identity", default="TH2")
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--max-cubic-prime", type=int, default=DEFAULT_CUBIC_GUARD)

    b = sub.add_parser("bench", help="time each identity over a prime range")
    _add_sweep_args(b)
    return ap


def _config(args, **extra) -> SweepConfig:
    try:
        idents = parse_identities(args.identities)
        return SweepConfig(
            prime_range=parse_range(args.primes),
            identities=idents,
            tolerance=args.tolerance,
            jobs=args.jobs,
            n=args.n,
            k=args.k,
            max_cubic_prime=args.max_cubic_prime,
            **extra,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _check_writable(path: str | None) -> None:
    if path is None or path == "-":
        return
    parent = Path(path).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise UsageError(f"output path not writable: {path}")


def cmd_verify(args) -> int:
    cache = args.cache or os.environ.get("CHARMEAN_CACHE") or None
    config = _config(
        args, fmt=args.format, out=args.out, cache_dir=cache, vary_nk=args.vary_nk, seed=args.seed
    )
    _check_writable(args.out)
    try:
        report = run_sweep(config)
    except (InvalidRange, ValueError) as exc:
        raise UsageError(str(exc)) from None
    try:
        emit_report(report, config.fmt, config.out)
    except ReportWriteError as exc:
        raise UsageError(str(exc)) from None
    s = report.summary
    print(
        f"{s['total']} records: {s['pass']} pass, {s['fail']} fail, {s['skipped']} skipped "
        f"in {s['elapsed_ms'] / 1e3:.2f} s",
        file=sys.stderr,
    )
    for rec in report.records:
        if rec.status == "fail":
            print(f"FAIL {rec.identity} p={rec.prime}: lhs={rec.lhs} rhs={rec.rhs} ({rec.detail})", file=sys.stderr)
    return EXIT_FAIL if report.failed else EXIT_OK


def cmd_show(args) -> int:
    try:
        ctx = build_context(args.prime)
        (ident,) = parse_identities(args.identity)
    except (UnsupportedModulus, ValueError) as exc:
        raise UsageError(str(exc)) from None
    p = ctx.p
    try:
        rec = run_identity(ident, ctx, args.n, args.k, Tolerance(), args.max_cubic_prime)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    print(f"{rec.identity} at p={p} (g={ctx.g})")
    for name in ("lhs", "rhs", "abs_err", "rel_err", "status", "elapsed_ms", "detail"):
        print(f"  {name:<10} {getattr(rec, name)}")

    print("\nT(p)")
    print(f"  via discriminant      {comb.t_via_delta(ctx)}")
    if p <= args.max_cubic_prime:
        print(f"  direct triple sum     {comb.t_direct(ctx)}")
        print(f"  |U| - |U0|            {comb.u_count(ctx)} - {comb.u0_count(ctx)} = {comb.t_via_sets(ctx)}")
    else:
        print(f"  cubic routes skipped (p > {args.max_cubic_prime})")
    print(f"T_L(p)                  {comb.t_l(ctx)}")

    print("\n  N  class      |S(N)|  predicted")
    for N in range(1, p):
        if N == 1:
            cls = "N=1"
        elif N == 4 % p:
            cls = "N=4"
        else:
            cls = "residue" if legendre(ctx, N) == 1 else "non-res"
        got = comb.s_set_direct(ctx, N).cardinality
        print(f"{N:>3}  {cls:<9} {got:>7}  {comb.census_class_count(ctx, N):>9}")
    return EXIT_OK if rec.status != "fail" else EXIT_FAIL


def cmd_bench(args) -> int:
    config = _config(args)
    try:
        report = run_sweep(config)
    except (InvalidRange, ValueError) as exc:
        raise UsageError(str(exc)) from None
    per_ident: dict[IdentityId, float] = defaultdict(float)
    per_prime: dict[int, float] = defaultdict(float)
    for rec in report.records:
        per_ident[rec.identity] += rec.elapsed_ms
        per_prime[rec.prime] += rec.elapsed_ms
    print(f"{'identity':<14}{'ms':>12}")
    for ident, ms in per_ident.items():
        print(f"{ident.value:<14}{ms:>12.1f}")
    print(f"\n{'prime':<14}{'ms':>12}")
    for p, ms in per_prime.items():
        print(f"{p:<14}{ms:>12.1f}")
    print(f"\nwall {report.summary['elapsed_ms'] / 1e3:.2f} s with {config.jobs} job(s)")
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    handler = {"verify": cmd_verify, "show": cmd_show, "bench": cmd_bench}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"charmean: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
