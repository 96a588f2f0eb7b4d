"""Prime-range sweeps, the on-disk record cache, and report serialization."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
import random
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from charmean import __version__
from charmean.fp import build_context, primes_in_range
from charmean.identities import (
    DEFAULT_CUBIC_GUARD,
    FAIL,
    ORDER,
    PASS,
    SKIPPED,
    USES_NK,
    IdentityId,
    Tolerance,
    VerificationRecord,
    run_identity,
)

log = logging.getLogger(__name__)

RECORD_FIELDS = (
    "identity",
    "prime",
    "lhs",
    "rhs",
    "abs_err",
    "rel_err",
    "status",
    "elapsed_ms",
    "n",
    "k",
    "detail",
    "cache_hit",
)


class InvalidRange(ValueError):
    pass


class ReportWriteError(OSError):
    pass


@dataclass
class SweepConfig:
    prime_range: tuple[int, int] = (5, 97)
    identities: list[IdentityId] = field(default_factory=lambda: list(IdentityId))
    tolerance: float | None = None
    jobs: int = 1
    fmt: str = "json"
    out: str | None = None
    cache_dir: str | None = None
    n: int = 1
    k: int = 1
    max_cubic_prime: int = DEFAULT_CUBIC_GUARD
    vary_nk: bool = False
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.prime_range
        if lo < 5 or hi < lo:
            raise InvalidRange(f"invalid range {lo}..{hi}: need 5 <= A <= B")
        if self.jobs < 1:
            raise ValueError("worker count must be >= 1")
        if self.fmt not in ("json", "csv"):
            raise ValueError(f"unknown format {self.fmt!r}")

    @property
    def tol(self) -> Tolerance:
        return Tolerance() if self.tolerance is None else Tolerance(abs_floor=self.tolerance)

    def primes(self) -> list[int]:
        ps = primes_in_range(*self.prime_range)
        if not ps:
            raise InvalidRange(f"invalid range {self.prime_range[0]}..{self.prime_range[1]}: no primes >= 5")
        return ps

    def echo(self) -> dict:
        d = asdict(self)
        d["prime_range"] = list(self.prime_range)
        d["identities"] = [i.value for i in self.identities]
        return d


@dataclass
class RunReport:
    config: dict
    records: list[VerificationRecord]
    summary: dict
    version: str = __version__
    timestamp: str = ""

    @property
    def failed(self) -> bool:
        return self.summary["fail"] > 0

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "records": [r.to_dict() for r in self.records],
            "summary": self.summary,
            "version": self.version,
            "timestamp": self.timestamp,
        }


def summarize(records: list[VerificationRecord], elapsed_ms: float = 0.0) -> dict:
    return {
        "pass": sum(r.status == PASS for r in records),
        "fail": sum(r.status == FAIL for r in records),
        "skipped": sum(r.status == SKIPPED for r in records),
        "total": len(records),
        "elapsed_ms": elapsed_ms,
    }


def nk_pairs(config: SweepConfig, p: int) -> list[tuple[int, int]]:
    """The base (n, k) plus, in vary mode, three seeded random coprime pairs."""
    base = (config.n % p, config.k % p)
    pairs = [base]
    if config.vary_nk:
        rng = random.Random(f"{config.seed}:{p}")
        while len(pairs) < 4:
            pair = (rng.randrange(1, p), rng.randrange(1, p))
            if pair not in pairs:
                pairs.append(pair)
    return pairs


def _tasks_for(config: SweepConfig, p: int) -> list[tuple[IdentityId, int, int]]:
    tasks = []
    for ident in config.identities:
        pairs = nk_pairs(config, p) if ident in USES_NK else nk_pairs(config, p)[:1]
        tasks.extend((ident, n, k) for n, k in pairs)
    return tasks


def _sort_key(r: VerificationRecord):
    return (r.prime, ORDER[r.identity], r.n or 0, r.k or 0)


# --- cache -------------------------------------------------------------------


def cache_key(p: int, ident: IdentityId, n: int, k: int, tol: Tolerance, guard: int, version: str = __version__) -> dict:
    return {
        "version": version,
        "p": p,
        "identity": ident.value,
        "n": n,
        "k": k,
        "tol_abs": tol.abs_floor,
        "tol_rel": tol.rel,
        "max_cubic_prime": guard,
    }


def _cache_path(cache_dir: str | os.PathLike, key: dict) -> Path:
    digest = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:32]
    return Path(cache_dir) / f"{key['identity']}-p{key['p']}-{digest}.json"


def cache_lookup(cache_dir, key: dict) -> VerificationRecord | None:
    path = _cache_path(cache_dir, key)
    if not path.exists():
        return None
    t0 = time.perf_counter()
    try:
        doc = json.loads(path.read_text())
        if doc.get("key") != key:
            return None
        rec = VerificationRecord.from_dict(_decode_record(doc["record"]))
    except (ValueError, KeyError, TypeError) as exc:
        log.warning("discarding corrupt cache entry %s: %s", path, exc)
        return None
    rec.cache_hit = True
    rec.elapsed_ms = (time.perf_counter() - t0) * 1e3
    return rec


def cache_store(cache_dir, key: dict, record: VerificationRecord) -> Path:
    path = _cache_path(cache_dir, key)
    path.parent.mkdir(parents=True, exist_ok=True)
    rec = record.to_dict()
    rec["cache_hit"] = False
    doc = {"key": key, "record": _encode_record(rec)}
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


# --- sweep -------------------------------------------------------------------


def _run_prime(p: int, tasks, tol: Tolerance, guard: int) -> list[VerificationRecord]:
    ctx = build_context(p)
    return [run_identity(ident, ctx, n, k, tol, guard) for ident, n, k in tasks]


def run_sweep(config: SweepConfig) -> RunReport:
    t0 = time.perf_counter()
    tol = config.tol
    guard = config.max_cubic_prime
    records: list[VerificationRecord] = []
    pending: dict[int, list] = {}
    for p in config.primes():
        if config.n % p == 0 or config.k % p == 0:
            raise ValueError(f"n={config.n} and k={config.k} must be coprime to every prime in range (p={p})")
        todo = []
        for ident, n, k in _tasks_for(config, p):
            hit = None
            if config.cache_dir:
                hit = cache_lookup(config.cache_dir, cache_key(p, ident, n, k, tol, guard))
            if hit is not None:
                records.append(hit)
            else:
                todo.append((ident, n, k))
        if todo:
            pending[p] = todo

    results: dict[int, list[VerificationRecord]] = {}
    if config.jobs == 1 or len(pending) <= 1:
        for p, todo in pending.items():
            results[p] = _run_prime(p, todo, tol, guard)
    else:
        # largest primes first so the long tasks start early
        order = sorted(pending, reverse=True)
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            futures = {p: pool.submit(_run_prime, p, pending[p], tol, guard) for p in order}
            results = {p: fut.result() for p, fut in futures.items()}

    fresh: list[VerificationRecord] = []
    for p, todo in pending.items():
        for (ident, n, k), rec in zip(todo, results[p]):
            if config.cache_dir:
                cache_store(config.cache_dir, cache_key(p, ident, n, k, tol, guard), rec)
            fresh.append(rec)

    records.extend(fresh)
    records.sort(key=_sort_key)
    elapsed = (time.perf_counter() - t0) * 1e3
    return RunReport(
        config=config.echo(),
        records=records,
        summary=summarize(records, elapsed),
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )


# --- serialization -----------------------------------------------------------


def _encode_value(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return x


def _decode_value(x):
    if isinstance(x, dict):
        return complex(x["re"], x["im"])
    return x


def _encode_record(d: dict) -> dict:
    return {key: _encode_value(v) if key in ("lhs", "rhs") else v for key, v in d.items()}


def _decode_record(d: dict) -> dict:
    return {key: _decode_value(v) if key in ("lhs", "rhs") else v for key, v in d.items()}


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    if isinstance(x, complex):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    return str(x)


def render(report: RunReport, fmt: str) -> str:
    if fmt == "json":
        doc = report.to_dict()
        doc["records"] = [_encode_record(r) for r in doc["records"]]
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(RECORD_FIELDS)
        for rec in report.records:
            d = rec.to_dict()
            writer.writerow([_csv_cell(d[f]) for f in RECORD_FIELDS])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(report: RunReport, fmt: str = "json", path: str | None = None) -> None:
    text = render(report, fmt)
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ReportWriteError(f"cannot write report to {path}: {exc}") from exc
