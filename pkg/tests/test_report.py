import csv
import io
import json
import logging
from dataclasses import replace

import pytest

from charmean import report as rep
from charmean.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from charmean.identities import IdentityId, parse_identities
from charmean.report import InvalidRange, RunReport, SweepConfig, render, run_sweep, summarize


def _strip(rec):
    d = rec.to_dict()
    d.pop("elapsed_ms")
    d.pop("cache_hit")
    return d


def test_sweep_small_range():
    r = run_sweep(SweepConfig(prime_range=(5, 7), identities=[IdentityId.TH1]))
    assert [(x.identity, x.prime) for x in r.records] == [(IdentityId.TH1, 5), (IdentityId.TH1, 7)]
    assert r.summary["pass"] == 2 and not r.failed


def test_sweep_all_identities_single_prime():
    r = run_sweep(SweepConfig(prime_range=(5, 5)))
    assert r.summary == {**r.summary, "pass": 18, "fail": 0, "skipped": 0, "total": 18}
    assert [x.identity for x in r.records] == list(IdentityId)


@pytest.mark.parametrize("lo, hi", [(4, 4), (3, 11), (11, 7)])
def test_invalid_range(lo, hi):
    with pytest.raises(InvalidRange):
        SweepConfig(prime_range=(lo, hi)).primes()


def test_range_without_primes():
    with pytest.raises(InvalidRange):
        SweepConfig(prime_range=(24, 28)).primes()


def test_nk_sharing_a_factor_with_a_prime_is_rejected():
    with pytest.raises(ValueError):
        run_sweep(SweepConfig(prime_range=(5, 11), n=7, identities=[IdentityId.TH1]))


def test_empty_report_renders():
    empty = RunReport(config={}, records=[], summary=summarize([]))
    doc = json.loads(render(empty, "json"))
    assert doc["summary"]["total"] == 0 and doc["records"] == []
    assert render(empty, "csv").strip() == ",".join(rep.RECORD_FIELDS)


def test_json_and_csv_contents():
    r = run_sweep(SweepConfig(prime_range=(5, 7), identities=[IdentityId.TH1, IdentityId.L4_1]))
    doc = json.loads(render(r, "json"))
    assert doc["version"] and doc["timestamp"]
    assert doc["config"]["prime_range"] == [5, 7]
    for d in doc["records"]:
        assert set(rep.RECORD_FIELDS) <= set(d)
    l41 = [d for d in doc["records"] if d["identity"] == "L4_1"][0]
    assert set(l41["lhs"]) == {"re", "im"}
    rows = list(csv.DictReader(io.StringIO(render(r, "csv"))))
    assert len(rows) == 4
    th1 = rows[0]
    assert th1["identity"] == "TH1" and float(th1["rhs"]) == 500
    assert complex(rows[1]["lhs"])


def test_vary_nk_adds_pairs():
    cfg = SweepConfig(prime_range=(7, 7), identities=[IdentityId.TH1, IdentityId.U0_COUNT], vary_nk=True, seed=3)
    r = run_sweep(cfg)
    assert sum(x.identity == IdentityId.TH1 for x in r.records) == 4
    assert sum(x.identity == IdentityId.U0_COUNT for x in r.records) == 1
    assert not r.failed
    assert rep.nk_pairs(cfg, 7) == rep.nk_pairs(replace(cfg), 7)


def test_cache_hit_and_identity(tmp_path):
    cfg = SweepConfig(prime_range=(5, 11), identities=parse_identities("TH1,L4_2,U0_COUNT"), cache_dir=str(tmp_path))
    first = run_sweep(cfg)
    assert not any(r.cache_hit for r in first.records)
    second = run_sweep(cfg)
    assert all(r.cache_hit for r in second.records)
    assert [_strip(a) for a in first.records] == [_strip(b) for b in second.records]
    assert not list(tmp_path.glob(".tmp-*"))


def test_cache_key_covers_version_and_tolerance(tmp_path, monkeypatch):
    cfg = SweepConfig(prime_range=(5, 5), identities=[IdentityId.TH1], cache_dir=str(tmp_path))
    run_sweep(cfg)
    assert run_sweep(cfg).records[0].cache_hit
    assert not run_sweep(replace(cfg, tolerance=1e-3)).records[0].cache_hit
    monkeypatch.setattr(rep, "__version__", "9.9.9")
    monkeypatch.setattr(rep, "cache_key", lambda *a, **kw: {**_orig_key(*a), "version": "9.9.9"})
    assert not run_sweep(cfg).records[0].cache_hit


_orig_key = rep.cache_key


def test_corrupt_cache_entry_is_recomputed(tmp_path, caplog):
    cfg = SweepConfig(prime_range=(5, 5), identities=[IdentityId.TH1], cache_dir=str(tmp_path))
    run_sweep(cfg)
    (entry,) = tmp_path.glob("TH1-p5-*.json")
    entry.write_text("{not json")
    with caplog.at_level(logging.WARNING, logger="charmean.report"):
        r = run_sweep(cfg)
    assert not r.records[0].cache_hit and r.records[0].passed
    assert "corrupt cache entry" in caplog.text
    assert run_sweep(cfg).records[0].cache_hit


def test_serial_and_parallel_agree():
    cfg = SweepConfig(prime_range=(5, 23), identities=parse_identities("TH2,PSI_IDENTITY,ZHANG_K4"))
    a = run_sweep(cfg)
    b = run_sweep(replace(cfg, jobs=2))
    assert [_strip(x) for x in a.records] == [_strip(x) for x in b.records]


# --- command line ------------------------------------------------------------


def test_cli_verify_ok(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["verify", "--primes", "5..13", "--identities", "TH1,C4_1", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["summary"]["pass"] == 8
    assert "8 records" in capsys.readouterr().err


def test_cli_csv_to_stdout(capsys):
    assert main(["verify", "--primes", "5..7", "--identities", "TH1", "--format", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3 and lines[0].startswith("identity,prime")


def test_cli_fail_exit(monkeypatch, capsys):
    from charmean import identities

    monkeypatch.setattr(identities, "c4_1_rhs", lambda p: 0)
    code = main(["verify", "--primes", "5..5", "--identities", "C4_1", "--out", "-"])
    assert code == EXIT_FAIL
    assert "FAIL C4_1 p=5" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--primes", "4..4"],
        ["verify", "--primes", "five"],
        ["verify", "--primes", "5..7", "--identities", "NOPE"],
        ["verify", "--primes", "5..7", "--jobs", "0"],
        ["verify", "--primes", "5..7", "--n", "5"],
        ["verify", "--primes", "5..7", "--out", "/nonexistent/dir/r.json"],
        ["show", "--prime", "9"],
        ["show", "--prime", "7", "--identity", "XX"],
    ],
)
def test_cli_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_cli_cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv("CHARMEAN_CACHE", str(tmp_path))
    argv = ["verify", "--primes", "5..7", "--identities", "TH2", "--out", str(tmp_path / "r.json")]
    assert main(argv) == EXIT_OK
    assert len(list(tmp_path.glob("TH2-*.json"))) == 2
    assert main(argv) == EXIT_OK
    doc = json.loads((tmp_path / "r.json").read_text())
    assert all(r["cache_hit"] for r in doc["records"])


def test_cli_show(capsys):
    assert main(["show", "--prime", "7", "--identity", "TH2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "via discriminant" in out and "|U| - |U0|" in out and "T_L(p)" in out
    assert main(["show", "--prime", "11", "--identity", "T_DELTA", "--max-cubic-prime", "7"]) == EXIT_OK
    assert "cubic routes skipped" in capsys.readouterr().out


def test_cli_bench(capsys):
    assert main(["bench", "--primes", "5..11", "--identities", "TH1,ZHANG_K4"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "ZHANG_K4" in out and "wall" in out
