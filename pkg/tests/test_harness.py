import json
import os

import pytest

from artifact import harness as H
from artifact.qalgebra import Truncation


def test_config_precedence(tmp_path):
    p = tmp_path / "cfg.ini"
    p.write_text("[defaults]\nseed = 7\nmax-level = 2\nsign = -\n")
    cfg = H.load_config(str(p), {"seed": 11, "sign": None})
    assert cfg["seed"] == 11            # flag beats file
    assert cfg["max_level"] == 2        # file beats default
    assert cfg["sign"] == "-"
    assert cfg["jobs"] == 1             # default
    with pytest.raises(ValueError):
        H.load_config(None, {"sign": "x"})
    bad = tmp_path / "bad.ini"
    bad.write_text("[defaults]\ncolour = red\n")
    with pytest.raises(ValueError):
        H.load_config(str(bad))


@pytest.mark.parametrize("verb", ["verify", "bethe", "basis"])
def test_suites_are_sorted_unique_and_registered(verb):
    specs = H.suite(verb, H.load_config())
    assert specs and len(specs) == len(set(specs))
    assert specs == sorted(specs, key=H.CheckSpec.sort_key)
    for s in specs:
        assert s.check_id in H.REGISTRY
        assert H.REGISTRY[s.check_id][0] == verb
        assert H.validate(s) is None


def test_only_filter_and_sign():
    cfg = H.load_config(None, {"only": "qva.hexagon", "sign": "-"})
    specs = H.suite("verify", cfg)
    assert [s.check_id for s in specs] == ["qva.hexagon"]
    assert specs[0].p["sign"] == -1


def test_unknown_verb():
    with pytest.raises(ValueError):
        H.suite("frobnicate", H.load_config())


def test_validation_skips_bad_specs():
    r = H.run_check(H.spec("bethe.vacuum_pipeline", N=2, sign=1, K=2, L=3, n=3))
    assert r.status == "skipped" and r.witness == "n exceeds N"
    assert H.run_check(H.spec("no.such.check")).status == "skipped"


def test_empty_report(tmp_path):
    out = tmp_path / "r.jsonl"
    H.emit_report([], str(out))
    recs, summary = H.read_report(str(out))
    assert recs == []
    assert summary["summary"] == {"pass": 0, "fail": 0, "skipped": 0, "report-only": 0, "total": 0}


def test_failing_witness_is_written_verbatim(tmp_path):
    H.REGISTRY["test.always_fails"] = ("verify", "always fails", lambda p, ctx: {"ok": False, "witness": ["w", 3]})
    try:
        r = H.run_check(H.spec("test.always_fails", a=1))
    finally:
        del H.REGISTRY["test.always_fails"]
    assert r.status == "fail" and r.witness == ["w", 3]
    out = tmp_path / "r.jsonl"
    H.emit_report([r], str(out), H.load_config())
    recs, summary = H.read_report(str(out))
    assert recs[0]["witness"] == ["w", 3]
    assert recs[0]["elapsed_ms"] is None and recs[0]["cache_hits"] is None
    assert summary["summary"]["fail"] == 1 and summary["seed"] == 0
    timing = json.loads((tmp_path / "r.jsonl.timings.jsonl").read_text().splitlines()[0])
    assert timing["check_id"] == "test.always_fails" and timing["elapsed_ms"] >= 0


def test_missing_witness_is_flagged():
    H.REGISTRY["test.silent"] = ("verify", "fails silently", lambda p, ctx: {"ok": False})
    try:
        r = H.run_check(H.spec("test.silent"))
    finally:
        del H.REGISTRY["test.silent"]
    assert r.status == "fail" and r.witness


def test_report_only_records_outcome():
    H.REGISTRY["test.info"] = ("verify", "informational", lambda p, ctx: {"ok": False, "witness": "x"})
    try:
        r = H.run_check(H.spec("test.info", "report-only"))
    finally:
        del H.REGISTRY["test.info"]
    assert r.status == "report-only" and r.detail["holds"] is False


def test_cache_roundtrip_and_tamper(tmp_path):
    ctx = H.Context(str(tmp_path))
    t = Truncation(2, 1, 2, 3, 2)
    tab = ctx.table(t)
    path = ctx.path(t)
    assert os.path.basename(path) == "basis-N2-p-K2-M3-L2.txt"
    assert os.path.exists(path)
    H.cache_roundtrip(tab, str(tmp_path / "copy.txt"))
    # a fresh context loads from disk and counts a hit
    ctx2 = H.Context(str(tmp_path))
    assert ctx2.table(t).to_text() == tab.to_text() and ctx2.hits == 1
    text = open(path).read().split("\n")
    text[2] += "x"
    open(path, "w").write("\n".join(text))
    with pytest.raises(ValueError):
        H.Context(str(tmp_path)).table(t)


def test_resource_guard_skips():
    ctx = H.Context(None, max_len_guard=2)
    r = H.run_check(H.spec("basis.build", N=2, sign=1, K=2, M=3, L=2), ctx)
    assert r.status == "skipped" and "guard" in r.witness


def test_time_limit_skips():
    import time
    H.REGISTRY["test.slow"] = ("verify", "sleeps", lambda p, ctx: time.sleep(5) or {"ok": True})
    try:
        r = H.run_check(H.spec("test.slow"), time_limit=1)
    finally:
        del H.REGISTRY["test.slow"]
    assert r.status == "skipped" and "limit" in r.witness


def test_rational_draws():
    import random
    qs = H.draw_rationals(random.Random(1), 20, avoid=(1, -1))
    assert len(set(qs)) == 20
    assert all(q and q not in (1, -1) for q in qs)
    assert all(abs(q.numerator) <= 97 and q.denominator <= 97 for q in qs)


def test_cli_runs_and_reports_deterministically(tmp_path):
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run / "report.jsonl"
        code = H.main(["basis", "--only", "basis.build,basis.roundtrip", "--sign", "+", "--max-level", "2",
                       "--h-order", "2", "--cache-dir", str(tmp_path / run / "cache"), "--out", str(out), "-q"])
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    recs, summary = H.read_report(str(tmp_path / "a" / "report.jsonl"))
    assert [r["check_id"] for r in recs] == ["basis.build", "basis.roundtrip"]
    assert summary["summary"]["pass"] == 2


def test_cli_exit_code_on_failure(tmp_path):
    H.REGISTRY["test.fails"] = ("basis", "always fails", lambda p, ctx: {"ok": False, "witness": "w"})
    orig = H.suite
    H.suite = lambda verb, cfg: [H.spec("test.fails")]
    try:
        code = H.main(["basis", "--out", str(tmp_path / "r.jsonl"), "-q"])
    finally:
        H.suite = orig
        del H.REGISTRY["test.fails"]
    assert code == 1


def test_aggregate(tmp_path):
    a, b = H.CheckResult("x.a", {"k": 1}, "pass"), H.CheckResult("x.b", {"k": 2}, "fail", "w")
    H.emit_report([a], str(tmp_path / "1.jsonl"))
    H.emit_report([b], str(tmp_path / "2.jsonl"))
    code = H.main(["report", str(tmp_path / "2.jsonl"), str(tmp_path / "1.jsonl"),
                   "--out", str(tmp_path / "all.jsonl")])
    assert code == 1
    recs, summary = H.read_report(str(tmp_path / "all.jsonl"))
    assert [r["check_id"] for r in recs] == ["x.a", "x.b"]
    assert summary["summary"]["total"] == 2
