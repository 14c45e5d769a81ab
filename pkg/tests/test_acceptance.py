"""Acceptance criteria 1-11, each printed as one PASS/FAIL line.

Every criterion runs the same check specs as the command line harness at the
stated sizes; "tolerance" is exact equality of every checked coefficient.
Run directly (python tests/test_acceptance.py) or through pytest.
"""

import filecmp
import os
import sys
import tempfile
import time

import pytest

from artifact import harness as H

CFG = H.load_config()


def _specs(verb, ids, keep=lambda s: True):
    return [s for s in H.suite(verb, CFG) if s.check_id in ids and keep(s)]


def _nodes():
    """criterion number -> (title, budget in seconds, spec list or callable)."""
    same_sign = lambda s: s.expected == "pass"
    return {
        1: ("Yang-Baxter suite", 10, _specs("verify", {"rmatrix.ybe"})),
        2: ("unitarity", 5, _specs("verify", {"rmatrix.unitarity"})),
        3: ("fusion", 30, _specs("verify", {"rmatrix.fusion"})),
        4: ("antisymmetrizer reductions", 30, _specs("verify", {"rmatrix.antisym_reduction"})),
        5: ("Fock oracle", 60, _specs("verify", {"fock.rtt", "fock.rtt_control", "fock.pi_image"})),
        6: ("module axioms", 120, _specs("verify", {
            "module.rll", "module.plus_exchange", "module.minus_exchange", "module.mixed_exchange",
            "module.vacuum_identity"})),
        7: ("quantum vertex algebra axioms", 300, _specs("verify", {
            "qva.vacuum", "qva.locality", "qva.associativity", "qva.hexagon", "qva.braid_unitarity",
            "qva.braid_ybe", "qva.braid_shift"})),
        8: ("Bethe commutativity", 600,
            _specs("bethe", {"bethe.commute", "bethe.commute_control"}, same_sign)),
        9: ("centrality", 600,
            _specs("bethe", {"bethe.central", "bethe.fused_antisym", "bethe.hat_chain_antisym"})),
        10: ("braiding fixed points", 300, _specs("bethe", {"bethe.fixed_points", "bethe.full_fixed_point",
                                                            "bethe.F_identity"})),
        11: ("determinism and persistence", None, _determinism),
    }


_CTX = H.Context(tempfile.mkdtemp(prefix="artifact-acc-"))


def _run_specs(specs):
    bad = []
    for s in specs:
        r = H.run_check(s, _CTX)
        if r.status != "pass":
            bad.append("%s %s: %s %s" % (r.check_id, r.params, r.status, str(H._jsonable(r.witness))[:200]))
    return len(specs), bad


def _determinism():
    argv = ["--only", "rmatrix.ybe,rmatrix.fusion,fock.rtt,module.translation,basis", "--h-order", "4",
            "-q"]
    trees = []
    for run in ("first", "second"):
        d = tempfile.mkdtemp(prefix="artifact-det-%s-" % run)
        cache = os.path.join(d, "cache")
        for verb in ("verify", "basis"):
            out = os.path.join(d, "%s.jsonl" % verb)
            H._CTX = None  # a cold process-level context
            H.main([verb, "--cache-dir", cache, "--out", out] + argv)
        trees.append(d)
    a, b = trees
    bad = []
    names = sorted(os.listdir(os.path.join(a, "cache")))
    if not names or names != sorted(os.listdir(os.path.join(b, "cache"))):
        bad.append("cache listings differ or are empty")
    files = [os.path.join("cache", n) for n in names] + ["verify.jsonl", "basis.jsonl"]
    for f in files:
        if not filecmp.cmp(os.path.join(a, f), os.path.join(b, f), shallow=False):
            bad.append("bytes differ: %s" % f)
    return len(files), bad


def evaluate(k):
    title, budget, work = _nodes()[k]
    t0 = time.perf_counter()
    count, bad = work() if callable(work) else _run_specs(work)
    dt = time.perf_counter() - t0
    if count == 0:
        bad.append("no checks selected")
    if budget is not None and dt > budget:
        bad.append("time %.1fs over budget %ds" % (dt, budget))
    ok = not bad
    line = "criterion %d: %s  %s (%d checks, %.1fs%s)" % (
        k, "PASS" if ok else "FAIL", title, count, dt, "" if budget is None else ", budget %ds" % budget)
    return ok, line, bad


@pytest.mark.slow
@pytest.mark.parametrize("k", range(1, 12))
def test_criterion(k, capsys):
    ok, line, bad = evaluate(k)
    with capsys.disabled():
        print("\n" + line)
        for b in bad[:5]:
            print("    " + b)
    assert ok, bad


if __name__ == "__main__":
    results = [evaluate(k) for k in range(1, 12)]
    for ok, line, bad in results:
        print(line)
        for b in bad[:5]:
            print("    " + b)
    sys.exit(0 if all(r[0] for r in results) else 1)
