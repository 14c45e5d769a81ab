"""Check registry, configuration, basis caches, report emission and the CLI.

Report format (JSON lines, one object per line, keys sorted):

* one record per check with the fields ``check_id``, ``params``, ``status``
  (pass | fail | skipped | report-only), ``expected``, ``witness``,
  ``detail``, ``elapsed_ms`` and ``cache_hits``;
* a final ``{"summary": {...}}`` line with per-status counts, the seed and
  the resolved configuration.

``elapsed_ms`` and ``cache_hits`` are written as null in the report so that
two runs of the same configuration are byte-identical; the measured values
go to the sidecar ``<out>.timings.jsonl``.
"""

import argparse
import configparser
import json
import os
import random
import signal
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product

from . import action as A
from . import bethe as B
from . import fockrep as F
from . import rmatrix as R
from .qalgebra import BasisTable, Truncation, build_basis
from .scalars import SpectralSeries, factorial, mpq, rat_text

DEFAULTS = {
    "N": None,            # None: the sizes each suite is specified at
    "sign": "both",
    "h_order": None,      # None: per-check default (8 for R-matrices, 4 for the algebra)
    "max_level": 3,
    "max_len": None,      # None: L + K - 1
    "seed": 0,
    "mode": "formal",
    "cache_dir": ".artifact-cache",
    "out": "report.jsonl",
    "time_limit": 600,    # seconds per check
    "max_len_guard": 8,   # truncations with M above this are skipped
    "jobs": 1,
    "only": "",
}

INT_KEYS = ("N", "h_order", "max_level", "max_len", "seed", "time_limit", "max_len_guard", "jobs")


class ResourceLimit(Exception):
    pass


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    params: tuple          # sorted (key, value) pairs
    expected: str = "pass"  # pass | report-only

    @property
    def p(self):
        return dict(self.params)

    def sort_key(self):
        return (self.check_id, json.dumps(_jsonable(self.p), sort_keys=True))


@dataclass
class CheckResult:
    check_id: str
    params: dict
    status: str
    witness: object = None
    elapsed_ms: float = 0.0
    cache_hits: int = 0
    expected: str = "pass"
    detail: dict = field(default_factory=dict)

    def record(self):
        return {"check_id": self.check_id, "params": _jsonable(self.params), "status": self.status,
                "expected": self.expected, "witness": _jsonable(self.witness),
                "detail": _jsonable(self.detail), "elapsed_ms": None, "cache_hits": None}


def spec(check_id, expected="pass", **params):
    return CheckSpec(check_id, tuple(sorted(params.items())), expected)


def _jsonable(x):
    """Canonical JSON-ready form; exact scalars become their text."""
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in sorted(x.items(), key=lambda t: str(t[0]))}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if type(x).__name__ == "mpq":
        return rat_text(x)
    if hasattr(x, "text") and callable(x.text):
        return x.text()
    return repr(x)


# configuration

def load_config(path=None, overrides=None):
    """Flat key-value [defaults] section; command line values override file values."""
    cfg = dict(DEFAULTS)
    if path:
        cp = configparser.ConfigParser()
        with open(path) as fh:
            cp.read_file(fh)
        if cp.has_section("defaults"):
            for k, v in cp.items("defaults"):
                k = k.replace("-", "_")
                if k not in cfg:
                    raise ValueError("unknown config key %r" % k)
                cfg[k] = v
    for k, v in (overrides or {}).items():
        if v is not None:
            cfg[k] = v
    for k in INT_KEYS:
        if cfg[k] is not None and cfg[k] != "":
            cfg[k] = int(cfg[k])
        elif cfg[k] == "":
            cfg[k] = None
    if cfg["sign"] not in ("+", "-", "both"):
        raise ValueError("sign must be +, - or both")
    if cfg["mode"] not in ("formal", "rational"):
        raise ValueError("mode must be formal or rational")
    return cfg


def _signs(cfg):
    return {"+": [1], "-": [-1], "both": [1, -1]}[cfg["sign"]]


def _sizes(cfg, default):
    return [cfg["N"]] if cfg["N"] else list(default)


def _K(cfg, default):
    return cfg["h_order"] or default


# basis caches

class Context:
    """Per-process store of basis tables and engines, backed by the cache directory."""

    def __init__(self, cache_dir=None, max_len_guard=8):
        self.cache_dir = cache_dir
        self.max_len_guard = max_len_guard
        self.engines = {}
        self.hits = 0

    def path(self, t):
        name = "basis-N%d-%s-K%d-M%d-L%d.txt" % (t.N, "p" if t.sign > 0 else "m", t.K, t.M, t.L)
        return os.path.join(self.cache_dir, name)

    def table(self, t):
        eng = self.engines.get(t)
        if eng is not None:
            self.hits += 1
            return eng.table
        if t.M > self.max_len_guard:
            raise ResourceLimit("max length %d exceeds the guard %d" % (t.M, self.max_len_guard))
        tab = None
        if self.cache_dir:
            p = self.path(t)
            if os.path.exists(p):
                with open(p) as fh:
                    tab = BasisTable.from_text(fh.read(), t)
                self.hits += 1
        if tab is None:
            tab = build_basis(t)
            if self.cache_dir:
                write_cache(tab, self.path(t))
        self.engines[t] = A.Engine(tab)
        return tab

    def engine(self, N, sign, K, L, M=None):
        t = Truncation(N, sign, K, L + K - 1 if M is None else M, L)
        self.table(t)
        return self.engines[t]


def write_cache(table, path):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(table.to_text())
    os.replace(tmp, path)


def read_cache(path, trunc=None):
    with open(path) as fh:
        return BasisTable.from_text(fh.read(), trunc)


def cache_roundtrip(table, path):
    """Write then read; the text of the result must match the original exactly."""
    write_cache(table, path)
    back = read_cache(path, table.trunc)
    if back.to_text() != table.to_text():
        raise ValueError("cache roundtrip changed the table")
    return back


# random draws

def draw_rationals(rng, count, avoid=()):
    """Nonzero rationals with numerator and denominator bounded by 97."""
    out = []
    while len(out) < count:
        q = mpq(rng.randint(-97, 97), rng.randint(1, 97))
        if q and q not in avoid and q not in out:
            out.append(q)
    return out


def _witness_report(w, **detail):
    out = {"ok": w is None, "witness": w}
    out.update(detail)
    return out


# check implementations: each takes (params, ctx) and returns a report dict

def _ybe(p, ctx):
    rng = random.Random(p["seed"] * 1000003 + p["N"])
    K, N, kind = p["K"], p["N"], p["kind"]
    if kind == "trigHat":
        for _ in range(p["draws"]):
            x, y = draw_rationals(rng, 2, avoid=(1, -1))
            w = B.trig_ybe(N, K, x, y)
            if w is not None:
                return _witness_report(w, x=x, y=y)
        return _witness_report(None, draws=p["draws"])
    for _ in range(p["draws"]):
        if p["mode"] == "formal":
            u = SpectralSeries.linear(("u",), K, {"u": 1})
            q = draw_rationals(rng, 1, avoid=(-1,))[0]
            v = u * q
        else:
            while True:
                u, v = draw_rationals(rng, 2)
                if u + v:
                    break
            q = None
        w = R.ybe_witness(kind, N, K, u, v)
        if w is not None:
            return _witness_report(w, u=u if q is None else "u", v=v if q is None else q)
    return _witness_report(None, draws=p["draws"])


def _unitarity(p, ctx):
    K, N = p["K"], p["N"]
    if p["kind"] == "trigHat":
        rng = random.Random(p["seed"] * 1000003 + N)
        for x in draw_rationals(rng, p["draws"], avoid=(1, -1)):
            w = B.trig_unitarity(N, K, x)
            if w is not None:
                return _witness_report(w, x=x)
        return _witness_report(None)
    if p["mode"] == "formal":
        us = [SpectralSeries.linear(("u",), K, {"u": 1})]
    else:
        us = draw_rationals(random.Random(p["seed"] * 1000003 + N), p["draws"])
    for u in us:
        w = R.unitarity_witness(p["kind"], N, K, u)
        if w is not None:
            return _witness_report(w)
    return _witness_report(None)


def _fusion(p, ctx):
    kind, n, N, K = p["kind"], p["n"], p["N"], p["K"]
    if kind == "trig2":
        _op, c, _ref = R.fusion_evaluate("trig2", n, N, K)
        want = SpectralSeries.monomial(("x",), K, (n * (n - 1) // 2,), R.trig_fusion_scalar(n, K))
        return {"ok": c == want, "witness": None if c == want else (c.text(), want.text())}
    ok, c, want = R.fusion_check(kind, n, N, K, p.get("fsign"))
    # the closed formula and the matrix quotient must agree
    formula = factorial(n) if kind == "yang" else R.alpha(n)
    return {"ok": ok, "witness": None if ok else (c.text(), want.text()),
            "quotient": c.text(), "formula": rat_text(formula)}


def _antisym(p, ctx):
    rng = random.Random(p["seed"] * 1000003 + p["N"])
    if p["mode"] == "formal" and p["kind"] == "rational":
        xs = [SpectralSeries.linear(("u",), p["K"], {"u": 1})]
    else:
        xs = draw_rationals(rng, 2, avoid=(1, -1))
    for x in xs:
        ok, s, w = R.antisym_reduction(p["kind"], p["N"], p["K"], x)
        if not ok:
            return {"ok": False, "witness": w}
    return {"ok": True, "witness": None, "scalar": s.text()}


def _trig_step(p, ctx):
    rng = random.Random(p["seed"] * 1000003 + p["N"] * 10 + p["n1"])
    w = draw_rationals(rng, 1, avoid=(1, -1))[0]
    return _witness_report(B.trig_step_identity(p["N"], p["K"], p["n1"], p["n2"], w), ratio=w)


def _trig_suite(p, ctx):
    res = B.trig_identity_suite(p["K"], p["seed"])
    bad = [k for k, v in res.items() if v is False]
    return {"ok": not bad, "witness": bad or None, "items": res}


def _fock_rtt(p, ctx):
    ok, w, count = F.check_rtt_on_fock(p["N"], p["sign"], p["K"], p["max_level"])
    return {"ok": ok, "witness": w, "certified": count}


def _fock_rtt_control(p, ctx):
    ok, w, count = F.check_rtt_on_fock(p["N"], p["sign"], p["K"], p["max_level"], F.skewed_action)
    # a control passes when the broken action is detected
    return {"ok": not ok, "witness": None if not ok else "skewed action not detected", "detected": w}


def _fock_pi(p, ctx):
    eng = ctx.engine(p["N"], p["sign"], p["K"], p["L"])
    st = B.bethe_state(eng, p["n"], p["r"], p["sign"]).payload
    got = F.fock_eval(p["sign"], st, 1)
    want = F.pi_formula(p["N"], p["sign"], p["n"], p["r"])
    return {"ok": got == want, "witness": None if got == want else (got.text(), want.text())}


def _engine(p, ctx):
    return ctx.engine(p["N"], p["sign"], p["K"], p["L"])


def _over_inputs(fn, level):
    def run(p, ctx):
        eng = _engine(p, ctx)
        return A.merge([fn(eng, x) for x in A.basis_inputs(eng, level)])
    return run


def _module(name):
    fn = {"rll": A.check_rll, "hat_rll": A.check_hat_rll, "plus_exchange": A.check_plus_exchange,
          "minus_exchange": A.check_minus_exchange, "mixed_exchange": A.check_mixed_exchange,
          "recovery": A.check_module_recovery}[name]

    def run(p, ctx):
        eng = _engine(p, ctx)
        return A.merge([fn(eng, x) for x in A.basis_inputs(eng, p["input_level"])])
    return run


def _vacuum_identity(p, ctx):
    return A.check_vacuum_identity(_engine(p, ctx), p["n"])


def _block_rll(p, ctx):
    eng = _engine(p, ctx)
    return A.merge([A.check_block_rll(eng, x, p["n"], p["m"]) for x in A.basis_inputs(eng, p["input_level"])])


def _block_factorization(p, ctx):
    return A.check_block_factorization(_engine(p, ctx), p["n"], p["m"])


def _translation(p, ctx):
    return A.check_translation(_engine(p, ctx))


def _qva_vacuum(p, ctx):
    return A.check_vacuum_axioms(_engine(p, ctx))


def _braid(name):
    fn = {"unitarity": A.check_braid_unitarity, "ybe": A.check_braid_ybe, "shift": A.check_braid_shift}[name]
    return lambda p, ctx: fn(_engine(p, ctx))


def _triples(p, ctx, fn):
    eng = _engine(p, ctx)
    lets = A.single_letters(eng, 1)
    reps, rs = [], set()
    for k in range(1, p["k_max"] + 1):
        for u, v, w in product(lets, repeat=3):
            rep = fn(eng, u, v, w, k)
            rs.add(rep.get("r"))
            if not rep["ok"]:
                rep["witness"] = (k, u.text(), v.text(), w.text(), rep["witness"])
            reps.append(rep)
    out = A.merge(reps)
    out["clearing_exponents"] = sorted(rs)
    return out


def _locality(p, ctx):
    return _triples(p, ctx, A.check_locality)


def _associativity(p, ctx):
    return _triples(p, ctx, A.check_associativity)


def _hexagon(p, ctx):
    eng = _engine(p, ctx)
    lets = A.single_letters(eng, 1)
    reps = []
    for a, b, c in product(lets, repeat=3):
        rep = A.check_hexagon(eng, a, b, c)
        if not rep["ok"]:
            rep["witness"] = (a.text(), b.text(), c.text(), rep["witness"])
        reps.append(rep)
    return A.merge(reps)


def _bethe_pipeline(p, ctx):
    return B.check_vacuum_pipeline(_engine(p, ctx), p["n"])


def _commute(p, ctx):
    eng = _engine(p, ctx)
    rep = B.check_commute(eng, p["n1"], p["n2"], p["sign1"], p["sign2"], depth=p["depth"])
    rep.pop("pair", None)
    return rep


def _commute_control(p, ctx):
    eng = _engine(p, ctx)
    rep = B.check_commute(eng, p["n1"], p["n2"], depth=p["depth"], stretch=p["stretch"])
    return {"ok": not rep["ok"], "witness": None if not rep["ok"] else "off-fusion family still commutes",
            "detected": rep["witness"]}


def _central(p, ctx):
    return B.check_central(_engine(p, ctx), depth=p["depth"])


def _hat_chain_antisym(p, ctx):
    return B.check_hat_chain_antisym(p["N"], p["K"])


def _fused_antisym(p, ctx):
    return B.check_fused_antisym(_engine(p, ctx))


def _fixed_points(p, ctx):
    return B.check_fixed_point_suite(_engine(p, ctx), p["n"], p["m"])


def _fixed_point_control(p, ctx):
    eng = _engine(p, ctx)
    a = A.State.word(((1, 1, 2),))
    b = A.State.word(((1, 2, 1),))
    rep = B._braid_fixed(eng, A.tensor(a, b), "l112 (x) l121")
    return {"ok": not rep["ok"], "witness": None if not rep["ok"] else "generic pair reported fixed",
            "detected": rep["witness"]}


def _full_fixed_point(p, ctx):
    return B.check_full_fixed_point(_engine(p, ctx))


def _F_identity(p, ctx):
    return B.check_F_identity(p["N"], p["K"], p["n"])


def _independence(p, ctx):
    n, rank = B.independence_rank(_engine(p, ctx), 1, p["rmax"])
    return {"ok": rank == n, "witness": None if rank == n else "rank %d < %d" % (rank, n), "rank": rank}


def _basis_build(p, ctx):
    t = Truncation(p["N"], p["sign"], p["K"], p["M"], p["L"])
    tab = ctx.table(t)
    dims = {"m%d" % m: sum(len(ws) for ws in byl.values()) for m, byl in sorted(tab.canonical.items())}
    return {"ok": True, "witness": None, "dims": dims, "rewrites": len(tab.rewrite)}


def _basis_roundtrip(p, ctx):
    import tempfile
    t = Truncation(p["N"], p["sign"], p["K"], p["M"], p["L"])
    tab = ctx.table(t)
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "table.txt")
        cache_roundtrip(tab, path)
        with open(path) as fh:
            text = fh.read()
        # a tampered body must be rejected
        lines = text.split("\n")
        lines[2] = lines[2] + " "
        with open(path, "w") as fh:
            fh.write("\n".join(lines))
        try:
            read_cache(path)
        except ValueError:
            return {"ok": True, "witness": None}
    return {"ok": False, "witness": "tampered cache accepted"}


def _fock_rank(p, ctx):
    total, rank = F.fock_rank(p["N"], p["sign"], p["max_level"])
    return {"ok": True, "witness": None, "candidates": total, "rank": rank}


# registry: id -> (verb, description, runner)

REGISTRY = {
    "rmatrix.ybe": ("verify", "Yang-Baxter equation for the rational and trigonometric R-matrices", _ybe),
    "rmatrix.unitarity": ("verify", "unitarity R(u)R(-u)=1, and the trigonometric scalar product", _unitarity),
    "rmatrix.fusion": ("verify", "fused chain products equal the closed-form scalar times the projector",
                       _fusion),
    "rmatrix.antisym_reduction": ("verify", "antisymmetrizer absorbs the auxiliary chain into a scalar",
                                  _antisym),
    "rmatrix.trig_step": ("verify", "h-antisymmetrizers intertwine the trigonometric block chains", _trig_step),
    "rmatrix.trig_suite": ("verify", "all trigonometric identities at once", _trig_suite),
    "fock.rtt": ("verify", "quadratic relations annihilate the Fock modules", _fock_rtt),
    "fock.rtt_control": ("verify", "a relabeled non-module action is detected", _fock_rtt_control),
    "fock.pi_image": ("verify", "Fock images of the Bethe states match the t(n, r) formula mod h", _fock_pi),
    "module.rll": ("verify", "RLL relation for the full generator series", _module("rll")),
    "module.hat_rll": ("verify", "RLL relation with the polynomial R-matrix", _module("hat_rll")),
    "module.plus_exchange": ("verify", "exchange relation for L^+ with itself", _module("plus_exchange")),
    "module.minus_exchange": ("verify", "exchange relation for L^- with itself", _module("minus_exchange")),
    "module.mixed_exchange": ("verify", "mixed exchange relation between L^+ and L^-", _module("mixed_exchange")),
    "module.vacuum_identity": ("verify", "L_[n](u) 1 equals the product of L^+ on the vacuum",
                               _vacuum_identity),
    "module.block_rll": ("verify", "block RLL relation for L_[n] and L_[m]", _block_rll),
    "module.block_factorization": ("verify", "L_[n+m] factorizes through the inverse R-chain",
                                   _block_factorization),
    "module.recovery": ("verify", "the vertex pipeline recovers the module action", _module("recovery")),
    "module.translation": ("verify", "translation operator against its closed formula", _translation),
    "qva.vacuum": ("verify", "vacuum and creation axioms", _qva_vacuum),
    "qva.braid_unitarity": ("verify", "braiding unitarity on letter pairs", _braid("unitarity")),
    "qva.braid_ybe": ("verify", "braiding Yang-Baxter equation on letter triples", _braid("ybe")),
    "qva.braid_shift": ("verify", "braiding shift condition", _braid("shift")),
    "qva.locality": ("verify", "S-locality with computed clearing exponents", _locality),
    "qva.associativity": ("verify", "weak associativity with computed clearing exponents", _associativity),
    "qva.hexagon": ("verify", "hexagon identity for the braiding", _hexagon),
    "bethe.vacuum_pipeline": ("bethe", "Y(l_(n)(-1), z) 1 generates the Bethe states", _bethe_pipeline),
    "bethe.commute": ("bethe", "coefficients of two Bethe families commute", _commute),
    "bethe.commute_control": ("bethe", "families off the fusion points fail to commute", _commute_control),
    "bethe.central": ("bethe", "central series commutes with every generator coefficient", _central),
    "bethe.hat_chain_antisym": ("bethe", "antisymmetrizer reduction of the polynomial R-chain and its inverse",
                                _hat_chain_antisym),
    "bethe.fused_antisym": ("bethe", "the fused product absorbs the antisymmetrizer on both sides",
                            _fused_antisym),
    "bethe.fixed_points": ("bethe", "tensors of Bethe states are braiding fixed points", _fixed_points),
    "bethe.fixed_point_control": ("bethe", "a generic letter pair is not a braiding fixed point",
                                  _fixed_point_control),
    "bethe.full_fixed_point": ("bethe", "a (x) central state is fixed for every basis state a",
                               _full_fixed_point),
    "bethe.F_identity": ("bethe", "scalar factorization of the barred inverse chain", _F_identity),
    "bethe.independence": ("bethe", "the states l_(1)(-r) are linearly independent", _independence),
    "basis.build": ("basis", "build or load the basis table and report graded dimensions", _basis_build),
    "basis.roundtrip": ("basis", "cache roundtrip is exact and tampering is detected", _basis_roundtrip),
    "basis.fock_rank": ("basis", "rank of sorted-index words in the Fock module", _fock_rank),
}


# suites

def suite(verb, cfg):
    """CheckSpecs for a verb, built from the configuration."""
    seed, mode, L = cfg["seed"], cfg["mode"], cfg["max_level"]
    signs = _signs(cfg)
    out = []
    if verb == "verify":
        K8 = _K(cfg, 8)
        for N in _sizes(cfg, (2, 3)):
            for kind in ("yang", "plus", "minus", "hat", "trigHat"):
                out.append(spec("rmatrix.ybe", N=N, K=K8, kind=kind, draws=5, seed=seed,
                                mode="rational" if kind == "trigHat" else mode))
            for kind in ("plus", "minus"):
                out.append(spec("rmatrix.unitarity", N=N, K=K8, kind=kind, draws=5, seed=seed, mode=mode))
            out.append(spec("rmatrix.unitarity", N=N, K=K8, kind="trigHat", draws=3, seed=seed,
                            mode="rational"))
            for kind in ("rational", "trig"):
                out.append(spec("rmatrix.antisym_reduction", N=N, K=_K(cfg, 6), kind=kind, seed=seed,
                                mode=mode))
            for n1, n2 in ((1, 2), (2, 1), (2, 2)):
                out.append(spec("rmatrix.trig_step", N=N, K=_K(cfg, 6), n1=n1, n2=n2, seed=seed))
        for N in _sizes(cfg, (2, 3, 4)):
            for n in range(1, min(4, N) + 1):
                out.append(spec("rmatrix.fusion", N=N, K=_K(cfg, 6), n=n, kind="yang", fsign=1))
                out.append(spec("rmatrix.fusion", N=N, K=_K(cfg, 6), n=n, kind="yang", fsign=-1))
                out.append(spec("rmatrix.fusion", N=N, K=_K(cfg, 6), n=n, kind="plus"))
                out.append(spec("rmatrix.fusion", N=N, K=_K(cfg, 6), n=n, kind="minus"))
        for n in (1, 2, 3):
            out.append(spec("rmatrix.fusion", N=cfg["N"] or 3, K=_K(cfg, 6), n=n, kind="trig2"))
        out.append(spec("rmatrix.trig_suite", K=K8, seed=seed))
        K4 = _K(cfg, 4)
        N = cfg["N"] or 2
        for sg in signs:
            out.append(spec("fock.rtt", N=N, sign=sg, K=K4, max_level=4))
            out.append(spec("fock.rtt_control", N=N, sign=sg, K=K4, max_level=4))
            for n in (1, 2):
                for r in (1, 2, 3):
                    out.append(spec("fock.pi_image", N=N, sign=sg, K=K4, L=max(L, n + r - 1), n=n, r=r))
            base = dict(N=N, sign=sg, K=K4, L=L)
            for name in ("rll", "hat_rll", "plus_exchange", "minus_exchange", "mixed_exchange", "recovery"):
                out.append(spec("module." + name, input_level=2, **base))
            for n in (1, 2):
                out.append(spec("module.vacuum_identity", n=n, **base))
            out.append(spec("module.block_rll", n=1, m=1, input_level=1, **base))
            out.append(spec("module.block_factorization", n=1, m=1, **base))
            out.append(spec("module.translation", **base))
            out.append(spec("qva.vacuum", **base))
            for name in ("braid_unitarity", "braid_ybe", "braid_shift", "hexagon"):
                out.append(spec("qva." + name, **base))
            for name in ("locality", "associativity"):
                out.append(spec("qva." + name, k_max=min(4, K4), **base))
    elif verb == "bethe":
        K4 = _K(cfg, 4)
        N = cfg["N"] or 2
        for sg in signs:
            base = dict(N=N, sign=sg, K=K4, L=L)
            for n in range(1, N + 1):
                out.append(spec("bethe.vacuum_pipeline", n=n, **base))
            for n1 in range(1, N + 1):
                for n2 in range(n1, N + 1):
                    out.append(spec("bethe.commute", n1=n1, n2=n2, sign1=sg, sign2=sg, depth=4, **base))
            if N >= 2:
                out.append(spec("bethe.commute_control", n1=1, n2=2, depth=4, stretch=2, **base))
            for n in (1, 2):
                for m in (1, 2):
                    out.append(spec("bethe.fixed_points", N=N, sign=sg, K=K4, L=max(L, n + m), n=n, m=m))
            out.append(spec("bethe.fixed_point_control", **base))
        if -1 in signs:
            base = dict(N=N, sign=-1, K=K4, L=L)
            out.append(spec("bethe.central", depth=4, **base))
            out.append(spec("bethe.fused_antisym", **base))
            out.append(spec("bethe.full_fixed_point", **base))
            # mixed pairs: computed on the sign - algebra, reported only
            for n1 in range(1, N + 1):
                for n2 in range(1, N + 1):
                    out.append(spec("bethe.commute", "report-only", n1=n1, n2=n2, sign1=1, sign2=-1,
                                    depth=2, **base))
        for Nb in _sizes(cfg, (2, 3)):
            out.append(spec("bethe.hat_chain_antisym", N=Nb, K=K4))
        out.append(spec("bethe.F_identity", N=N, K=K4, n=1))
        out.append(spec("bethe.independence", N=N, sign=1, K=K4, L=max(L, 4), rmax=4))
    elif verb == "basis":
        K4 = _K(cfg, 4)
        N = cfg["N"] or 2
        M = cfg["max_len"] or L + K4 - 1
        for sg in signs:
            out.append(spec("basis.build", N=N, sign=sg, K=K4, M=M, L=L))
            out.append(spec("basis.roundtrip", N=N, sign=sg, K=K4, M=M, L=L))
            out.append(spec("basis.fock_rank", N=N, sign=sg, max_level=L))
    else:
        raise ValueError("unknown verb %r" % verb)
    if cfg.get("only"):
        keep = tuple(x.strip() for x in cfg["only"].split(",") if x.strip())
        out = [s for s in out if s.check_id.startswith(keep)]
    return sorted(set(out), key=CheckSpec.sort_key)


# running

def _alarm(signum, frame):
    raise ResourceLimit("wall-clock limit exceeded")


_CTX = None


def _ctx(cache_dir, guard):
    global _CTX
    if _CTX is None or _CTX.cache_dir != cache_dir or _CTX.max_len_guard != guard:
        _CTX = Context(cache_dir, guard)
    return _CTX


def validate(s):
    """Precondition checks before dispatch; returns a reason string or None."""
    p = s.p
    if s.check_id not in REGISTRY:
        return "unknown check id"
    if "n" in p and "N" in p and p["n"] > p["N"] and not s.check_id.startswith("rmatrix.fusion"):
        return "n exceeds N"
    if "sign" in p and p["sign"] not in (1, -1):
        return "sign must be +1 or -1"
    return None


def run_check(s, ctx=None, time_limit=None):
    """Dispatch one CheckSpec to its module; deterministic given the spec."""
    ctx = ctx or Context()
    p = s.p
    bad = validate(s)
    t0 = time.perf_counter()
    hits0 = ctx.hits
    if bad:
        return CheckResult(s.check_id, p, "skipped", bad, 0.0, 0, s.expected)
    runner = REGISTRY[s.check_id][2]
    use_alarm = time_limit and hasattr(signal, "SIGALRM")
    if use_alarm:
        old = signal.signal(signal.SIGALRM, _alarm)
        signal.setitimer(signal.ITIMER_REAL, time_limit)
    try:
        rep = runner(p, ctx)
        status = None
    except ResourceLimit as e:
        rep, status = {"witness": "skipped: %s" % e}, "skipped"
    except MemoryError:
        rep, status = {"witness": "skipped: memory exhausted"}, "skipped"
    finally:
        if use_alarm:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, old)
    ms = (time.perf_counter() - t0) * 1000.0
    detail = {k: v for k, v in rep.items() if k not in ("ok", "witness", "asserted")}
    witness = rep.get("witness")
    if status is None:
        if s.expected == "report-only":
            status = "report-only"
            detail["holds"] = rep["ok"]
        else:
            status = "pass" if rep["ok"] else "fail"
            if status == "fail" and witness is None:
                witness = "no witness supplied"
    return CheckResult(s.check_id, p, status, witness, ms, ctx.hits - hits0, s.expected, detail)


def _worker(args):
    s, cache_dir, guard, limit = args
    return run_check(s, _ctx(cache_dir, guard), limit)


def run_suite(specs, cfg, progress=None):
    args = [(s, cfg["cache_dir"], cfg["max_len_guard"], cfg["time_limit"]) for s in specs]
    if cfg["jobs"] > 1:
        with ProcessPoolExecutor(cfg["jobs"]) as ex:
            results = list(ex.map(_worker, args))
    else:
        results = []
        for a in args:
            r = _worker(a)
            if progress:
                progress(r)
            results.append(r)
    return results


def summarize(results):
    counts = {k: 0 for k in ("pass", "fail", "skipped", "report-only")}
    for r in results:
        counts[r.status] += 1
    counts["total"] = len(results)
    return counts


def emit_report(results, path, cfg=None):
    """JSON lines, ordered by check id then parameters, followed by a summary line."""
    results = sorted(results, key=lambda r: (r.check_id, json.dumps(_jsonable(r.params), sort_keys=True)))
    lines = [json.dumps(r.record(), sort_keys=True) for r in results]
    summary = {"summary": summarize(results)}
    if cfg is not None:
        summary["seed"] = cfg["seed"]
        summary["config"] = _jsonable({k: v for k, v in cfg.items()
                                        if k not in ("out", "cache_dir", "jobs", "time_limit")})
    lines.append(json.dumps(summary, sort_keys=True))
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    with open(path + ".timings.jsonl", "w") as fh:
        for r in results:
            fh.write(json.dumps({"check_id": r.check_id, "params": _jsonable(r.params),
                                 "elapsed_ms": round(r.elapsed_ms, 3), "cache_hits": r.cache_hits},
                                sort_keys=True) + "\n")
    return path


def read_report(path):
    recs, summary = [], None
    with open(path) as fh:
        for ln in fh:
            if not ln.strip():
                continue
            obj = json.loads(ln)
            if "summary" in obj:
                summary = obj
            else:
                recs.append(obj)
    return recs, summary


def aggregate(paths, out):
    """Merge several reports into one, recomputing the summary."""
    recs = []
    for p in paths:
        recs.extend(read_report(p)[0])
    recs.sort(key=lambda r: (r["check_id"], json.dumps(r["params"], sort_keys=True)))
    counts = {k: 0 for k in ("pass", "fail", "skipped", "report-only")}
    for r in recs:
        counts[r["status"]] += 1
    counts["total"] = len(recs)
    with open(out, "w") as fh:
        for r in recs:
            fh.write(json.dumps(r, sort_keys=True) + "\n")
        fh.write(json.dumps({"summary": counts, "sources": sorted(paths)}, sort_keys=True) + "\n")
    return counts


# command line

def _parser():
    ap = argparse.ArgumentParser(prog="artifact", description="Exact checks for the R-matrix algebra, "
                                 "its vacuum module, braiding and Bethe families.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="config file with a [defaults] section")
    common.add_argument("--N", type=int, dest="N")
    common.add_argument("--sign", choices=("+", "-", "both"))
    common.add_argument("--h-order", type=int, dest="h_order", help="K: work mod h^K")
    common.add_argument("--max-level", type=int, dest="max_level", help="L: certified level")
    common.add_argument("--max-len", type=int, dest="max_len", help="M: longest stored word")
    common.add_argument("--seed", type=int)
    common.add_argument("--mode", choices=("formal", "rational"))
    common.add_argument("--cache-dir", dest="cache_dir")
    common.add_argument("--out")
    common.add_argument("--time-limit", type=int, dest="time_limit", help="seconds per check")
    common.add_argument("--jobs", type=int)
    common.add_argument("--only", help="comma separated check id prefixes")
    common.add_argument("-q", "--quiet", action="store_true")
    sub = ap.add_subparsers(dest="verb", required=True)
    sub.add_parser("verify", parents=[common], help="R-matrix, Fock, module and braiding identities")
    sub.add_parser("basis", parents=[common], help="build, cache and inspect basis tables")
    sub.add_parser("bethe", parents=[common], help="Bethe families, centrality and fixed points")
    rp = sub.add_parser("report", parents=[common], help="aggregate report files")
    rp.add_argument("inputs", nargs="+")
    return ap


def main(argv=None):
    args = _parser().parse_args(argv)
    keys = ("N", "sign", "h_order", "max_level", "max_len", "seed", "mode", "cache_dir", "out",
            "time_limit", "jobs", "only")
    cfg = load_config(args.config, {k: getattr(args, k) for k in keys})
    if args.verb == "report":
        counts = aggregate(args.inputs, cfg["out"])
        print(json.dumps(counts, sort_keys=True))
        return 0 if counts["fail"] == 0 else 1
    specs = suite(args.verb, cfg)

    def progress(r):
        if not args.quiet:
            w = "" if r.status == "pass" else "  %s" % str(_jsonable(r.witness))[:160]
            print("%-12s %-28s %s%s" % (r.status, r.check_id, json.dumps(_jsonable(r.params), sort_keys=True),
                                        w), flush=True)

    results = run_suite(specs, cfg, progress)
    emit_report(results, cfg["out"], cfg)
    counts = summarize(results)
    print(json.dumps(counts, sort_keys=True))
    return 0 if counts["fail"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
