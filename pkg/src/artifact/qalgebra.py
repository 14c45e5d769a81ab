"""Truncations of the algebra generated by l_ij^(-r) subject to the RTT relation.

A letter is a tuple (r, i, j) standing for l_ij^(-r); a word is a tuple of
letters.  Relations are homogeneous for the grade g = level - (power of h),
so an element h^k w with w at level l has grade l - k.

Because the algebra is h-adically (topologically) free, the ideal must be
h-saturated.  We therefore set h = 1: with F the free algebra filtered by
level and J the ideal generated by the h = 1 relations, the part of the
truncated algebra of length m and grade g is

    F_m^{>=g} / (J cap F^{>=g} + F^{>=g+K}).

One elimination per length, with columns ordered by increasing level,
produces an echelon basis of J mod F^{>=T} (T = L + K) whose pivots are the
non-canonical words.  The remaining words at level l form a basis of the
h = 0 layer, and the reduced rows give the rewrite map.  A word at level
l carrying h^k rewrites into canonical words at levels l' >= l with
h^(k + l' - l).
"""

import hashlib
from dataclasses import dataclass
from itertools import product

from .scalars import binom, mpq, rat_text, parse_rat

FORMAT = "artifact-basis 1"


class WindowOverflow(Exception):
    """A word or product left the (M, L, K) window of a table."""


@dataclass(frozen=True)
class Truncation:
    N: int
    sign: int
    K: int
    M: int
    L: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.K < 1 or self.N < 1 or self.M < 0:
            raise ValueError("invalid truncation %r" % (self,))
        if self.M > self.L + self.K - 1:
            raise ValueError("max length M must stay below L + K (no words fit otherwise)")

    @property
    def T(self):
        """Exclusive bound on word levels stored in the table."""
        return self.L + self.K

    def text(self):
        return "N=%d sign=%s K=%d M=%d L=%d" % (self.N, "+" if self.sign > 0 else "-",
                                                self.K, self.M, self.L)


def level(w):
    return sum(x[0] for x in w)


def is_sorted(w):
    return all(w[a] <= w[a + 1] for a in range(len(w) - 1))


def letters(N, r):
    return [(r, i, j) for i in range(1, N + 1) for j in range(1, N + 1)]


def words(N, m, lev):
    """All words of length m and level lev, in lexicographic order."""
    if m == 0:
        if lev == 0:
            yield ()
        return
    for r in range(1, lev - m + 2):
        for x in letters(N, r):
            for w in words(N, m - 1, lev - r):
                yield (x,) + w


def sorted_words(N, m, lev):
    return (w for w in words(N, m, lev) if is_sorted(w))


def word_text(w):
    """1.1.2,2.2.1 for a word; tensor words (tuples of words) are joined by '|'."""
    if w and isinstance(w[0], tuple) and (not w[0] or isinstance(w[0][0], tuple)):
        return "|".join(word_text(x) for x in w)
    return ",".join("%d.%d.%d" % x for x in w) if w else "-"


def parse_word(s):
    s = s.strip()
    if s == "-":
        return ()
    return tuple(tuple(int(t) for t in x.split(".")) for x in s.split(","))


def _rcoef(sign, k):
    """(I, P) coefficients of (h/u)^k in the normalized R-matrix."""
    if k == 0:
        return 1, 0
    return sign ** k, -(sign ** (k - 1))


def _pair_terms(N, sign, g2, B, a, b, c, d, kmax, levmax):
    """Terms (k, word, coeff) of the u^A v^B coefficient of the RTT relation, A = g2 - 2 - B.

    Left side R(-u+v) L1(u) L2(v), minus right side L2(v) L1(u) R(u-v), both
    R factors expanded in negative powers of u; entry ((a,b),(c,d)).
    """
    A = g2 - 2 - B
    out = {}

    def add(k, w, cf):
        if cf:
            key = (k, w)
            out[key] = out.get(key, 0) + cf

    for k in range(0, kmax):
        cI, cP = _rcoef(sign, k)
        for p in ([0] if k == 0 else range(0, B + 1)):
            s = B - p + 1
            r = A + 1 + k + p
            if r < 1 or s < 1 or r + s > levmax:
                continue
            bc = binom(k + p - 1, p) if k > 0 else 1
            sg = (-1) ** k
            add(k, ((r, a, c), (s, b, d)), sg * bc * cI)
            add(k, ((r, b, c), (s, a, d)), sg * bc * cP)
            add(k, ((s, b, d), (r, a, c)), -bc * cI)
            add(k, ((s, b, c), (r, a, d)), -bc * cP)
    return {key: v for key, v in out.items() if v}


def pair_relations(N, sign, g2, K):
    """Homogeneous length-2 relation rows of grade g2, truncated mod h^K.

    Rows map (k, word) to integer coefficients.
    """
    rows = []
    levmax = g2 + K - 1
    if levmax < 2:
        return rows
    bmax = levmax + K + 2
    for B in range(0, bmax + 1):
        for a, b, c, d in product(range(1, N + 1), repeat=4):
            row = _pair_terms(N, sign, g2, B, a, b, c, d, K, levmax)
            if row:
                rows.append(row)
    return _dedupe(rows)


def _dedupe(rows):
    seen = set()
    out = []
    for r in rows:
        key = tuple(sorted(r.items()))
        if key not in seen:
            seen.add(key)
            out.append(r)
    return out


def generate_relations(trunc, m, g):
    """Relation rows of the piece (m, g): pair relations times sorted words on both sides.

    Each row maps (h-power, word) to a rational and is homogeneous in (m, g).
    """
    if m < 2:
        return []
    N, K = trunc.N, trunc.K
    rows = []
    for m1 in range(0, m - 1):
        m2 = m - 2 - m1
        # outer levels l1 + l2 = g - g2 with g2 the pair grade; pair levels g2 + k >= 2
        for l1 in range(m1, g + K):
            for l2 in range(m2, g + K - l1):
                g2 = g - l1 - l2
                if g2 + K - 1 < 2:
                    continue
                prs = pair_relations(N, trunc.sign, g2, K)
                if not prs:
                    continue
                for w1 in sorted_words(N, m1, l1):
                    for w2 in sorted_words(N, m2, l2):
                        for pr in prs:
                            row = {(k, w1 + w + w2): mpq(v) for (k, w), v in pr.items()}
                            rows.append(row)
    return rows


def _dehomogenized_pairs(N, sign, T):
    """h = 1 relations restricted to words of level < T.

    The family is polynomial in (g2, B) with bounded degrees, so a finite
    range spans everything; the margins below are checked in the tests.
    """
    gmin = 2 - T - 2
    rows = []
    for g2 in range(gmin, T):
        kmax = T - g2
        bmax = 2 * T - gmin + 2
        for B in range(0, bmax + 1):
            for a, b, c, d in product(range(1, N + 1), repeat=4):
                t = _pair_terms(N, sign, g2, B, a, b, c, d, kmax, T - 1)
                row = {}
                for (k, w), v in t.items():
                    row[w] = row.get(w, 0) + v
                row = {w: v for w, v in row.items() if v}
                if row:
                    rows.append(row)
    return _dedupe(rows)


def _colkey(w):
    # lowest level first; among equal levels unsorted words become pivots before sorted ones
    return (level(w), is_sorted(w), w)


def _eliminate(rows):
    """Echelon form: pivot (minimal column) -> row normalized to pivot coefficient 1."""
    piv = {}
    keycache = {}

    def key(c):
        k = keycache.get(c)
        if k is None:
            k = keycache[c] = _colkey(c)
        return k

    for row in rows:
        row = {c: mpq(v) for c, v in row.items() if v}
        while row:
            c = min(row, key=key)
            pr = piv.get(c)
            if pr is None:
                inv = 1 / row[c]
                piv[c] = {cc: v * inv for cc, v in row.items()}
                break
            f = row[c]
            for cc, vv in pr.items():
                nv = row.get(cc, 0) - f * vv
                if nv:
                    row[cc] = nv
                else:
                    row.pop(cc, None)
    return piv


def _back_substitute(piv):
    """Reduced rows: pivot word -> combination of canonical words (pivot excluded, sign flipped)."""
    order = sorted(piv, key=_colkey, reverse=True)
    red = {}
    for p in order:
        row = piv[p]
        out = {}
        for c, v in row.items():
            if c == p:
                continue
            sub = red.get(c)
            if sub is None:
                out[c] = out.get(c, 0) - v
            else:
                for cc, vv in sub.items():
                    out[cc] = out.get(cc, 0) - v * vv
        red[p] = {c: v for c, v in out.items() if v}
    return red


class BasisTable:
    """Canonical words and the rewrite map for one truncation."""

    def __init__(self, trunc, canonical, rewrite):
        self.trunc = trunc
        self.canonical = canonical      # m -> level -> list of words
        self.rewrite = rewrite          # non-canonical word -> {canonical word: coeff}
        self._canon = {w for lv in canonical.values() for ws in lv.values() for w in ws}
        self._cache = {}

    # grading helpers
    def piece(self, m, g):
        """Basis (h-power, word) of the graded piece (m, g)."""
        K = self.trunc.K
        out = []
        for k in range(K):
            out.extend((k, w) for w in self.canonical.get(m, {}).get(g + k, []))
        return out

    def gr_dim(self, m, lev):
        return len(self.canonical.get(m, {}).get(lev, []))

    def is_canonical(self, w):
        return w in self._canon

    def check_window(self, k, w):
        t = self.trunc
        if len(w) > t.M or level(w) - k > t.L:
            raise WindowOverflow("word %s with h^%d outside window (M=%d, L=%d)"
                                 % (word_text(w), k, t.M, t.L))

    def in_window(self, k, w):
        t = self.trunc
        return len(w) <= t.M and level(w) - k <= t.L

    def reduce_word(self, k, w):
        """Normal form of h^k * w as {(k', canonical word): coeff}."""
        K = self.trunc.K
        if k >= K:
            return {}
        self.check_window(k, w)
        if w in self._canon:
            return {(k, w): mpq(1)}
        rw = self.rewrite.get(w)
        if rw is None:
            raise WindowOverflow("word %s missing from table" % word_text(w))
        lv = level(w)
        out = {}
        for c, v in rw.items():
            kk = k + level(c) - lv
            if kk < K:
                out[(kk, c)] = v
        return out

    def normal_form(self, raw):
        """Canonicalize {(k, word): coeff} (any words) into a State."""
        out = {}
        for (k, w), v in raw.items():
            if not v:
                continue
            for key, c in self.reduce_word(k, w).items():
                nv = out.get(key, 0) + v * c
                if nv:
                    out[key] = nv
                else:
                    out.pop(key, None)
        return State(out)

    def normal_form_by_splitting(self, k, w, _memo=None):
        """Alternative reduction: resolve the leftmost non-canonical pair through the length-2 table."""
        K = self.trunc.K
        if k >= K:
            return {}
        self.check_window(k, w)
        memo = {} if _memo is None else _memo
        key = (k, w)
        if key in memo:
            return memo[key]
        # leftmost adjacent pair that the table rewrites (some unsorted pairs are canonical)
        inv = next((a for a in range(len(w) - 1) if w[a:a + 2] not in self._canon), None)
        if inv is None:
            res = self.reduce_word(k, w)
        else:
            pre, pair, post = w[:inv], w[inv:inv + 2], w[inv + 2:]
            res = {}
            # reduce the pair at the running h-power so it stays inside the window
            for (kk, p2), c in self.reduce_word(k, pair).items():
                for key2, c2 in self.normal_form_by_splitting(kk, pre + p2 + post, memo).items():
                    nv = res.get(key2, 0) + c * c2
                    if nv:
                        res[key2] = nv
                    else:
                        res.pop(key2, None)
        memo[key] = res
        return res

    def multiply(self, a, b):
        raw = {}
        for (k1, w1), c1 in a.terms.items():
            for (k2, w2), c2 in b.terms.items():
                key = (k1 + k2, w1 + w2)
                raw[key] = raw.get(key, 0) + c1 * c2
        return self.normal_form(raw)

    # serialization
    def body_text(self):
        lines = ["trunc " + self.trunc.text()]
        for m in sorted(self.canonical):
            for lv in sorted(self.canonical[m]):
                ws = self.canonical[m][lv]
                lines.append("canonical %d %d %s" % (m, lv, " ".join(word_text(w) for w in ws)))
        for w in sorted(self.rewrite, key=lambda x: (len(x), _colkey(x))):
            terms = " ".join("%s*%s" % (rat_text(v), word_text(c))
                             for c, v in sorted(self.rewrite[w].items(), key=lambda t: _colkey(t[0])))
            lines.append("rewrite %s = %s" % (word_text(w), terms))
        return "\n".join(lines) + "\n"

    def to_text(self):
        body = self.body_text()
        digest = hashlib.sha256(body.encode()).hexdigest()
        return "%s\nhash %s\n%s" % (FORMAT, digest, body)

    @classmethod
    def from_text(cls, text, trunc=None):
        head, hline, body = text.split("\n", 2)
        if head != FORMAT:
            raise ValueError("unsupported cache format %r" % head)
        digest = hline.split()[1]
        if hashlib.sha256(body.encode()).hexdigest() != digest:
            raise ValueError("cache hash mismatch")
        lines = body.splitlines()
        fields = dict(x.split("=") for x in lines[0].split()[1:])
        t = Truncation(int(fields["N"]), 1 if fields["sign"] == "+" else -1,
                       int(fields["K"]), int(fields["M"]), int(fields["L"]))
        if trunc is not None and t != trunc:
            raise ValueError("cache is for %s, wanted %s" % (t.text(), trunc.text()))
        canonical = {}
        rewrite = {}
        for ln in lines[1:]:
            if ln.startswith("canonical "):
                parts = ln.split(" ")
                m, lv = int(parts[1]), int(parts[2])
                canonical.setdefault(m, {})[lv] = [parse_word(x) for x in parts[3:] if x]
            elif ln.startswith("rewrite "):
                lhs, rhs = ln[len("rewrite "):].split(" = ")
                row = {}
                for term in rhs.split():
                    c, w = term.split("*")
                    row[parse_word(w)] = parse_rat(c)
                rewrite[parse_word(lhs)] = row
        return cls(t, canonical, rewrite)


def build_basis(trunc):
    """Construct the canonical basis and rewrite map for all lengths <= M."""
    N, T, M = trunc.N, trunc.T, trunc.M
    canonical = {0: {0: [()]}}
    rewrite = {}
    if M >= 1:
        canonical[1] = {r: [(x,) for x in letters(N, r)] for r in range(1, T)}
    prev = None
    for m in range(2, M + 1):
        if m == 2:
            rows = _dehomogenized_pairs(N, trunc.sign, T)
        else:
            rows = []
            for r in range(1, T):
                for x in letters(N, r):
                    for p, red in prev.items():
                        if level(p) + r >= T:
                            continue
                        full = {c: -v for c, v in red.items()}
                        full[p] = mpq(1)
                        r1 = {(x,) + w: c for w, c in full.items() if level(w) + r < T}
                        r2 = {w + (x,): c for w, c in full.items() if level(w) + r < T}
                        rows.append(r1)
                        rows.append(r2)
        piv = _eliminate(rows)
        red = _back_substitute(piv)
        prev = red
        rewrite.update(red)
        canonical[m] = {}
        for lv in range(m, T):
            canonical[m][lv] = [w for w in words(N, m, lv) if w not in piv]
    return BasisTable(trunc, canonical, rewrite)


class State:
    """Element of a truncated algebra: {(h-power, canonical word): rational}."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: mpq(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def vacuum(cls):
        return cls({(0, ()): 1})

    @classmethod
    def word(cls, w, k=0, c=1):
        return cls({(k, tuple(w)): c})

    def __add__(self, o):
        t = dict(self.terms)
        for key, v in o.terms.items():
            t[key] = t.get(key, 0) + v
        return State(t)

    def __neg__(self):
        return State({k: -v for k, v in self.terms.items()})

    def __sub__(self, o):
        return self + (-o)

    def scale(self, c):
        return State({k: v * c for k, v in self.terms.items()})

    def h_shift(self, n, K):
        return State({(k + n, w): v for (k, w), v in self.terms.items() if k + n < K})

    def is_zero(self):
        return not self.terms

    def __eq__(self, o):
        return isinstance(o, State) and self.terms == o.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def grades(self):
        return {level(w) - k for k, w in self.terms}

    def coefficient(self, w, K):
        from .scalars import HSeries
        c = [0] * K
        for (k, ww), v in self.terms.items():
            if ww == w:
                c[k] = v
        return HSeries(c, K)

    def text(self):
        if not self.terms:
            return "0"
        return " + ".join("%s*h^%d*[%s]" % (rat_text(v), k, word_text(w))
                          for (k, w), v in sorted(self.terms.items()))

    def __repr__(self):
        return "State(%s)" % self.text()
