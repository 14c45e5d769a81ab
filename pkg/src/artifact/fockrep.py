"""The polynomial / exterior Fock modules, l_ij^(-r) acting as x_i y_j t_r.

For sign + all variables commute.  For sign - the x's generate an exterior
algebra, the y's another one, and the two factors commute with each other
and with the t's (plain tensor product).  A monomial is stored as
(h-power, xs, ys, ts) with sorted index tuples.
"""

from itertools import product

from .qalgebra import State, pair_relations, sorted_words, word_text
from .scalars import mpq, rat_text


def _insert(idx, seq, exterior):
    """Insert idx into the sorted tuple seq; return (sign, new tuple) or (0, None)."""
    pos = 0
    while pos < len(seq) and seq[pos] < idx:
        pos += 1
    if exterior:
        if pos < len(seq) and seq[pos] == idx:
            return 0, None
        sign = -1 if pos % 2 else 1
    else:
        sign = 1
    return sign, seq[:pos] + (idx,) + seq[pos:]


class FockElement:
    __slots__ = ("sign", "terms")

    def __init__(self, sign, terms=None):
        self.sign = sign
        self.terms = {k: mpq(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def one(cls, sign):
        return cls(sign, {(0, (), (), ()): 1})

    def __add__(self, o):
        t = dict(self.terms)
        for k, v in o.terms.items():
            t[k] = t.get(k, 0) + v
        return FockElement(self.sign, t)

    def scale(self, c):
        return FockElement(self.sign, {k: v * c for k, v in self.terms.items()})

    def truncate(self, K):
        return FockElement(self.sign, {k: v for k, v in self.terms.items() if k[0] < K})

    def is_zero(self):
        return not self.terms

    def __eq__(self, o):
        return isinstance(o, FockElement) and self.sign == o.sign and self.terms == o.terms

    def text(self):
        out = []
        for (k, xs, ys, ts), v in sorted(self.terms.items()):
            mono = "".join("x%d" % i for i in xs) + "".join("y%d" % j for j in ys) + \
                "".join("t%d" % r for r in ts)
            out.append("%s*h^%d*%s" % (rat_text(v), k, mono or "1"))
        return " + ".join(out) or "0"

    __repr__ = text


def default_action(letter):
    r, i, j = letter
    return i, j, r


def shifted_action(letter):
    """t_{r+1} in place of t_r: a relabeling of the t's, hence again a module."""
    r, i, j = letter
    return i, j, r + 1


def skewed_action(letter):
    """t_{r+1} only for i < j: breaks the relations (negative control)."""
    r, i, j = letter
    return i, j, r + (1 if i < j else 0)


def fock_act(sign, letter, v, action=default_action):
    i, j, r = action(letter)
    ext = sign < 0
    out = {}
    for (k, xs, ys, ts), c in v.terms.items():
        s1, nx = _insert(i, xs, ext)
        if not s1:
            continue
        s2, ny = _insert(j, ys, ext)
        if not s2:
            continue
        _, nt = _insert(r, ts, False)
        key = (k, nx, ny, nt)
        out[key] = out.get(key, 0) + s1 * s2 * c
    return FockElement(sign, out)


def fock_word(sign, k, w, v, action=default_action):
    """h^k * w acting on v (rightmost letter first)."""
    for letter in reversed(w):
        v = fock_act(sign, letter, v, action)
        if v.is_zero():
            break
    return FockElement(sign, {(key[0] + k,) + key[1:]: c for key, c in v.terms.items()})


def fock_eval(sign, s, K=None, v=None, action=default_action):
    """Image of a State (or raw {(k, word): c} map) applied to v (default 1)."""
    terms = s.terms if isinstance(s, State) else s
    base = v if v is not None else FockElement.one(sign)
    acc = FockElement(sign)
    for (k, w), c in terms.items():
        acc = acc + fock_word(sign, k, w, base, action).scale(c)
    return acc.truncate(K) if K is not None else acc


def spanning_vectors(N, sign, max_level=2):
    """Images of sorted words of level <= max_level on 1."""
    out = []
    for lv in range(0, max_level + 1):
        for m in range(0, lv + 1):
            for w in sorted_words(N, m, lv):
                e = fock_word(sign, 0, w, FockElement.one(sign))
                if not e.is_zero():
                    out.append((w, e))
    return out


def check_rtt_on_fock(N, sign, K, max_level=4, action=default_action, span_level=2):
    """Every pair relation with terms at levels <= max_level kills the spanning vectors mod h^K.

    Returns (ok, witness, count); witness is (relation text, vector word) or None.
    """
    vecs = spanning_vectors(N, sign, span_level)
    count = 0
    for g2 in range(2 - K + 1, max_level + 1):
        # rows are homogeneous (level = g2 + k), so capping levels means capping h
        kk = min(K, max_level - g2 + 1)
        for row in pair_relations(N, sign, g2, kk):
            for w, vec in vecs:
                count += 1
                img = fock_eval(sign, row, kk, vec, action)
                if not img.is_zero():
                    text = " + ".join("%s*h^%d*[%s]" % (rat_text(c), k, word_text(ww))
                                      for (k, ww), c in sorted(row.items()))
                    return False, (text, word_text(w), img.text()), count
    return True, None, count


def t_poly(n, r):
    """t(n, r): sum over compositions r_1 + ... + r_n = n + r - 1 of t_{r_1}...t_{r_n}, as {ts: coeff}."""
    out = {}

    def rec(left, parts, acc):
        if parts == 0:
            if left == 0:
                key = tuple(sorted(acc))
                out[key] = out.get(key, 0) + 1
            return
        for x in range(1, left - parts + 2):
            rec(left - x, parts - 1, acc + [x])

    rec(n + r - 1, n, [])
    return out


def pi_formula(N, sign, n, r):
    """Predicted image of the Bethe coefficient mod h, as a FockElement."""
    acc = FockElement(sign)
    tp = t_poly(n, r)
    if sign > 0:
        idx_iter = product(range(1, N + 1), repeat=n)
        factor = 1
    else:
        idx_iter = (c for c in product(range(1, N + 1), repeat=n)
                    if all(c[a] < c[a + 1] for a in range(n - 1)))
        from .scalars import factorial
        factor = factorial(n)
    for idx in idx_iter:
        for ts, c in tp.items():
            # x_{i1} y_{i1} ... x_{in} y_{in} t_...: build by acting letter by letter
            v = FockElement(sign, {(0, (), (), ts): c * factor})
            for i in reversed(idx):
                v = _mul_xy(sign, i, i, v)
            acc = acc + v
    return acc


def _mul_xy(sign, i, j, v):
    ext = sign < 0
    out = {}
    for (k, xs, ys, ts), c in v.terms.items():
        s1, nx = _insert(i, xs, ext)
        if not s1:
            continue
        s2, ny = _insert(j, ys, ext)
        if not s2:
            continue
        key = (k, nx, ny, ts)
        out[key] = out.get(key, 0) + s1 * s2 * c
    return FockElement(sign, out)


def fock_rank(N, sign, max_level):
    """Rank of the images of sorted-index words (Fock basis candidates) up to max_level."""
    vecs = []
    for lv in range(0, max_level + 1):
        for m in range(0, lv + 1):
            for w in sorted_words(N, m, lv):
                ii = [x[1] for x in w]
                jj = [x[2] for x in w]
                if sign > 0:
                    okk = ii == sorted(ii) and jj == sorted(jj)
                else:
                    okk = all(ii[a] < ii[a + 1] for a in range(m - 1)) and \
                        all(jj[a] < jj[a + 1] for a in range(m - 1))
                if okk:
                    vecs.append(fock_word(sign, 0, w, FockElement.one(sign)))
    return len(vecs), _rank([v.terms for v in vecs])


def _rank(rows):
    piv = {}
    for row in rows:
        row = dict(row)
        while row:
            c = min(row)
            pr = piv.get(c)
            if pr is None:
                piv[c] = {cc: v / row[c] for cc, v in row.items()}
                break
            f = row[c]
            for cc, vv in pr.items():
                nv = row.get(cc, 0) - f * vv
                if nv:
                    row[cc] = nv
                else:
                    row.pop(cc, None)
    return len(piv)
