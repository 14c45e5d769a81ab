"""Sparse operators on (C^N)^{tensor n} over an arbitrary exact scalar ring.

Multi-indices (i_1, ..., i_n) with entries in 1..N are stored as base-N
integers, factor 1 being the most significant digit.  Scalars only need
+, -, * and a zero test (``scalars.is_zero``).
"""

from itertools import permutations, product

from .scalars import HSeries, exp_h, factorial, is_zero, mpq


def encode(idx, N):
    x = 0
    for i in idx:
        x = x * N + (i - 1)
    return x


def decode(x, N, n):
    out = [0] * n
    for a in range(n - 1, -1, -1):
        x, r = divmod(x, N)
        out[a] = r + 1
    return tuple(out)


class SparseOperator:
    __slots__ = ("N", "n", "entries")

    def __init__(self, N, n, entries=None):
        self.N = N
        self.n = n
        self.entries = {k: v for k, v in (entries or {}).items() if not is_zero(v)}

    @classmethod
    def identity(cls, N, n, one=1):
        return cls(N, n, {(r, r): one for r in range(N ** n)})

    @classmethod
    def from_indexed(cls, N, n, items):
        """Build from ((row tuple), (col tuple)) -> scalar."""
        out = {}
        for (r, c), v in items.items():
            key = (encode(r, N), encode(c, N))
            out[key] = out[key] + v if key in out else v
        return cls(N, n, out)

    def indexed(self):
        return {(decode(r, self.N, self.n), decode(c, self.N, self.n)): v
                for (r, c), v in self.entries.items()}

    def get(self, row, col, default=0):
        return self.entries.get((encode(row, self.N), encode(col, self.N)), default)

    def _same(self, o):
        if (self.N, self.n) != (o.N, o.n):
            raise ValueError("operator shapes differ")

    def __add__(self, o):
        self._same(o)
        e = dict(self.entries)
        for k, v in o.entries.items():
            e[k] = e[k] + v if k in e else v
        return SparseOperator(self.N, self.n, e)

    def __neg__(self):
        return SparseOperator(self.N, self.n, {k: -v for k, v in self.entries.items()})

    def __sub__(self, o):
        return self + (-o)

    def scale(self, c):
        return SparseOperator(self.N, self.n, {k: c * v for k, v in self.entries.items()})

    def map(self, f):
        return SparseOperator(self.N, self.n, {k: f(v) for k, v in self.entries.items()})

    def __matmul__(self, o):
        return compose(self, o)

    def is_zero(self):
        return not self.entries

    def __eq__(self, o):
        if not isinstance(o, SparseOperator):
            return NotImplemented
        return (self - o).is_zero()

    def first_difference(self, o):
        """(row, col, self value, other value) of the first differing entry, or None."""
        d = self - o
        if d.is_zero():
            return None
        r, c = min(d.entries)
        zero = 0
        return (decode(r, self.N, self.n), decode(c, self.N, self.n),
                self.entries.get((r, c), zero), o.entries.get((r, c), zero))

    def __repr__(self):
        return "SparseOperator(N=%d, n=%d, nnz=%d)" % (self.N, self.n, len(self.entries))


def compose(a, b):
    a._same(b)
    rows = {}
    for (k, c), v in b.entries.items():
        rows.setdefault(k, []).append((c, v))
    out = {}
    for (r, k), v in a.entries.items():
        for c, w in rows.get(k, ()):
            p = v * w
            key = (r, c)
            out[key] = out[key] + p if key in out else p
    return SparseOperator(a.N, a.n, out)


def matrix_unit(N, i, j, one=1):
    return SparseOperator(N, 1, {(i - 1, j - 1): one})


def perm_P(N, one=1):
    """The flip operator P = sum e_ij (x) e_ji on two factors."""
    return SparseOperator.from_indexed(N, 2, {((i, j), (j, i)): one
                                              for i in range(1, N + 1) for j in range(1, N + 1)})


def embed(op, positions, n):
    positions = tuple(positions)
    k = op.n
    N = op.N
    if len(positions) != k or len(set(positions)) != k:
        raise ValueError("positions must be %d distinct factors" % k)
    if any(p < 1 or p > n for p in positions):
        raise ValueError("positions out of range 1..%d" % n)
    rest = [a for a in range(1, n + 1) if a not in positions]
    weights = [N ** (n - a) for a in range(1, n + 1)]
    local = [(decode(r, N, k), decode(c, N, k), v) for (r, c), v in op.entries.items()]
    out = {}
    for other in product(range(N), repeat=len(rest)):
        base = sum(weights[a - 1] * x for a, x in zip(rest, other))
        for ri, ci, v in local:
            r = base + sum(weights[p - 1] * (x - 1) for p, x in zip(positions, ri))
            c = base + sum(weights[p - 1] * (x - 1) for p, x in zip(positions, ci))
            out[(r, c)] = v
    return SparseOperator(N, n, out)


def partial_trace(op, subset):
    subset = sorted(set(subset))
    N, n = op.N, op.n
    if any(a < 1 or a > n for a in subset):
        raise ValueError("trace factors out of range")
    keep = [a for a in range(1, n + 1) if a not in subset]
    out = {}
    for (r, c), v in op.entries.items():
        ri, ci = decode(r, N, n), decode(c, N, n)
        if all(ri[a - 1] == ci[a - 1] for a in subset):
            key = (encode([ri[a - 1] for a in keep], N), encode([ci[a - 1] for a in keep], N))
            out[key] = out[key] + v if key in out else v
    return SparseOperator(N, len(keep), out)


def full_trace(op):
    t = partial_trace(op, range(1, op.n + 1))
    return t.entries.get((0, 0), 0)


def transpose_factor(op, i):
    N, n = op.N, op.n
    if i < 1 or i > n:
        raise ValueError("factor out of range")
    out = {}
    for (r, c), v in op.entries.items():
        ri, ci = list(decode(r, N, n)), list(decode(c, N, n))
        ri[i - 1], ci[i - 1] = ci[i - 1], ri[i - 1]
        out[(encode(ri, N), encode(ci, N))] = v
    return SparseOperator(N, n, out)


def h_flip(N, K):
    """P^h = sum e_ii(x)e_ii + e^{h/2} sum_{i>j} e_ij(x)e_ji + e^{-h/2} sum_{i<j} e_ij(x)e_ji."""
    one = HSeries.const(1, K)
    up, down = exp_h(mpq(1, 2), K), exp_h(mpq(-1, 2), K)
    items = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            items[((i, j), (j, i))] = one if i == j else (up if i > j else down)
    return SparseOperator.from_indexed(N, 2, items)


def _reduced_word(p):
    """Adjacent transpositions s_a (as a) with p = s_{a1} s_{a2} ... (bubble sort)."""
    p = list(p)
    word = []
    n = len(p)
    changed = True
    while changed:
        changed = False
        for a in range(n - 1):
            if p[a] > p[a + 1]:
                p[a], p[a + 1] = p[a + 1], p[a]
                word.append(a + 1)
                changed = True
    return word


def permutation_op(p, N, variant="classical", K=None):
    """Operator of the permutation p (tuple of images of 1..n).

    Classical: sends e_{i_1}(x)...(x)e_{i_n} to the vector whose factor p(a)
    carries i_a.  The h-deformed variant is the product of P^h over a
    reduced word of adjacent transpositions.
    """
    n = len(p)
    if sorted(p) != list(range(1, n + 1)):
        raise ValueError("not a permutation of 1..%d" % n)
    if variant == "classical":
        items = {}
        for idx in product(range(1, N + 1), repeat=n):
            out = [0] * n
            for a in range(n):
                out[p[a] - 1] = idx[a]
            items[(tuple(out), idx)] = 1
        return SparseOperator.from_indexed(N, n, items)
    if variant != "h-deformed":
        raise ValueError("unknown variant %r" % variant)
    if K is None:
        raise ValueError("h-deformed permutations need K")
    one = HSeries.const(1, K)
    op = SparseOperator.identity(N, n, one)
    if n == 1:
        return op
    flip = h_flip(N, K)
    # bubble sort gives p s_{a1} ... s_{ak} = id, so p = s_{ak} ... s_{a1}
    for a in reversed(_reduced_word(p)):
        op = op @ embed(flip, (a, a + 1), n)
    return op


def _sign(p):
    return -1 if len(_reduced_word(p)) % 2 else 1


def symmetrizer(n, N, kind="sym", K=None):
    """H_(n), A_(n) or the h-deformed A^h_(n), normalized to be idempotent."""
    nf = factorial(n)
    if kind in ("sym", "antisym"):
        acc = {}
        for p in permutations(range(1, n + 1)):
            s = 1 if kind == "sym" else _sign(p)
            for k, v in permutation_op(p, N).entries.items():
                acc[k] = acc.get(k, 0) + s * v
        return SparseOperator(N, n, {k: mpq(v, nf) for k, v in acc.items()})
    if kind != "h-antisym":
        raise ValueError("unknown symmetrizer kind %r" % kind)
    total = SparseOperator(N, n)
    for p in permutations(range(1, n + 1)):
        op = permutation_op(p, N, "h-deformed", K)
        total = total + (op if _sign(p) == 1 else -op)
    return total.scale(mpq(1, nf))


def convert(op, f):
    """Apply a scalar conversion to every entry (e.g. rational -> HSeries)."""
    return op.map(f)
