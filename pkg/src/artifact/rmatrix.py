"""R-matrices, their inverses, ordered chain products and fusion evaluations.

Kinds: ``yang`` R(u) = I - hP/u, ``plus``/``minus`` R^{+-}(u) = u/(u -+ h) R(u),
``hat`` uI - hP, ``trig2`` the two-parameter trigonometric matrix and
``trigHat`` e^{-h/2} trig2(x, 1).

Arguments may be rationals, HSeries (e.g. c*h) or SpectralSeries linear
forms; the scalar type of the result follows the argument.
"""

from .scalars import ExpansionError, HSeries, SpectralSeries, exp_h, factorial, mpq
from .tensor import SparseOperator, compose, embed, perm_P, symmetrizer

KINDS = ("yang", "plus", "minus", "hat", "trig2", "trigHat")


def _lift(x, K):
    if isinstance(x, (HSeries, SpectralSeries)):
        return x
    return HSeries.const(mpq(x), K)


def _one(x, K):
    if isinstance(x, SpectralSeries):
        return SpectralSeries.constant(x.vars, x.K, 1, x.depth)
    return HSeries.const(1, K)


def h_over(x, K):
    """The scalar h/x, with x a unit, an h-multiple or a formal linear form."""
    x = _lift(x, K)
    if isinstance(x, SpectralSeries):
        return x.inv().h_mul(1)
    if x.is_unit():
        return x.inv().shift(1)
    if x.c[1]:
        return x.shift(-1).inv()
    raise ExpansionError("argument has h-valuation above one")


def _geometric(t, K, sign):
    """(1 - sign*t)^{-1}."""
    if isinstance(t, HSeries):
        return (1 - t * sign).inv()
    out = _one(t, K)
    term = out
    for _ in range(K + 1):
        term = term * t * sign
        if term.is_zero():
            break
        out = out + term
    else:
        raise ExpansionError("geometric series does not terminate mod h^K")
    return out


def _from_parts(N, a, b, one):
    """a*I + b*P on two factors (a, b scalars); one is the unit used for I-part 1."""
    items = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            if i == j:
                items[((i, i), (i, i))] = a + b
            else:
                items[((i, j), (i, j))] = a
                items[((i, j), (j, i))] = b
    return SparseOperator.from_indexed(N, 2, items)


def rbar_parts(kind, x, K):
    """(alpha, beta) with R(x) = alpha*I + beta*P for the rational kinds."""
    x = _lift(x, K)
    if kind == "hat":
        return x, HSeries.h(K, 1, -1) if not isinstance(x, SpectralSeries) else \
            SpectralSeries.constant(x.vars, x.K, HSeries.h(K, 1, -1), x.depth)
    t = h_over(x, K)
    one = _one(t, K)
    if kind == "yang":
        return one, -t
    if kind in ("plus", "minus"):
        f = _geometric(t, K, 1 if kind == "plus" else -1)
        return f, -(f * t)
    raise ValueError("not a rational kind: %r" % kind)


def trig2(N, K, x, y):
    """R(x, y) of the trigonometric family (x, y scalars)."""
    x, y = _lift(x, K), _lift(y, K)
    em, ep = exp_h(mpq(-1, 2), K), exp_h(mpq(1, 2), K)
    c = em - ep
    items = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            if i == j:
                items[((i, i), (i, i))] = x * em - y * ep
            else:
                items[((i, j), (i, j))] = x - y
                items[((i, j), (j, i))] = x * c if i > j else y * c
    return SparseOperator.from_indexed(N, 2, items)


def r_matrix(kind, N, K, x, y=None):
    if kind == "trig2":
        return trig2(N, K, x, y)
    if kind == "trigHat":
        x = _lift(x, K)
        return trig2(N, K, x, _one(x, K)).scale(exp_h(mpq(-1, 2), K))
    a, b = rbar_parts(kind, x, K)
    return _from_parts(N, a, b, _one(a, K))


def flip(op):
    """R_21 = P R_12 P."""
    P = perm_P(op.N)
    return compose(compose(P, op), P)


def r_matrix_inverse(kind, N, K, x):
    x = _lift(x, K)
    if kind in ("plus", "minus"):
        return r_matrix(kind, N, K, -x)
    if kind == "yang":
        t = h_over(x, K)
        g = (1 - t * t)
        g = g.inv()
        return _from_parts(N, g, t * g, None)
    if kind == "hat":
        # invert x itself: recovering 1/x from h/x would lose the top h-coefficient
        xi = x.inv()
        t = xi.h_mul(1) if isinstance(xi, SpectralSeries) else xi.shift(1)
        q = xi * xi * _geometric(t * t, K, 1)
        return _from_parts(N, x * q, q * HSeries.h(K, 1, 1) if not isinstance(q, SpectralSeries)
                           else q.h_mul(1), None)
    if kind == "trigHat":
        # from the unitarity identity: inverse = e^{-h/2} R_21(1, x) / ((e^{-h}x - 1)(e^{-h} - x))
        if not isinstance(x, SpectralSeries):
            raise ExpansionError("trigHat inverse is only available for formal x")
        one = _one(x, K)
        emh = exp_h(-1, K)
        den = (x * emh - one) * (one * emh - x)
        num = flip(trig2(N, K, one, x)).scale(exp_h(mpq(-1, 2), K))
        return num.scale(den.inv())
    raise ValueError("no inverse for kind %r" % kind)


def trig_unitarity_scalar(K, x):
    """(e^{-h}x - 1)(e^{-h}x^{-1} - 1) for formal x (Laurent) or rational x."""
    emh = exp_h(-1, K)
    x = _lift(x, K)
    if isinstance(x, SpectralSeries):
        xi = SpectralSeries.monomial(x.vars, K, (-1,) + (0,) * (len(x.vars) - 1), 1, x.depth)
        one = _one(x, K)
        return (x * emh - one) * (xi * emh - one)
    return (x * emh - 1) * (x.inv() * emh - 1)


# ordered chain products

def chain_pairs_n(n):
    """Factor order of R_[n]: i increasing, j > i increasing."""
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def chain_pairs_nm(n, m, bar1=False, bar2=False):
    """Factor order of R_{nm}^{12} and its barred variants.

    Unbarred block 1 runs i upward, barred downward; unbarred block 2 runs
    j downward, barred upward.  Second-block factors are numbered n+1..n+m.
    """
    if n < 0 or m < 0:
        raise ValueError("block sizes must be nonnegative")
    ii = list(range(n, 0, -1)) if bar1 else list(range(1, n + 1))
    jj = list(range(n + 1, n + m + 1)) if bar2 else list(range(n + m, n, -1))
    return [(i, j) for i in ii for j in jj]


def chain_product(kind, N, K, nfactors, pairs, arg):
    """Product over ``pairs`` (in order) of R_ij(arg(i, j)).

    For ``trig2`` the callable returns the pair (x, y).
    """
    out = None
    for i, j in pairs:
        a = arg(i, j)
        R = r_matrix(kind, N, K, *a) if kind == "trig2" else r_matrix(kind, N, K, a)
        E = embed(R, (i, j), nfactors)
        out = E if out is None else compose(out, E)
    if out is None:
        return SparseOperator.identity(N, nfactors, HSeries.const(1, K))
    return out


def alpha(n):
    """n! prod_{i<j} (j-i)/(j-i+1)."""
    a = mpq(factorial(n))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            a *= mpq(j - i, j - i + 1)
    return a


def _quotient(op, E):
    """Scalar c with op = c*E, or raise with the first witness."""
    if not E.entries:
        raise ValueError("reference operator vanishes")
    key = min(E.entries)
    c = op.entries.get(key)
    if c is None:
        raise AssertionError("not proportional: entry %r vanishes" % (key,))
    e = E.entries[key]
    if isinstance(e, HSeries):
        # e must be a unit to divide
        c = c * e.inv()
    elif isinstance(e, SpectralSeries):
        c = c * e.inv()
    else:
        c = c * (1 / mpq(e))
    diff = op - E.scale(c)
    if not diff.is_zero():
        raise AssertionError("not proportional: first difference at %r" % (op.first_difference(E.scale(c)),))
    return c


def fusion_points(n, sign):
    return [sign * (i - 1) for i in range(1, n + 1)]


def fusion_evaluate(kind, n, N, K, sign=None):
    """Evaluate the fused chain and return (operator, scalar, reference).

    Rational kinds use u_i = sign*(i-1)h (plus: sign +, minus: sign -;
    yang needs an explicit sign).  trig2 uses x e^{-(i-1)h} with x formal.
    """
    if kind == "trig2":
        vars_ = ("x",)
        x = SpectralSeries.monomial(vars_, K, (1,), 1)
        xs = [x * exp_h(-(i - 1), K) for i in range(1, n + 1)]
        op = chain_product("trig2", N, K, n, chain_pairs_n(n), lambda i, j: (xs[i - 1], xs[j - 1]))
        ref = symmetrizer(n, N, "h-antisym", K)
        ref = ref.map(lambda v: SpectralSeries.constant(vars_, K, v))
        return op, _quotient(op, ref), ref
    if kind == "plus":
        sign = 1
    elif kind == "minus":
        sign = -1
    elif kind != "yang" or sign not in (1, -1):
        raise ValueError("fusion needs kind plus/minus/trig2, or yang with a sign")
    c = fusion_points(n, sign)

    def arg(i, j):
        # consecutive evaluation at an exact h-multiple; never divides by a non-unit
        return HSeries.h(K, 1, c[i - 1] - c[j - 1])

    op = chain_product(kind, N, K, n, chain_pairs_n(n), arg)
    ref = symmetrizer(n, N, "sym" if sign == 1 else "antisym")
    ref = ref.map(lambda v: HSeries.const(v, K))
    return op, _quotient(op, ref), ref


def trig_fusion_scalar(n, K):
    """n! prod_{0<=i<j<=n-1} (e^{-ih} - e^{-jh}) (the x-power is separate)."""
    s = HSeries.const(factorial(n), K)
    for i in range(n):
        for j in range(i + 1, n):
            s = s * (exp_h(-i, K) - exp_h(-j, K))
    return s


def antisym_reduction(kind, N, K, x):
    """Check A_(N) R_{0N}(x+(N-1)h)...R_{01}(x) = A_(N)*scalar; return (ok, scalar, witness).

    Factor 0 is position 1; the antisymmetrizer acts on positions 2..N+1.
    ``kind`` is ``rational`` (Yang matrices, scalar 1 - h/x) or ``trig``
    (trigHat at x e^{(a-1)h}, scalar from the product formula).
    """
    n = N + 1
    x = _lift(x, K)
    one = _one(x, K)
    if kind == "rational":
        A = symmetrizer(N, N, "antisym")
        factors = [r_matrix("yang", N, K, x + HSeries.h(K, 1, a - 1) if not isinstance(x, SpectralSeries)
                            else x + SpectralSeries.constant(x.vars, K, HSeries.h(K, 1, a - 1), x.depth))
                   for a in range(N, 0, -1)]
        scalar = one - h_over(x, K)
    elif kind == "trig":
        A = symmetrizer(N, N, "h-antisym", K)
        factors = [r_matrix("trigHat", N, K, x * exp_h(a - 1, K)) for a in range(N, 0, -1)]
        scalar = (x * exp_h(-1, K) - one) * exp_h(mpq(-(N - 1), 2), K)
        for i in range(2, N + 1):
            scalar = scalar * (x * exp_h(i - 1, K) - one)
    else:
        raise ValueError("kind must be rational or trig")
    conv = (lambda v: v * one)
    Aop = embed(A.map(conv), tuple(range(2, n + 1)), n)
    chain = None
    for a, R in zip(range(N, 0, -1), factors):
        E = embed(R, (1, a + 1), n)
        chain = E if chain is None else compose(chain, E)
    lhs = compose(Aop, chain)
    rhs = Aop.scale(scalar)
    w = lhs.first_difference(rhs)
    return w is None, scalar, w


def f_scalar(N, K, x):
    """f(x) = (x - h) prod_{i=1}^{N-1} (x + ih)."""
    x = _lift(x, K)
    one = _one(x, K)
    hh = lambda c: (SpectralSeries.constant(x.vars, K, HSeries.h(K, 1, c), x.depth)
                    if isinstance(x, SpectralSeries) else HSeries.h(K, 1, c))
    out = x - hh(1)
    for i in range(1, N):
        out = out * (x + hh(i))
    return out * one


# identity checks (witness is None on success)

def ybe_witness(kind, N, K, u, v):
    """R_12(u) R_13(u+v) R_23(v) - R_23(v) R_13(u+v) R_12(u): first differing entry or None."""
    u, v = _lift(u, K), _lift(v, K)
    R = lambda a, pos: embed(r_matrix(kind, N, K, a), pos, 3)
    lhs = compose(compose(R(u, (1, 2)), R(u + v, (1, 3))), R(v, (2, 3)))
    rhs = compose(compose(R(v, (2, 3)), R(u + v, (1, 3))), R(u, (1, 2)))
    return lhs.first_difference(rhs)


def unitarity_witness(kind, N, K, u):
    """R(u) R(-u) = 1 for the normalized kinds (plus, minus)."""
    u = _lift(u, K)
    lhs = compose(r_matrix(kind, N, K, u), r_matrix(kind, N, K, -u))
    return lhs.first_difference(SparseOperator.identity(N, 2, HSeries.const(1, K)))


def fusion_check(kind, n, N, K, sign=None):
    """(ok, quotient, expected): yang fuses to n! E, plus/minus to alpha_n E."""
    _op, c, _ref = fusion_evaluate(kind, n, N, K, sign)
    want = HSeries.const(factorial(n) if kind == "yang" else alpha(n), K)
    return c == want, c, want
