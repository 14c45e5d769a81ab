"""Exact scalars: rationals, truncated h-series and multivariate spectral series.

The spectral series keep the ordering of their variables fixed.  An inverse
of a linear form is always expanded in nonnegative powers of the variables
listed later, so the earliest variable with a nonzero coefficient is the
"large" one.  The formal parameter h counts as the last (smallest) variable.
"""


import gmpy2
from gmpy2 import mpq

Rational = mpq

_ZERO = mpq(0)
_ONE = mpq(1)


class ExpansionError(ValueError):
    """An expansion or substitution that is not defined in the chosen region."""


def rat(x, y=1):
    if isinstance(x, str):
        return parse_rat(x)
    return mpq(x, y) if y != 1 else mpq(x)


def rat_text(q):
    q = mpq(q)
    return "%d/%d" % (q.numerator, q.denominator)


def parse_rat(s):
    s = s.strip()
    if "/" in s:
        a, b = s.split("/")
        return mpq(int(a), int(b))
    return mpq(int(s))


def binom(n, k):
    """Generalized binomial coefficient C(n, k) for integer n and k >= 0."""
    if k < 0:
        return 0
    if n >= 0:
        return int(gmpy2.comb(n, k)) if k <= n else 0
    # C(-m, k) = (-1)^k C(m+k-1, k)
    return (-1) ** k * int(gmpy2.comb(-n + k - 1, k))


def factorial(n):
    return int(gmpy2.fac(n))


def is_zero(x):
    z = getattr(x, "is_zero", None)
    if z is not None:
        return z()
    return x == 0


class HSeries:
    """Power series in h truncated modulo h^K with rational coefficients."""

    __slots__ = ("c", "K")

    def __init__(self, coeffs, K):
        c = [mpq(x) for x in coeffs[:K]]
        if len(c) < K:
            c.extend([_ZERO] * (K - len(c)))
        self.c = tuple(c)
        self.K = K

    @classmethod
    def const(cls, q, K):
        return cls([q], K)

    @classmethod
    def h(cls, K, power=1, coeff=1):
        c = [_ZERO] * K
        if power < K:
            c[power] = mpq(coeff)
        return cls(c, K)

    def _coerce(self, other):
        if isinstance(other, HSeries):
            if other.K != self.K:
                raise ValueError("h-orders differ: %d vs %d" % (self.K, other.K))
            return other
        return HSeries([other], self.K)

    def __add__(self, other):
        if isinstance(other, SpectralSeries):
            return NotImplemented
        o = self._coerce(other)
        return HSeries([a + b for a, b in zip(self.c, o.c)], self.K)

    __radd__ = __add__

    def __neg__(self):
        return HSeries([-a for a in self.c], self.K)

    def __sub__(self, other):
        if isinstance(other, SpectralSeries):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, SpectralSeries):
            return NotImplemented
        if not isinstance(other, HSeries):
            q = mpq(other)
            return HSeries([a * q for a in self.c], self.K)
        o = self._coerce(other)
        K = self.K
        out = [_ZERO] * K
        a, b = self.c, o.c
        for i in range(K):
            ai = a[i]
            if ai:
                for j in range(K - i):
                    if b[j]:
                        out[i + j] += ai * b[j]
        return HSeries(out, K)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, HSeries):
            return self * other.inv()
        return self * (1 / mpq(other))

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, e):
        if e < 0:
            return self.inv() ** (-e)
        out = HSeries.const(1, self.K)
        for _ in range(e):
            out = out * self
        return out

    def is_unit(self):
        return self.c[0] != 0

    def inv(self):
        if not self.c[0]:
            raise ExpansionError("h-series with zero constant term is not invertible")
        K = self.K
        a = self.c
        out = [_ZERO] * K
        out[0] = 1 / a[0]
        for n in range(1, K):
            s = _ZERO
            for j in range(1, n + 1):
                if a[j]:
                    s += a[j] * out[n - j]
            out[n] = -s * out[0]
        return HSeries(out, K)

    def shift(self, n):
        """Multiply by h^n (n may be negative when the low terms vanish)."""
        K = self.K
        if n >= 0:
            return HSeries([_ZERO] * n + list(self.c[: K - n]), K)
        if any(self.c[: -n]):
            raise ExpansionError("division by h of a series with low terms")
        return HSeries(list(self.c[-n:]), K)

    def valuation(self):
        for i, a in enumerate(self.c):
            if a:
                return i
        return self.K

    def is_zero(self):
        return not any(self.c)

    def __eq__(self, other):
        if isinstance(other, HSeries):
            return self.K == other.K and self.c == other.c
        if isinstance(other, SpectralSeries):
            return NotImplemented
        try:
            return self.c == HSeries([other], self.K).c
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.c, self.K))

    def __getitem__(self, k):
        return self.c[k]

    def text(self):
        return " ".join(rat_text(a) for a in self.c)

    def __repr__(self):
        terms = []
        for k, a in enumerate(self.c):
            if a:
                terms.append("%s*h^%d" % (rat_text(a), k) if k else rat_text(a))
        return "HSeries(%s; K=%d)" % (" + ".join(terms) or "0", self.K)


def exp_h(c, K):
    """exp(c*h) truncated at h^K."""
    c = mpq(c)
    out = []
    term = _ONE
    for k in range(K):
        out.append(term)
        term = term * c / (k + 1)
    return HSeries(out, K)


class SpectralSeries:
    """Sparse Laurent-type series in ordered variables over HSeries.

    ``depth`` maps a variable to the largest exponent kept (None: no
    truncation).  ``dropped`` records variables whose truncation actually
    removed terms during construction, so callers can certify windows.
    """

    __slots__ = ("vars", "K", "terms", "depth", "dropped")

    def __init__(self, variables, K, terms=None, depth=None, dropped=()):
        self.vars = tuple(variables)
        self.K = K
        self.depth = tuple(depth) if depth is not None else (None,) * len(self.vars)
        if len(self.depth) != len(self.vars):
            raise ValueError("depth list does not match variables")
        dropped = set(dropped)
        clean = {}
        for e, v in (terms or {}).items():
            if not isinstance(v, HSeries):
                v = HSeries([v], K)
            if v.is_zero():
                continue
            if self._outside(e):
                dropped.update(self.vars[i] for i, d in enumerate(self.depth)
                               if d is not None and e[i] > d)
                continue
            clean[tuple(e)] = v
        self.terms = clean
        self.dropped = frozenset(dropped)

    def _outside(self, e):
        for x, d in zip(e, self.depth):
            if d is not None and x > d:
                return True
        return False

    # construction helpers
    def _new(self, terms, dropped=()):
        return SpectralSeries(self.vars, self.K, terms, self.depth,
                              self.dropped | frozenset(dropped))

    @classmethod
    def constant(cls, variables, K, value, depth=None):
        n = len(variables)
        return cls(variables, K, {(0,) * n: value}, depth)

    @classmethod
    def monomial(cls, variables, K, exps, coeff=1, depth=None):
        return cls(variables, K, {tuple(exps): coeff}, depth)

    @classmethod
    def linear(cls, variables, K, coeffs, hcoeff=0, depth=None):
        """The linear form sum(coeffs[v] * v) + hcoeff * h."""
        n = len(variables)
        terms = {}
        for v, a in coeffs.items():
            e = [0] * n
            e[variables.index(v)] = 1
            terms[tuple(e)] = HSeries([a], K)
        if hcoeff:
            z = (0,) * n
            terms[z] = terms.get(z, HSeries([0], K)) + HSeries.h(K, 1, hcoeff)
        return cls(variables, K, terms, depth)

    def _check(self, other):
        if not isinstance(other, SpectralSeries):
            return SpectralSeries.constant(self.vars, self.K, other, self.depth)
        if other.vars != self.vars or other.K != self.K:
            raise ValueError("variable lists or h-orders differ: %r vs %r" % (self.vars, other.vars))
        return other

    def __add__(self, other):
        o = self._check(other)
        t = dict(self.terms)
        for e, v in o.terms.items():
            t[e] = t[e] + v if e in t else v
        return self._new(t, o.dropped)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -v for e, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, SpectralSeries):
            if isinstance(other, HSeries):
                return self._new({e: v * other for e, v in self.terms.items()})
            q = mpq(other)
            return self._new({e: v * q for e, v in self.terms.items()})
        return series_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e):
        out = SpectralSeries.constant(self.vars, self.K, 1, self.depth)
        for _ in range(e):
            out = out * self
        return out

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, SpectralSeries):
            return self.vars == other.vars and self.terms == other.terms
        return self == self._check(other)

    def __hash__(self):
        return hash((self.vars, tuple(sorted(self.terms.items()))))

    def coeff(self, exps):
        return self.terms.get(tuple(exps), HSeries([0], self.K))

    def h_mul(self, n=1):
        return self._new({e: v.shift(n) for e, v in self.terms.items()})

    def min_exp(self, var):
        i = self.vars.index(var)
        return min((e[i] for e in self.terms), default=0)

    def inv(self):
        """Inverse of a linear form (or a unit constant) per the expansion convention."""
        lin = {}
        hc = HSeries([0], self.K)
        for e, v in self.terms.items():
            nz = [x for x in e if x]
            if not nz:
                hc = v
            elif nz == [1] and v.c[0] and not any(v.c[1:]):
                lin[self.vars[e.index(1)]] = v.c[0]
            else:
                return self._inv_unit()
        if not lin:
            return SpectralSeries.constant(self.vars, self.K, hc.inv(), self.depth)
        return expand_inverse_linear(self.vars, self.K, lin, hc, self.depth)

    def _inv_unit(self):
        """Geometric inverse of c + rest, c a unit constant, rest nilpotent under truncation."""
        n = len(self.vars)
        z = (0,) * n
        c = self.terms.get(z)
        if c is None or not c.is_unit():
            raise ExpansionError("series has no unit constant term")
        for e, v in self.terms.items():
            if e == z:
                continue
            if min(e) < 0 and v.c[0]:
                raise ExpansionError("inverse of a series with negative powers")
            if all(d is None or x == 0 for x, d in zip(e, self.depth)) and v.c[0]:
                raise ExpansionError("inverse would not terminate: untruncated direction")
        ci = c.inv()
        rest = self._new({e: -(v * ci) for e, v in self.terms.items() if e != z})
        one = SpectralSeries.constant(self.vars, self.K, 1, self.depth)
        out = one
        term = one
        bound = sum(d for d in self.depth if d is not None) + self.K + 1
        for _ in range(bound):
            term = term * rest
            if term.is_zero():
                break
            out = out + term
        return out * ci

    def subs(self, var, value):
        return substitute_shift(self, var, value)

    def text(self):
        lines = []
        for e in sorted(self.terms):
            lines.append("%s : %s" % (" ".join(str(x) for x in e), self.terms[e].text()))
        return "\n".join(lines)

    def __repr__(self):
        return "SpectralSeries(vars=%r, %d terms, K=%d)" % (self.vars, len(self.terms), self.K)


def series_mul(a, b):
    if a.vars != b.vars or a.K != b.K:
        raise ValueError("variable lists or h-orders differ: %r vs %r" % (a.vars, b.vars))
    t = {}
    dropped = set(a.dropped | b.dropped)
    depth = tuple(min(x, y) if x is not None and y is not None else (x if y is None else y)
                  for x, y in zip(a.depth, b.depth))
    for e1, v1 in a.terms.items():
        for e2, v2 in b.terms.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            bad = [a.vars[i] for i, d in enumerate(depth) if d is not None and e[i] > d]
            if bad:
                dropped.update(bad)
                continue
            p = v1 * v2
            t[e] = t[e] + p if e in t else p
    return SpectralSeries(a.vars, a.K, t, depth, dropped)


def expand_inverse_linear(variables, K, coeffs, hcoeff=0, depth=None):
    """(sum coeffs[v]*v + hcoeff)^{-1} expanded in nonnegative powers of later variables.

    ``hcoeff`` is an HSeries (or rational multiple of h) with no constant term;
    the first listed variable with nonzero coefficient is the large one.
    """
    variables = tuple(variables)
    n = len(variables)
    depth = tuple(depth) if depth is not None else (None,) * n
    if isinstance(hcoeff, HSeries):
        hs = hcoeff
    else:
        hs = HSeries.h(K, 1, hcoeff)
    if hs.c[0]:
        raise ExpansionError("constant term in a linear form")
    for v in coeffs:
        if v not in variables:
            raise ValueError("unknown variable %r" % (v,))
    nz = [v for v in variables if coeffs.get(v, 0)]
    if not nz:
        raise ExpansionError("linear form has no nonzero variable coefficient")
    big = nz[0]
    bi = variables.index(big)
    a = mpq(coeffs[big])
    small = [(variables.index(v), mpq(coeffs[v]) / a) for v in nz[1:]]
    for i, _ in small:
        if depth[i] is None:
            raise ExpansionError("small variable %r needs a truncation depth" % variables[i])
    hrest = hs * (1 / a)
    # (a u)^{-1} * sum_q (-(rest)/u)^q ; rest = sum b_i v_i + h-part
    maxq = sum(depth[i] for i, _ in small) + K
    terms = {}
    dropped = set()
    # power of rest, as dict exps(small vars) -> HSeries, tracking h-valuation
    cur = {(0,) * len(small): HSeries([1], K)}
    for q in range(maxq + 1):
        sign = -1 if q % 2 else 1
        for se, v in cur.items():
            e = [0] * n
            for (i, _), x in zip(small, se):
                e[i] = x
            e[bi] = -1 - q
            terms[tuple(e)] = terms.get(tuple(e), HSeries([0], K)) + v * (sign / a)
        nxt = {}
        for se, v in cur.items():
            if not v.is_zero():
                hv = v * hrest
                if not hv.is_zero():
                    nxt[se] = nxt[se] + hv if se in nxt else hv
            for k, (i, b) in enumerate(small):
                ne = list(se)
                ne[k] += 1
                if ne[k] > depth[i]:
                    dropped.add(variables[i])
                    continue
                ne = tuple(ne)
                nv = v * b
                nxt[ne] = nxt[ne] + nv if ne in nxt else nv
        cur = {e: v for e, v in nxt.items() if not v.is_zero()}
        if not cur:
            break
    return SpectralSeries(variables, K, terms, depth, dropped)


def substitute_shift(s, var, value):
    """Substitute for ``var``.

    ``value`` is a rational (exact evaluation), ``("hmul", c)`` meaning
    c*h, ``("h", z, c)`` meaning
    z + c*h, or ``("var", z, u)`` meaning z + u with u small.  The new
    variable z replaces var in place; u must already be a later variable.
    """
    i = s.vars.index(var)
    K = s.K
    if not isinstance(value, tuple):
        q = mpq(value)
        if var in s.dropped:
            raise ExpansionError("cannot evaluate %r: its series was truncated" % var)
        if q == 0 and s.min_exp(var) < 0:
            raise ExpansionError("evaluation at 0 of a negative power")
        nv = s.vars[:i] + s.vars[i + 1:]
        nd = s.depth[:i] + s.depth[i + 1:]
        t = {}
        for e, v in s.terms.items():
            ne = e[:i] + e[i + 1:]
            c = v * (q ** e[i])
            t[ne] = t[ne] + c if ne in t else c
        return SpectralSeries(nv, K, t, nd, s.dropped - {var})
    if value[0] == "hmul":
        # var := c*h, exact as long as no net negative power of h survives
        c = mpq(value[1])
        nv = s.vars[:i] + s.vars[i + 1:]
        nd = s.depth[:i] + s.depth[i + 1:]
        t = {}
        for e, v in s.terms.items():
            p = e[i]
            ne = e[:i] + e[i + 1:]
            if p < 0 and v.valuation() < -p:
                raise ExpansionError("substitution %s := %s*h divides by h" % (var, rat_text(c)))
            add = v.shift(p) * (c ** p)
            t[ne] = t[ne] + add if ne in t else add
        return SpectralSeries(nv, K, t, nd, s.dropped - {var})
    kind, z, other = value
    # the new variable either replaces var in place or merges into an existing slot
    if z == var or z not in s.vars:
        nv = s.vars[:i] + (z,) + s.vars[i + 1:]
        nd = s.depth
        target = i

        def place(e, p):
            e = list(e)
            e[i] = p
            return e
    else:
        nv = s.vars[:i] + s.vars[i + 1:]
        nd = s.depth[:i] + s.depth[i + 1:]
        target = nv.index(z)

        def place(e, p):
            e = list(e[:i] + e[i + 1:])
            e[target] += p
            return e
    if kind == "h":
        c = mpq(other)
        t = {}
        for e, v in s.terms.items():
            p = e[i]
            for k in range(K):
                if p >= 0 and k > p:
                    break
                coef = binom(p, k)
                ne = tuple(place(e, p - k))
                add = v * HSeries.h(K, k, coef * c ** k)
                t[ne] = t[ne] + add if ne in t else add
        return SpectralSeries(nv, K, t, nd, s.dropped)
    if kind == "var":
        u = other
        j = s.vars.index(u)
        if j <= i or (z in s.vars and s.vars.index(z) >= j):
            raise ExpansionError("shift variable must be listed after the substituted one")
        if s.min_exp(var) < 0 and s.dropped:
            raise ExpansionError("infinite tail: negative powers of %r come from a truncated expansion" % var)
        dj = s.depth[j]
        if dj is None:
            raise ExpansionError("shift variable %r needs a depth" % u)
        jn = nv.index(u)
        t = {}
        dropped = set(s.dropped)
        for e, v in s.terms.items():
            p = e[i]
            for k in range(0, dj + 1):
                if p >= 0 and k > p:
                    break
                ne = place(e, p - k)
                ne[jn] += k
                if ne[jn] > dj:
                    dropped.add(u)
                    break
                ne = tuple(ne)
                add = v * binom(p, k)
                t[ne] = t[ne] + add if ne in t else add
            else:
                if p < 0:
                    dropped.add(u)
        return SpectralSeries(nv, K, t, nd, dropped)
    raise ValueError("unknown substitution %r" % (value,))
