import pytest
from hypothesis import given, strategies as st

from _util import engine
from artifact import action as A
from artifact.qalgebra import State, level

N = 2


def letter(r, i, j):
    return State.word(((r, i, j),))


@pytest.mark.parametrize("sign", [1, -1])
def test_lminus_on_vacuum(sign):
    eng = engine(N, sign, 2, 3)
    for a in (1, 2):
        for b in (1, 2):
            got = eng.l_minus(a, b, State.vacuum())
            assert got == ({0: State.vacuum()} if a == b else {})


@pytest.mark.parametrize("sign", [1, -1])
def test_lminus_single_letter_mod_h2(sign):
    # l^-_ab(u) l^(-r)_cd 1 = delta_ab l_cd + sum_s u^-s h (delta_cb l_ad -+ delta_ab l_cd)^(-(r-s+1)) + O(h^2)
    eng = engine(N, sign, 2, 3)
    for a, b, c, d in [(1, 1, 1, 2), (1, 2, 2, 1), (2, 1, 1, 1), (1, 2, 1, 2), (2, 2, 1, 2)]:
        for r in (1, 2):
            want = {}

            def add(s, st_):
                want[s] = want[s] + st_ if s in want else st_

            if a == b:
                add(0, letter(r, c, d))
            for s in range(1, r + 1):
                q = r - s + 1
                if c == b:
                    add(s, State.word(((q, a, d),), 1))
                if a == b:
                    add(s, State.word(((q, c, d),), 1, -sign))
            want = {s: v for s, v in want.items() if v.terms}
            assert eng.l_minus(a, b, letter(r, c, d)) == want, (a, b, c, d, r)


@pytest.mark.parametrize("sign", [1, -1])
@given(st.lists(st.tuples(st.integers(1, 2), st.integers(1, N), st.integers(1, N)), min_size=1, max_size=2),
       st.integers(1, N), st.integers(1, N))
def test_lminus_bookkeeping(sign, ws, a, b):
    eng = engine(N, sign, 3, 3)
    w = tuple(sorted(ws))
    if level(w) > eng.L or not eng.table.is_canonical(w):
        return
    for s, st_ in eng.l_minus(a, b, State.word(w)).items():
        for (k, ww) in st_.terms:
            # each power of u^-1 costs one unit of level or buys one power of h
            assert s == k + level(w) - level(ww)


@pytest.mark.parametrize("sign", [1, -1])
def test_vacuum_axioms_and_translation(sign):
    eng = engine(N, sign, 2, 3)
    assert A.check_vacuum_axioms(eng)["ok"]
    rep = A.check_translation(eng)
    assert rep["ok"] and rep["certified"] > 0
    assert eng.translation(State.vacuum()).terms == {}
    # D l^(-r) = r l^(-r-1)
    assert eng.translation(letter(2, 1, 2)) == letter(3, 1, 2).scale(2)


@pytest.mark.parametrize("sign", [1, -1])
def test_vertex_of_letter_on_vacuum(sign):
    eng = engine(N, sign, 2, 3)
    got = eng.vertex(letter(1, 1, 2), State.vacuum())
    assert got[0] == letter(1, 1, 2)
    assert got[1] == letter(2, 1, 2)
    assert all(g >= 0 for g in got)


@pytest.mark.parametrize("sign", [1, -1])
def test_module_relations_on_small_inputs(sign):
    eng = engine(N, sign, 2, 3)
    for x in A.basis_inputs(eng, 1):
        for fn in (A.check_rll, A.check_plus_exchange, A.check_minus_exchange, A.check_mixed_exchange):
            rep = fn(eng, x)
            assert rep["ok"] and rep["certified"] > 0, (fn.__name__, rep["witness"])


@pytest.mark.parametrize("sign", [1, -1])
def test_vacuum_identity(sign):
    eng = engine(N, sign, 2, 3)
    assert A.check_vacuum_identity(eng, 1)["ok"]


@pytest.mark.parametrize("sign", [1, -1])
def test_braid_axioms(sign):
    eng = engine(N, sign, 2, 3)
    for fn in (A.check_braid_unitarity, A.check_braid_ybe, A.check_braid_shift):
        rep = fn(eng)
        assert rep["ok"] and rep["certified"] > 0, (fn.__name__, rep["witness"])


def test_braid_on_vacuum_pair():
    eng = engine(N, 1, 2, 3)
    one = A.tensor(State.vacuum(), State.vacuum())
    assert eng.braid(one) == {0: one}
    assert A.braid_at(eng, one, 0, 1, 5) == one


def test_braid_moves_letters_only_at_order_h():
    eng = engine(N, 1, 2, 3)
    x = A.tensor(letter(1, 1, 2), letter(1, 2, 1))
    got = A.braid_at(eng, x, 0, 1, 3)
    d = A.truncated(got - x, 1)
    assert not d.terms
    assert A.truncated(got - x, 2).terms


class _NoBraid(A.Engine):
    def braid(self, x, i=0, j=1):
        return {0: x}


def test_locality_needs_the_braiding():
    eng = engine(N, 1, 2, 3)
    u, v, w = letter(1, 1, 2), letter(1, 2, 1), letter(1, 1, 1)
    assert A.check_locality(eng, u, v, w, 2)["ok"]
    bad = _NoBraid(eng.table)
    assert not A.check_locality(bad, u, v, w, 2)["ok"]


def test_associativity_single_letters():
    eng = engine(N, -1, 2, 3)
    rep = A.check_associativity(eng, letter(1, 1, 2), letter(1, 2, 1), letter(1, 1, 1), 2)
    assert rep["ok"], rep["witness"]
