import pytest
from hypothesis import given, strategies as st

from _util import engine
from artifact import bethe as B
from artifact.fockrep import (FockElement, check_rtt_on_fock, fock_act, fock_eval, fock_rank, fock_word,
                              pi_formula, shifted_action, skewed_action, t_poly)
from artifact.qalgebra import words


def one(sign):
    return FockElement.one(sign)


def test_single_letter_action():
    v = fock_act(1, (1, 1, 2), one(1))
    assert v.terms == {(0, (1,), (2,), (1,)): 1}
    assert v.text() == "1/1*h^0*x1y2t1"


def test_exterior_signs():
    assert fock_word(-1, 0, ((1, 1, 1), (1, 1, 1)), one(-1)).is_zero()
    a = fock_word(-1, 0, ((1, 1, 1), (1, 2, 2)), one(-1))
    b = fock_word(-1, 0, ((1, 1, 2), (1, 2, 1)), one(-1))
    assert a.terms == {(0, (1, 2), (1, 2), (1, 1)): 1}
    assert b.terms == {(0, (1, 2), (1, 2), (1, 1)): -1}
    # sign +: everything commutes
    assert fock_word(1, 0, ((1, 1, 2), (2, 2, 1)), one(1)) == fock_word(1, 0, ((2, 2, 1), (1, 1, 2)), one(1))


def test_h_power_and_truncation():
    v = fock_word(1, 2, ((1, 1, 1),), one(1))
    assert list(v.terms) == [(2, (1,), (1,), (1,))]
    assert fock_eval(1, {(2, ((1, 1, 1),)): 1}, 2).is_zero()


@pytest.mark.parametrize("sign", [1, -1])
def test_rtt_annihilates_fock(sign):
    ok, w, count = check_rtt_on_fock(2, sign, 3, 3)
    assert ok, w
    assert count > 0


@pytest.mark.parametrize("sign", [1, -1])
def test_relabeled_t_is_still_a_module(sign):
    assert check_rtt_on_fock(2, sign, 3, 3, shifted_action)[0]


@pytest.mark.parametrize("sign", [1, -1])
def test_skewed_action_is_detected(sign):
    ok, w, _ = check_rtt_on_fock(2, sign, 3, 3, skewed_action)
    assert not ok and w is not None


def test_t_poly():
    assert t_poly(2, 2) == {(1, 2): 2}
    assert t_poly(1, 3) == {(3,): 1}
    assert t_poly(3, 1) == {(1, 1, 1): 1}
    assert t_poly(2, 3) == {(1, 3): 2, (2, 2): 1}


def test_pi_formula_examples():
    assert pi_formula(2, 1, 1, 2).terms == {(0, (1,), (1,), (2,)): 1, (0, (2,), (2,), (2,)): 1}
    assert pi_formula(2, -1, 2, 1).terms == {(0, (1, 2), (1, 2), (1, 1)): 2}
    # sign +, n = 2, r = 2 carries 2 t1 t2 on each index pair
    assert pi_formula(2, 1, 2, 2).terms[(0, (1, 2), (1, 2), (1, 2))] == 2 * 2


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("n,r", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_bethe_image_matches_formula(sign, n, r):
    eng = engine(2, sign, 2, 3)
    st_ = B.bethe_state(eng, n, r, sign).payload
    assert fock_eval(sign, st_, 1) == pi_formula(2, sign, n, r)


def test_fock_rank_is_full():
    for sign in (1, -1):
        total, rank = fock_rank(2, sign, 3)
        assert total == rank


@given(st.sampled_from([1, -1]), st.integers(1, 3), st.integers(0, 3))
def test_fock_eval_is_linear(sign, lev, pick):
    ws = list(words(2, 2, lev)) if lev >= 2 else list(words(2, 1, lev))
    a, b = ws[pick % len(ws)], ws[-1 - pick % len(ws)]
    both = fock_eval(sign, {(0, a): 2, (0, b): -3})
    assert both == fock_eval(sign, {(0, a): 2}) + fock_eval(sign, {(0, b): -3})
