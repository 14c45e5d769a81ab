import pytest

from _util import engine
from artifact import bethe as B
from artifact.action import tensor
from artifact.qalgebra import State

N = 2


def test_fused_points():
    assert B.fused_points(3, 1) == [0, 1, 2]
    assert B.fused_points(3, -1) == [0, -1, -2]
    assert B.fused_points(2, 1, stretch=2) == [0, 2]


@pytest.mark.parametrize("sign", [1, -1])
def test_size_one_family_is_the_trace(sign):
    eng = engine(N, sign, 2, 3)
    for r in (1, 2, 3):
        want = State({(0, ((r, i, i),)): 1 for i in range(1, N + 1)})
        assert B.bethe_state(eng, 1, r, sign).payload == want


def test_family_size_is_bounded_by_N():
    with pytest.raises(ValueError):
        B.bethe_state(engine(N, 1, 2, 3), 3, 1)


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("n", [1, 2])
def test_vacuum_pipeline(sign, n):
    rep = B.check_vacuum_pipeline(engine(N, sign, 2, 3), n)
    assert rep["ok"] and rep["certified"] > 0, rep["witness"]


@pytest.mark.parametrize("n1,n2", [(1, 1), (1, 2)])
def test_families_commute(n1, n2):
    eng = engine(N, -1, 2, 3)
    rep = B.check_commute(eng, n1, n2, depth=3)
    assert rep["ok"] and rep["certified"] > 0, rep["witness"]
    assert rep["asserted"]


@pytest.mark.slow
def test_off_fusion_family_does_not_commute():
    # the stretched family first fails to commute at h^3
    eng = engine(N, -1, 4, 3)
    rep = B.check_commute(eng, 1, 2, depth=2, stretch=2)
    assert not rep["ok"] and rep["witness"] is not None


def test_central_series_on_plus_is_rejected():
    with pytest.raises(ValueError):
        B.check_central(engine(N, 1, 2, 3))


def test_central_series_commutes_with_generators():
    rep = B.check_central(engine(N, -1, 2, 3), depth=3)
    assert rep["ok"] and rep["certified"] > 0, rep["witness"]


@pytest.mark.parametrize("Nd", [2, 3])
def test_antisymmetrized_hat_chain(Nd):
    rep = B.check_hat_chain_antisym(Nd, 4)
    assert rep["ok"], rep["witness"]


def test_fused_matrix_is_antisymmetric():
    rep = B.check_fused_antisym(engine(N, -1, 2, 3))
    assert rep["ok"] and rep["certified"] == 2 * 16


@pytest.mark.parametrize("sign", [1, -1])
def test_fixed_points_single(sign):
    eng = engine(N, sign, 2, 3)
    rep = B.check_fixed_point_suite(eng, 1, 1)
    assert rep["ok"] and rep["certified"] > 1, rep["witness"]


def test_generic_pair_is_not_fixed():
    eng = engine(N, 1, 2, 3)
    x = tensor(State.word(((1, 1, 2),)), State.word(((1, 2, 1),)))
    assert not B._braid_fixed(eng, x, "control")["ok"]


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("n,m", [(1, 1), (1, 2), (2, 2)])
def test_fused_exchange_identity(sign, n, m):
    assert B.check_fused_exchange(N, 4, n, m, sign)["ok"]


def test_full_fixed_point():
    rep = B.check_full_fixed_point(engine(N, -1, 2, 3))
    assert rep["ok"] and rep["certified"] > 0, rep["witness"]


def test_F_identity():
    rep = B.check_F_identity(N, 3)
    assert rep["ok"], rep["witness"]


def test_coefficients_are_independent():
    total, rank = B.independence_rank(engine(N, 1, 2, 4), 1, 4)
    assert total == rank == 4


def test_trig_identity_suite():
    out = B.trig_identity_suite(4)
    for key in ("trig_ybe", "trig_unitarity", "trig_fusion", "trig_antisym", "step_identity"):
        assert out[key] is True, key
