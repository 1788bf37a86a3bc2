import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pnspace import ddf as D
from pnspace import tnorm as T
from pnspace import transform as X
from pnspace import trifn as R
from pnspace.ddf import Grid

pos = st.floats(1e-6, 1e3)


def test_power_two_example():
    m = X.power(2)
    assert m(7.0) == 49.0 and m(3.0) + m(4.0) == 25.0


@given(pos)
def test_inverses_round_trip(x):
    for m in (X.power(2), X.power(3.5), X.IDENTITY, X.SQRT):
        assert float(m.inverse(m(x))) == pytest.approx(x, rel=1e-9)
    b = X.blowup(1.0)
    y = x / (1 + x)          # inside ]0, b[
    assert float(b.inverse(b(y))) == pytest.approx(y, rel=1e-9)


def test_blowup_shape():
    b = X.blowup(2.0)
    assert float(b(0.0)) == 0.0 and float(b(1.0)) == 1.0
    assert math.isinf(float(b(2.0))) and float(b.inverse(np.inf)) == 2.0


def test_parse_and_errors():
    assert X.parse_m("pow:2").gamma == 2.0
    assert X.parse_m("blowup:0.5").b == 0.5
    assert X.parse_m("sqrt") is X.SQRT
    with pytest.raises(KeyError):
        X.parse_m("log")
    with pytest.raises(ValueError):
        X.power(0.5)
    with pytest.raises(ValueError):
        X.blowup(0.0)


@pytest.mark.parametrize("name,ok", [("pow:2", True), ("pow:3", True), ("blowup:1", True),
                                     ("identity", True), ("sqrt", False)])
def test_scalar_superadditivity(name, ok):
    rep = X.check_superadditive(X.parse_m(name), 20_000, seed=0)
    assert rep.passed is ok
    if not ok:
        w = rep.witness
        assert w["m(x+y)"] < w["m(x)+m(y)"]


def test_transform_of_a_step_moves_the_step():
    # eps_a m = eps_{m^-1(a)}
    g = Grid(512, 8.0)
    m = X.power(2)
    out = X.m_transform(D.make_eps(4.0, g), m)
    assert D.close(out, D.make_eps(2.0, g), cells=1)


def test_transform_with_finite_b_reaches_one():
    g = Grid(256, 4.0)
    out = X.m_transform(D.ratio(1.0), X.blowup(1.0), g)
    assert out.at_inf == 1.0 and D.eval(out, 1.5) == 1.0
    assert D.eval(out, 0.5) == pytest.approx(0.5)   # m(0.5) = 1, G(1) = 1/2
    assert out.invariant_violations() == []


def test_transform_of_sub_stochastic_function_keeps_limit_at_b():
    fm = X.transform_curve(lambda y: np.where(y > 0, 0.3, 0.0), X.blowup(1.0), 0.3)
    assert fm(np.array([1.0]))[0] == 0.3 and fm(np.array([1.01]))[0] == 1.0


@pytest.mark.parametrize("name,ok", [("pow:2", True), ("sqrt", False)])
def test_tau_superadditivity_agrees_with_scalar(name, ok):
    rep = X.check_tau_superadditive(X.parse_m(name), R.tau(T.W), 300, seed=0)
    assert rep.passed is ok
    assert rep.checks["superadditive"]["agrees"]


def test_shared_table_equals_single_campaigns():
    ms = [X.power(2), X.SQRT]
    ts = [R.tau(T.M), R.tau(T.W)]
    table = X.tau_superadditive_table(ms, ts, 60, seed=3)
    for m in ms:
        for t in ts:
            one = X.check_tau_superadditive(m, t, 60, seed=3, with_scalar=False)
            assert table[(m.label, t.name)].to_json() == one.to_json()
