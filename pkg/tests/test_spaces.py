import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pnspace import ddf as D
from pnspace import spaces as S
from pnspace import tnorm as T
from pnspace import transform as X
from pnspace.ddf import Grid
from pnspace.trifn import TAU_M, lift_of, tau

vec = st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3).map(np.array)
G = D.ratio(1.0)
TG = T.make_tg(G, 2.0)


@given(vec, vec, st.floats(-100, 100))
def test_norm_axioms(p, q, lam):
    for n in (S.L1, S.L2, S.LINF):
        assert n(p + q) <= n(p) + n(q) + 1e-9 * (1 + n(p) + n(q))
        assert n(lam * p) == pytest.approx(abs(lam) * n(p), rel=1e-12, abs=1e-12)


def test_combined_norms():
    v = np.array([3.0, 0.0, 4.0, 0.0])
    assert S.combined("max", S.L2, S.L2, 2)(v) == 4.0
    assert S.combined("sum", S.L2, S.L2, 2)(v) == 7.0
    assert S.combined("lbeta", S.L2, S.L2, 2, 2.0)(v) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        S.Norm("lbeta", None, S.L2, S.L2, 2)


def test_beta_below_one_is_not_a_norm():
    n = S.combined("lbeta", S.L2, S.L2, 1, 0.5)
    assert not S.check_norm_axioms(n, 2, 2000, seed=0).checks["triangle"]["verdict"] == "pass"


def test_constructor_errors():
    with pytest.raises(ValueError):
        S.alpha_simple(S.L2, G, 1.0)
    with pytest.raises(ValueError):
        S.alpha_simple(S.L2, G, -1.0)
    with pytest.raises(ValueError):
        S.simple(S.L2, D.step(0.0))
    with pytest.raises(ValueError):
        S.equilateral(D.eps0(Grid(8, 1.0)))


def test_alpha_simple_values():
    nu = S.alpha_simple(S.L2, G, 2.0)
    p = np.array([2.0, 0.0])
    assert nu.value(p, 4.0) == pytest.approx(0.5)        # G(4 / 2^2)
    assert nu.value(np.zeros(2), 1e-9) == 1.0
    P = np.array([[2.0, 0.0], [0.0, 0.0]])
    assert np.allclose(nu.values(P, 4.0), [0.5, 1.0])


def test_exp_norm_limit_below_one():
    nu = S.exp_norm(S.L2)
    p = np.array([1.0, 0.0])
    assert nu.limit(p) == pytest.approx(math.exp(-1))
    F = nu.ddf(p, Grid(64, 2.0))
    assert F.at_inf == pytest.approx(math.exp(-1)) and F.invariant_violations() == []


def test_transformed_norm_with_blowup_is_in_d_plus():
    nu = S.TransformedNorm(S.exp_norm(S.L2), X.blowup(0.5))
    p = np.array([3.0, 1.0])
    assert nu.limit(p) == 1.0
    assert nu.value(p, 0.6) == 1.0 and nu.value(p, 0.25) == pytest.approx(math.exp(-math.sqrt(10)))
    P = np.array([p, 2 * p])
    assert np.allclose(nu.values(P, 0.25), np.exp(-S.L2.rows(P)))


def _alpha2(tau_, star):
    return S.space(S.alpha_simple(S.L2, G, 2.0), 2, tau_, star, name="alpha2", grid=Grid(512, 16.0))


def test_alpha_simple_under_tg_passes():
    rep = S.verify_axioms(_alpha2(tau(TG), lift_of(TG)), 60, seed=0)
    assert rep.passed, rep.to_dict()


def test_alpha_simple_under_tau_m_fails_n3_collinear():
    V = _alpha2(TAU_M, lift_of(T.M))
    rep = S.verify_axioms(V, 60, seed=0)
    assert rep.checks["N3"]["verdict"] == "fail"
    w = rep.witness
    assert w["check"] == "N3" and np.allclose(w["p"], w["q"])
    assert S.replay_axiom(V, w) == pytest.approx(rep.checks["N3"]["worst"])
    # ||p|| = 1, t = 1: nu_{2p}(1) = G(1/4) = 0.2 but tau_M(nu_p, nu_p)(1) = G(1/2) = 1/3
    lhs, rhs = S.n3_values(V, [1.0, 0.0], [1.0, 0.0], 1.0)
    assert lhs == pytest.approx(0.2, abs=1e-9) and rhs == pytest.approx(1 / 3, abs=1e-9)


def test_menger_condition_under_tg():
    assert S.menger_alpha_condition(S.L2, G, 2.0, TG, 5000, seed=0).passed


def test_simple_space_is_serstnev():
    V = S.space(S.simple(S.L2, G), 2, TAU_M, lift_of(T.M), grid=Grid(256, 16.0))
    assert S.check_serstnev(V, 40, seed=0).passed
    assert S.verify_axioms(V, 60, seed=0).passed


def test_equilateral_space():
    V = S.space(S.equilateral(G), 2, lift_of(T.M), lift_of(T.M), grid=Grid(128, 8.0))
    assert S.verify_axioms(V, 60, seed=0).passed
    F1, F2 = V.norm_ddf([1.0, 2.0]), V.norm_ddf([-5.0, 0.1])
    assert np.array_equal(F1.values, F2.values)


def test_exp_space_under_pi():
    V = S.space(S.exp_norm(S.L2), 2, tau(T.PI), lift_of(T.PI), grid=Grid(128, 2.0))
    assert S.verify_axioms(V, 60, seed=0).passed


def test_n4_fails_for_simple_space_under_lift_pi():
    V = S.space(S.simple(S.L2, G), 2, tau(T.PI), lift_of(T.PI), grid=Grid(128, 16.0))
    rep = S.verify_axioms(V, 60, seed=0)
    assert rep.checks["N4"]["verdict"] == "fail"
