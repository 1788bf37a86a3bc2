import math

import numpy as np
import pytest

from pnspace import ddf as D
from pnspace import products as P
from pnspace import spaces as S
from pnspace import tnorm as T
from pnspace import transform as X
from pnspace.ddf import Grid
from pnspace.trifn import TAU_M, lift_of, lift_star, tau, tau_star

G = D.ratio(1.0)
G256 = Grid(256, 16.0)


def simple_space(norm=S.L2, t=TAU_M, star=None, grid=G256):
    return S.space(S.simple(norm, G), 2, t, star or lift_of(T.M), "Serstnev", f"simple-{norm.label}", grid)


@pytest.fixture(scope="module")
def exp_product():
    K = 6
    g = Grid(1024, 2.0)
    fac = [S.space(S.exp_norm(S.L2), 2, lift_of(T.PI), lift_of(T.PI), name=f"e{i}", grid=g)
           for i in range(1, K + 1)]
    b = [2.0 ** -i for i in range(1, K + 1)]
    return P.countable_product(fac, b, [X.blowup(x) for x in b], T.PI, 500, 0, g)


def test_tau_product_requires_shared_pair():
    with pytest.raises(ValueError):
        P.tau_product(simple_space(), simple_space(t=tau(T.W)), TAU_M)


def test_simple_product_identities():
    rep = P.check_simple_product_identities(S.L2, S.L1, G, 2, 2, 150, seed=0, grid=G256)
    assert rep.passed, rep.to_dict()


def test_pm_coincidence():
    prod = P.tau_product(simple_space(), simple_space(S.L1), TAU_M)
    assert P.check_pm_coincidence(prod, 50, seed=0).passed


def test_tg_chain_three_four_five():
    prod = P.tg_product(S.L2, S.L2, G, 2.0, 2, 2)
    assert P.beta_for(2.0) == 2.0
    v = np.array([3.0, 0.0, 4.0, 0.0])
    assert prod.evidence["target"].norm(v) == pytest.approx(5.0)
    t = np.array([1.0, 25.0])
    assert np.allclose(prod.nu.curve(v)(t), G(t / 25.0), atol=1e-12)
    assert P.check_tg_identity(prod, 200, seed=0).passed


def test_serstnev_product_consistent_for_tau_m():
    rep = P.check_serstnev_product(simple_space(), simple_space(S.L1), TAU_M, 30, 0, 100)
    assert rep.passed, rep.notes


def test_serstnev_product_lift_min_counterexample():
    # Serstnev product, yet tau_M does not dominate the pointwise min
    rep = P.check_serstnev_product(simple_space(), simple_space(S.L1), lift_of(T.M), 30, 0, 200)
    assert rep.witness == {"product_serstnev": True, "dominances": False}
    assert rep.checks["tauM>>t1"]["verdict"] == "fail"


def test_menger_product_rows():
    V = simple_space(t=tau(T.W), star=tau_star(T.W_STAR))
    rep = P.check_menger_product(V, V, T.W, T.M, 60, 0, 5000)
    assert rep.passed and rep.checks["hypotheses_hold"]["value"]
    Vm = simple_space(t=TAU_M, star=tau_star(T.M_STAR))
    vac = P.check_menger_product(Vm, Vm, T.M, T.W, 60, 0, 5000)
    assert not vac.checks["hypotheses_hold"]["value"] and "axioms" not in vac.checks


def test_countable_product_rejects_non_superadditive():
    V = S.space(S.exp_norm(S.L2), 2, lift_of(T.PI), lift_of(T.PI))
    with pytest.raises(ValueError):
        P.countable_product([V], [1.0], [X.SQRT], T.PI, 2000)
    with pytest.raises(ValueError):
        P.countable_product([V, V], [1.0], [X.blowup(1.0)], T.PI)


def test_countable_product_axioms_and_bound(exp_product):
    assert exp_product.evidence["sigma"] == pytest.approx(1 - 2.0 ** -6)
    assert S.verify_axioms(exp_product, 40, seed=0).passed
    assert P.check_lemma4_bound(exp_product, 100, seed=0).passed


def test_countable_truncation_is_monotone(exp_product, rng):
    fac = exp_product.factors
    dims = tuple(V.dim for V in fac)
    short = P.LiftedProductNorm(fac[:-1], T.PI, dims[:-1])
    for _ in range(20):
        v = rng.normal(size=sum(dims))
        full = exp_product.nu.ddf(v, exp_product.grid)
        part = short.ddf(v[: sum(dims[:-1])], exp_product.grid)
        assert D.le(full, part, tol=1e-12)


def test_sigma_tail_bound(rng):
    fs = [simple_space(grid=Grid(128, 16.0)) for _ in range(12)]
    a = P.sigma_product(fs[:4], hypothesis_trials=0)
    b = P.sigma_product(fs, hypothesis_trials=0)
    t = np.linspace(0.01, 20, 50)
    for _ in range(20):
        v = rng.normal(size=24)
        d = np.abs(a.nu.curve(v[:8])(t) - b.nu.curve(v)(t))
        assert d.max() < 2.0 ** -4


def test_sigma_product_axioms():
    fs = [simple_space(grid=Grid(256, 16.0)) for _ in range(8)]
    prod = P.sigma_product(fs, hypothesis_trials=40)
    assert prod.evidence["hypotheses"] == "pass"
    assert prod.tau_star.name == lift_star(T.W_STAR).name
    assert S.verify_axioms(prod, 60, seed=0).passed


def test_sigma_hypotheses_reject_tau_star_above_w_star():
    # the drastic sum lies above W*, unlike M*
    drastic = T.TNorm("SD", lambda x, y: np.where(np.minimum(x, y) == 0, np.maximum(x, y), 1.0),
                      is_conorm=True)
    V = simple_space(t=tau(T.W), star=lift_star(drastic))
    with pytest.raises(ValueError):
        P.sigma_product([V], hypothesis_trials=40)


def test_equilateral_min_product():
    pair = (lift_of(T.M), lift_of(T.M))
    F, H = D.ratio(1.0), D.expc(1.0)
    V1 = S.space(S.equilateral(F), 2, *pair, grid=G256)
    V2 = S.space(S.equilateral(H), 2, *pair, grid=G256)
    prod = P.tau_product(V1, V2, lift_of(T.M))
    t = np.linspace(0.1, 10, 30)
    assert np.allclose(prod.nu.curve(np.ones(4))(t), np.minimum(F(t), H(t)))
    # a zero block leaves the other factor
    assert np.allclose(prod.nu.curve(np.array([0, 0, 1.0, 1.0]))(t), H(t))
