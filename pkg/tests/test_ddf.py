import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pnspace import ddf as D
from pnspace.ddf import DDF, Grid

from strategies import GRID, ddfs


def test_grid_rejects_bad_sizes():
    with pytest.raises(ValueError):
        Grid(0, 1.0)
    with pytest.raises(ValueError):
        Grid(8, 0.0)


def test_eval_reads_left_continuous_cells():
    g = Grid(4, 4.0)
    F = DDF(np.array([0.0, 0.1, 0.2, 0.3, 0.4]), 4.0, 0.9)
    assert D.eval(F, 0.0) == 0.0
    assert D.eval(F, 0.5) == 0.1   # inside ]0, 1] reads the right endpoint
    assert D.eval(F, 1.0) == 0.1
    assert D.eval(F, 1.0001) == 0.2
    assert D.eval(F, 4.0) == 0.4
    assert D.eval(F, 5.0) == 0.9   # past x_max: the limit
    assert D.eval(F, math.inf) == 0.9
    assert np.array_equal(D.eval_many(F, np.array([0.5, 1.0, 5.0])), [0.1, 0.1, 0.9])
    with pytest.raises(ValueError):
        D.eval(F, -1.0)
    assert g.h == 1.0


def test_steps_and_eps0():
    g = Grid(16, 4.0)
    e = D.make_eps(1.0, g)
    assert D.eval(e, 1.0) == 0.0 and D.eval(e, 1.26) == 1.0
    assert D.is_eps0(D.eps0(g))
    inf = D.make_eps(math.inf, g)
    assert inf.is_eps_inf and inf.at_inf == 0.0
    far = D.make_eps(100.0, g)
    assert not far.values.any() and far.at_inf == 1.0
    with pytest.raises(ValueError):
        D.make_eps(-1.0, g)


def test_analytic_families():
    G = D.ratio(1.0)
    assert G(1.0) == pytest.approx(0.5)
    assert G(0.9) == pytest.approx(0.9 / 1.9)
    assert G.inverse(0.5) == pytest.approx(1.0)
    H = D.expc(2.0)
    assert H(2.0) == pytest.approx(1 - math.exp(-1.0))
    assert H.inverse(H(3.0)) == pytest.approx(3.0)
    assert D.from_json(G.to_json()).label == G.label
    F = G.sample(GRID)
    F2 = D.from_json(F.to_json())
    assert np.array_equal(F.values, F2.values) and F2.at_inf == F.at_inf


@given(ddfs())
def test_sampled_functions_are_valid(F):
    assert F.invariant_violations() == []


@given(ddfs(), ddfs(), st.floats(0.0, 1.0))
def test_mixture_preserves_invariants(F, G, w):
    M = D.mixture([w, 1 - w], [F, G])
    assert M.invariant_violations() == []
    assert M.deficit <= 1e-12
    half = D.mixture([w / 2], [F])
    assert half.deficit == pytest.approx(1 - w / 2)


@given(st.lists(st.floats(-0.5, 1.5), min_size=5, max_size=40))
def test_regularize_projects_into_delta_plus(raw):
    F = D.left_regularize(raw, 4.0)
    assert F.invariant_violations() == []
    assert F.values[0] == 0.0


@given(ddfs(), ddfs(), ddfs())
def test_le_is_a_partial_order(F, G, H):
    assert D.le(F, F)
    if D.le(F, G) and D.le(G, H):
        assert D.le(F, H)
    if D.le(F, G) and D.le(G, F):
        assert D.close(F, G)


@given(ddfs())
def test_eps0_is_the_top_and_eps_inf_the_bottom(F):
    assert D.le(F, D.eps0(GRID))
    assert D.le(D.make_eps(math.inf, GRID), F)


@given(ddfs(), st.integers(0, 4))
def test_slack_only_helps(F, cells):
    G = D.resample(D.make_eps(1.0, GRID), GRID)
    assert D.excess(F, G, cells + 1).worst <= D.excess(F, G, cells).worst


def test_resample_to_finer_grid_keeps_values():
    F = D.ratio(1.0).sample(Grid(8, 4.0))
    fine = D.resample(F, Grid(32, 4.0))
    assert fine.invariant_violations() == []
    assert D.eval(fine, 2.0) == D.eval(F, 2.0)


def test_mixture_rejects_bad_weights():
    F = D.eps0(GRID)
    with pytest.raises(ValueError):
        D.mixture([0.7, 0.7], [F, F])
    with pytest.raises(ValueError):
        D.mixture([-0.1], [F])


def test_dist_to_eps0():
    G = D.ratio(1.0)
    assert D.dist_to_eps0(G, 0.9)          # 0.474 > 0.1
    assert not D.dist_to_eps0(G, 0.1)      # 0.0909 < 0.9
    with pytest.raises(ValueError):
        D.dist_to_eps0(G, 0.0)
