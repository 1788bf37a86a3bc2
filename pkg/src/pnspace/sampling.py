"""Random DDFs and vectors for property campaigns."""

from __future__ import annotations

import numpy as np

from . import ddf as D
from .ddf import DDF, Grid


def random_step(rng: np.random.Generator, grid: Grid, reach: float = 0.5) -> DDF:
    if rng.random() < 0.1:
        return D.eps0(grid)
    k = int(rng.integers(0, int(grid.n * reach) + 1))
    return D.make_eps(k * grid.h, grid)


def random_step_mixture(rng: np.random.Generator, grid: Grid, reach: float = 0.5) -> DDF:
    m = int(rng.integers(2, 5))
    w = rng.dirichlet(np.ones(m))
    if rng.random() < 0.2:
        # mass escaping to infinity: in Delta+ but not D+
        w *= rng.uniform(0.5, 1.0)
    Fs = [random_step(rng, grid, reach) for _ in range(m)]
    return D.mixture(w, Fs)


def random_analytic(rng: np.random.Generator, grid: Grid) -> DDF:
    c = float(np.exp(rng.uniform(np.log(0.05), np.log(2.0))))
    G = D.ratio(c) if rng.random() < 0.5 else D.expc(c)
    return G.sample(grid)


def random_ddf(rng: np.random.Generator, grid: Grid, analytic: float = 0.2) -> DDF:
    """Mixed family: steps, step mixtures and sampled ratio/exponential curves."""
    u = rng.random()
    if u < analytic:
        return random_analytic(rng, grid)
    if u < analytic + (1 - analytic) / 3:
        return random_step(rng, grid)
    return random_step_mixture(rng, grid)


def random_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.standard_normal(dim)


def vector_pair(rng: np.random.Generator, dim: int, trial: int) -> tuple[np.ndarray, np.ndarray]:
    """(p, q) with an adversarial schedule: theta, p = q, p = -q, axis vectors."""
    p = random_vector(rng, dim)
    q = random_vector(rng, dim)
    case = trial % 8
    if case == 0:
        p = np.zeros(dim)
    elif case == 1:
        q = p.copy()
    elif case == 2:
        q = -p
    elif case == 3:
        p = np.eye(dim)[trial // 8 % dim]
        q = np.eye(dim)[(trial // 8 + 1) % dim]
    elif case == 4:
        q = np.zeros(dim)
    return p, q


def scalar_alpha(rng: np.random.Generator, trial: int) -> float:
    """Uniform on [0, 1] with the endpoints forced now and then."""
    case = trial % 9
    if case == 0:
        return 0.0
    if case == 1:
        return 1.0
    return float(rng.random())


def scalar_lambda(rng: np.random.Generator) -> float:
    lam = float(np.exp(rng.uniform(np.log(1e-3), np.log(1e3))))
    return lam if rng.random() < 0.5 else -lam
