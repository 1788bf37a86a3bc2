"""Triangle functions on grid DDFs.

Grid DDFs are cell functions (constant on each ``(x_{k-1}, x_k]``), and the
class is closed under sup-convolution: for two cell functions F, G

    tau_T(F, G)(x_k) = max_{i + j = k + 1, i, j >= 1} T(F_i, G_j),

because a split u + v = x_k with u inside cell i puts v inside cell k + 1 - i.
The kernel below computes exactly this, so identities such as
``tau(F, eps0) = F`` and ``tau(eps_s, eps_t) = eps_{s+t}`` hold with no
discretisation error.  The conorm inf-convolution uses the closed splits
``i + j = k`` instead, which is exact for the same reason.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import ddf as D
from .ddf import DDF, Grid
from .report import Tracker, VerificationReport, trial_rng
from .tnorm import TNorm, parse_tnorm

# inputs with at most this many value changes take the sparse path
SPARSE_JUMPS = 48


def _antidiag(A: np.ndarray, reduce: str) -> np.ndarray:
    """``r[s] = reduce_{i + j = s} A[i, j]`` for s < A.shape[0]."""
    m = A.shape[0]
    pad = -np.inf if reduce == "max" else np.inf
    P = np.full((m, 2 * m), pad)
    P[:, :m] = A
    skew = P.ravel()[: m * (2 * m - 1)].reshape(m, 2 * m - 1)[:, :m]
    return skew.max(axis=0) if reduce == "max" else skew.min(axis=0)


def _jumps(v: np.ndarray) -> np.ndarray:
    """Indices i >= 1 where v_i differs from v_{i-1}, plus 1 (run starts)."""
    d = np.flatnonzero(v[2:] != v[1:-1]) + 2
    return np.concatenate(([1], d))


def sup_convolve(T: TNorm, F: DDF, G: DDF) -> DDF:
    """tau_T(F, G) on the common grid."""
    F, G = D.align(F, G)
    n = F.n
    f, g = F.values, G.values
    out = np.zeros(n + 1)
    jf, jg = _jumps(f), _jumps(g)
    if min(jf.size, jg.size) <= SPARSE_JUMPS:
        # a run of equal F values is dominated by its first index
        if jg.size < jf.size:
            f, g, jf = g, f, jg
        acc = np.full(n + 1, -np.inf)
        for i in jf:
            # k runs over i..n, j = k + 1 - i over 1..n + 1 - i
            vals = T.fn(f[i], g[1 : n + 2 - i])
            np.maximum(acc[i:], vals, out=acc[i:])
        out[1:] = acc[1:]
    elif T.via_generator:
        # strict T: maximise T by minimising f(F_i) + f(G_j)
        a, b = T.generator(f[1:]), T.generator(g[1:])
        s = _antidiag(a[:, None] + b[None, :], "min")
        out[1:] = T.generator_inv(s)
    else:
        A = T.fn(f[1:, None], g[None, 1:])
        out[1:] = _antidiag(A, "max")
    out[0] = 0.0
    lim = float(T(F.at_inf, G.at_inf))
    return D.regularize(DDF(out, F.x_max, lim))


def inf_convolve(S: TNorm, F: DDF, G: DDF) -> DDF:
    """tau_{S}(F, G)(x) = inf over u + v = x of S(F(u), G(v)), for a conorm S."""
    F, G = D.align(F, G)
    f, g = F.values, G.values
    A = S.fn(f[:, None], g[None, :])
    out = _antidiag(A, "min")
    out[0] = 0.0
    # the splits (x, 0) and (0, x) pin the limit to min(F(inf), G(inf))
    lim = max(min(F.at_inf, G.at_inf), float(out[-1]))
    return D.regularize(DDF(out, F.x_max, lim))


def lift(T: TNorm, F: DDF, G: DDF) -> DDF:
    """Pointwise T(F(x), G(x))."""
    F, G = D.align(F, G)
    vals = T.fn(F.values, G.values)
    return DDF(np.clip(vals, 0.0, 1.0), F.x_max, float(T(F.at_inf, G.at_inf)))


_KINDS = {
    "tau": sup_convolve,
    "lift": lift,
    "taustar": inf_convolve,
    "liftstar": lift,
}


@dataclass(frozen=True, eq=False)
class TriangleFunction:
    """``tau`` (sup-convolution), ``lift`` (pointwise), and the conorm forms
    ``taustar`` (inf-convolution) and ``liftstar`` (pointwise conorm).

    ``liftstar`` is not a triangle function in the strict sense (eps_0 is not
    its identity); it only serves as the upper bound in the fourth axiom.
    """

    kind: str
    op: TNorm

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown triangle function kind {self.kind!r}")
        if self.kind.endswith("star") != self.op.is_conorm:
            raise ValueError(f"{self.kind} needs a {'conorm' if self.kind.endswith('star') else 't-norm'}")

    def __call__(self, F: DDF, G: DDF) -> DDF:
        return _KINDS[self.kind](self.op, F, G)

    @property
    def name(self) -> str:
        return f"{self.kind}:{self.op.name}"

    def __repr__(self):
        return f"TriangleFunction({self.name})"


def tau(T: TNorm) -> TriangleFunction:
    return TriangleFunction("tau", T)


def lift_of(T: TNorm) -> TriangleFunction:
    return TriangleFunction("lift", T)


def tau_star(S: TNorm) -> TriangleFunction:
    return TriangleFunction("taustar", S)


def lift_star(S: TNorm) -> TriangleFunction:
    return TriangleFunction("liftstar", S)


TAU_M = TriangleFunction("tau", parse_tnorm("M"))


def parse_trifn(name: str, ddfs: dict | None = None) -> TriangleFunction:
    """``tau:W`` | ``lift:M`` | ``tau:TG:<g>:<alpha>`` | ``taustar:W*`` | ``liftstar:W*``."""
    kind, _, rest = name.partition(":")
    if kind not in _KINDS or not rest:
        raise KeyError(f"unknown triangle function {name!r}")
    op = parse_tnorm(rest, ddfs)
    if kind.endswith("star") and not op.is_conorm:
        op = parse_tnorm(rest + "*", ddfs)
    return TriangleFunction(kind, op)


def serial_iterate(t: TriangleFunction, Fs: Sequence[DDF]) -> DDF:
    """Left fold ``t(...t(t(F1, F2), F3)..., Fn)``."""
    if not Fs:
        raise ValueError("serial_iterate needs at least one function")
    acc = Fs[0]
    for F in Fs[1:]:
        acc = t(acc, F)
    return acc


@dataclass(frozen=True)
class Certificate:
    steps: int
    delta: float
    converged: bool
    sigma: float | None = None
    above_eps_sigma: bool | None = None

    def to_json(self) -> dict:
        return {"steps": self.steps, "delta": self.delta, "converged": self.converged,
                "sigma": self.sigma, "above_eps_sigma": self.above_eps_sigma}


def infinite_iterate(t: TriangleFunction, provider: Callable[[int], DDF] | Sequence[DDF],
                     n_max: int = 64, tol: float = D.TOL_ITER,
                     tail_sum: float | None = None) -> tuple[DDF, Certificate]:
    """Partial products ``t^n(F_1..F_{n+1})`` until successive sup-norm change < tol.

    ``provider`` maps 1-based indices to DDFs (a sequence is also accepted and
    caps ``n_max``).  With ``tail_sum`` = sum b_i the certificate records
    whether the limit sits above eps_sigma.  Pass ``tol=0`` to force all
    ``n_max`` steps.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if not callable(provider):
        seq = list(provider)
        n_max = min(n_max, len(seq) - 1)
        provider = lambda i: seq[i - 1]  # noqa: E731
    acc = provider(1)
    delta, steps = math.inf, 0
    for i in range(2, n_max + 2):
        nxt = t(acc, provider(i))
        nxt_a, acc_a = D.align(nxt, acc)
        delta = float(max(np.max(np.abs(nxt_a.values - acc_a.values)), abs(nxt.at_inf - acc.at_inf)))
        acc, steps = nxt, steps + 1
        if delta < tol:
            break
    acc = D.regularize(acc)
    above = None
    if tail_sum is not None:
        above = D.le(D.make_eps(tail_sum, acc.grid), acc, D.TOL_ITER, cells=1).holds
    return acc, Certificate(steps, delta, delta < tol, tail_sum, above)


# --------------------------------------------------------------- campaigns


def check_dominance(t1: TriangleFunction, t2: TriangleFunction, trials: int = 1000,
                    seed: int = 0, grid: Grid | None = None, cells: int = 1,
                    tol: float = D.TOL_ITER) -> VerificationReport:
    """Search for F1, F2, G1, G2 with t1(t2(F1,G1), t2(F2,G2)) < t2(t1(F1,F2), t1(G1,G2))."""
    from .sampling import random_ddf

    grid = grid or Grid(256, 16.0)
    tr = Tracker(["dominance"], tol)
    for i in range(trials):
        rng = trial_rng(seed, i)
        F1, F2, G1, G2 = (random_ddf(rng, grid) for _ in range(4))
        v = dominance_gap(t1, t2, F1, F2, G1, G2, cells)
        if v.worst > tr.worst["dominance"]:
            w = {"trial": i, "x": v.x, "F1": F1, "F2": F2, "G1": G1, "G2": G2}
        else:
            w = None
        tr.update("dominance", v.worst, w)
    return tr.report(f"dominates[{t1.name}>>{t2.name}]", trials,
                     claim=f"{t1.name} dominates {t2.name}", one_sided=True)


def dominance_gap(t1, t2, F1, F2, G1, G2, cells: int = 1) -> D.Comparison:
    lhs = t1(t2(F1, G1), t2(F2, G2))
    rhs = t2(t1(F1, F2), t1(G1, G2))
    return D.excess(rhs, lhs, cells)


def check_proper(t: TriangleFunction, trials: int = 500, seed: int = 0,
                 grid: Grid | None = None, cells: int = 1,
                 tol: float = D.TOL_ITER) -> VerificationReport:
    """t(eps_s, eps_t) >= eps_{s+t} for grid points s, t."""
    grid = grid or Grid(256, 16.0)
    tr = Tracker(["proper"], tol)
    for i in range(trials):
        rng = trial_rng(seed, i)
        s, u = (float(grid.h * rng.integers(0, grid.n // 2 + 1)) for _ in range(2))
        got = t(D.make_eps(s, grid), D.make_eps(u, grid))
        c = D.excess(D.make_eps(s + u, grid), got, cells)
        tr.update("proper", c.worst, {"s": s, "t": u, "x": c.x})
    return tr.report(f"proper[{t.name}]", trials, claim=f"{t.name}(eps_s, eps_t) >= eps_(s+t)",
                     one_sided=True)


def check_step_identity(t: TriangleFunction, trials: int = 500, seed: int = 0,
                        grid: Grid | None = None, tol: float = D.TOL_ITER) -> VerificationReport:
    """t(eps_s, eps_t) = eps_(s+t) within one cell either way, for real s, t."""
    grid = grid or Grid(256, 16.0)
    tr = Tracker(["step-identity"], tol)
    for i in range(trials):
        rng = trial_rng(seed, i)
        s, u = rng.uniform(0.0, grid.x_max / 2, 2)
        if i % 10 == 0:
            s = 0.0
        got = t(D.make_eps(s, grid), D.make_eps(u, grid))
        want = D.make_eps(s + u, grid)
        up, down = D.excess(got, want, 1), D.excess(want, got, 1)
        c = up if up.worst >= down.worst else down
        tr.update("step-identity", c.worst, {"s": float(s), "t": float(u), "x": c.x})
    return tr.report(f"step-identity[{t.name}]", trials,
                     claim=f"{t.name}(eps_s, eps_t) = eps_(s+t)", one_sided=True)
