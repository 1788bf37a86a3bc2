"""The M_b family and m-transforms of distance distribution functions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import ddf as D
from .ddf import DDF, Grid
from .report import Tracker, VerificationReport, combine, trial_rng
from .trifn import TriangleFunction


@dataclass(frozen=True, eq=False)
class MbFunction:
    """Continuous strictly increasing m from [0, b] onto [0, inf].

    kinds: ``power`` (x**gamma, b = inf), ``blowup`` (x / (b - x)),
    ``user`` (closed forms ``m`` and ``m_inv``).
    """

    kind: str
    b: float = math.inf
    gamma: float = 1.0
    m: Callable | None = field(default=None, repr=False)
    m_inv: Callable | None = field(default=None, repr=False)
    name: str = ""

    def __post_init__(self):
        if self.kind == "power":
            if self.gamma < 1:
                raise ValueError("power kind needs gamma >= 1 (use a user pair otherwise)")
            object.__setattr__(self, "b", math.inf)
        elif self.kind == "blowup":
            if not 0 < self.b < math.inf:
                raise ValueError("blowup needs a finite b > 0")
        elif self.kind == "user":
            if self.m is None or self.m_inv is None:
                raise ValueError("user kind needs m and m_inv")
        else:
            raise ValueError(f"unknown M_b kind {self.kind!r}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if self.kind == "power":
                return np.power(x, self.gamma)
            if self.kind == "blowup":
                return np.where(x >= self.b, np.inf, x / (self.b - x))
            return np.asarray(self.m(x), dtype=float)

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if self.kind == "power":
                return np.power(y, 1.0 / self.gamma)
            if self.kind == "blowup":
                return np.where(np.isinf(y), self.b, self.b * y / (1.0 + y))
            return np.asarray(self.m_inv(y), dtype=float)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "power":
            return f"pow:{self.gamma:g}"
        if self.kind == "blowup":
            return f"blowup:{self.b:g}"
        return "user"


def power(gamma: float) -> MbFunction:
    return MbFunction("power", gamma=float(gamma))


def blowup(b: float) -> MbFunction:
    return MbFunction("blowup", b=float(b))


IDENTITY = MbFunction("power", gamma=1.0, name="identity")
SQRT = MbFunction("user", m=np.sqrt, m_inv=np.square, name="sqrt")


def parse_m(name: str) -> MbFunction:
    """``pow:<gamma>`` | ``blowup:<b>`` | ``identity`` | ``sqrt``."""
    if name == "identity":
        return IDENTITY
    if name == "sqrt":
        return SQRT
    kind, _, arg = name.partition(":")
    try:
        if kind == "pow":
            return power(float(arg))
        if kind == "blowup":
            return blowup(float(arg))
    except ValueError as e:
        raise KeyError(f"bad m-function {name!r}: {e}") from None
    raise KeyError(f"unknown m-function {name!r}")


def transform_curve(curve: Callable, m: MbFunction, limit: float) -> Callable:
    """Closed-form (Fm)(x) for a vectorised F with limit ``limit`` at infinity."""

    def fm(x):
        x = np.asarray(x, dtype=float)
        inside = x < m.b
        y = np.where(inside, m(np.where(inside, x, 0.0)), 0.0)
        vals = np.where(inside, curve(y), 0.0)
        if math.isinf(m.b):
            return np.where(np.isinf(x), limit, vals)
        # m(b) = inf, so the left limit at b is the limit of F itself
        return np.where(x > m.b, 1.0, np.where(x == m.b, limit, vals))

    return fm


def m_transform(F: DDF | D.AnalyticDDF | Callable, m: MbFunction, grid: Grid | None = None,
                limit: float | None = None) -> DDF:
    """Fm on a grid.

    F may be a grid DDF (read with the cell convention, which is exact for the
    step function it represents), an analytic DDF, or a vectorised callable
    with its ``limit`` at infinity.
    """
    if isinstance(F, DDF):
        grid = grid or F.grid
        curve = lambda x: D.eval_many(F, x)  # noqa: E731
        limit = F.at_inf
    elif isinstance(F, D.AnalyticDDF):
        grid = grid or Grid()
        curve, limit = F, F.limit
    else:
        if limit is None:
            raise ValueError("callable F needs its limit at infinity")
        grid = grid or Grid()
        curve = F
    fm = transform_curve(curve, m, limit)
    vals = np.array(fm(grid.xs), dtype=float)
    vals[0] = 0.0
    at_inf = limit if math.isinf(m.b) else 1.0
    return D.regularize(DDF(vals, grid.x_max, at_inf))


# --------------------------------------------------------------- campaigns


def _sample_xy(rng, b: float, m: int):
    if math.isinf(b):
        x = np.exp(rng.uniform(np.log(1e-4), np.log(50.0), m))
        y = np.exp(rng.uniform(np.log(1e-4), np.log(50.0), m))
        small = rng.random(m) < 0.2
        x[small] = rng.uniform(0.0, 2.0, int(small.sum()))
        return x, y
    s = rng.random(m) * b
    x = s * rng.random(m)
    return x, s - x


def check_superadditive(m: MbFunction, trials: int = 10_000, seed: int = 0,
                        tol: float = 1e-9, batch: int = 4096) -> VerificationReport:
    """m(x + y) >= m(x) + m(y) for x + y within [0, b]; tolerance is relative."""
    tr = Tracker(["superadditive"], tol)
    for start in range(0, trials, batch):
        k = min(batch, trials - start)
        rng = trial_rng(seed, start)
        x, y = _sample_xy(rng, m.b, k)
        mx, my, mxy = m(x), m(y), m(x + y)
        with np.errstate(invalid="ignore"):
            gap = (mx + my - mxy) / (1.0 + mx + my)
        gap = np.nan_to_num(gap, nan=-1.0)
        i = int(np.argmax(gap))
        tr.update("superadditive", float(gap[i]),
                  {"x": float(x[i]), "y": float(y[i]), "m(x+y)": float(mxy[i]),
                   "m(x)+m(y)": float(mx[i] + my[i])}, k)
    return tr.report(f"superadditive[{m.label}]", trials, claim=f"{m.label} is superadditive",
                     one_sided=True)


def campaign_grid(m: MbFunction, n: int) -> Grid:
    # finite b compresses everything into [0, b]; give that interval the grid
    return Grid(n, 16.0 if math.isinf(m.b) else 4.0 * m.b)


def tau_superadditivity_gap(m: MbFunction, t: TriangleFunction, F: DDF, G: DDF,
                            cells: int = 1) -> tuple[D.Comparison, D.Comparison]:
    """(RHS - LHS excess, LHS - RHS excess) for t(F,G)m >= t(Fm,Gm)."""
    lhs = m_transform(t(F, G), m)
    rhs = t(m_transform(F, m), m_transform(G, m))
    return D.excess(rhs, lhs, cells), D.excess(lhs, rhs, cells)


def tau_superadditive_table(ms, ts, trials: int = 10_000, seed: int = 0, grid: Grid | None = None,
                            cells: int = 1, tol: float = D.TOL_ITER) -> dict:
    """t(F, G)m >= t(Fm, Gm) for every (m, t) pair on shared samples.

    All m must share a campaign grid.  Returns {(m.label, t.name): report};
    each report equals the one check_tau_superadditive gives for that pair.
    """
    from .sampling import random_ddf

    grids = {campaign_grid(m, 256) for m in ms}
    if grid is None:
        if len(grids) != 1:
            raise ValueError("m-functions with different campaign grids; pass grid explicitly")
        grid = grids.pop()
    keys = [(m, t) for m in ms for t in ts]
    trackers = {(m.label, t.name): Tracker(["tau-superadditive"], tol) for m, t in keys}
    reverse = {k: 0.0 for k in trackers}
    for i in range(trials):
        rng = trial_rng(seed, i)
        F, G = random_ddf(rng, grid), random_ddf(rng, grid)
        tFG = {t.name: t(F, G) for t in ts}
        for m in ms:
            Fm, Gm = m_transform(F, m), m_transform(G, m)
            for t in ts:
                k = (m.label, t.name)
                lhs, rhs = m_transform(tFG[t.name], m), t(Fm, Gm)
                fwd, back = D.excess(rhs, lhs, cells), D.excess(lhs, rhs, cells)
                reverse[k] = max(reverse[k], back.worst)
                tr = trackers[k]
                w = ({"trial": i, "x": fwd.x, "F": F, "G": G}
                     if fwd.worst > tr.worst["tau-superadditive"] else None)
                tr.update("tau-superadditive", fwd.worst, w)
    out = {}
    for m, t in keys:
        k = (m.label, t.name)
        rep = trackers[k].report(f"tau-superadditive[{m.label},{t.name}]", trials,
                                 claim=f"{m.label} is {t.name}-superadditive", one_sided=True)
        rep.checks["tau-superadditive"]["reverse_gap"] = reverse[k]
        out[k] = rep
    return out


def with_scalar_verdict(rep: VerificationReport, m: MbFunction, trials: int,
                        seed: int) -> VerificationReport:
    """Attach the scalar superadditivity verdict and whether it agrees."""
    scalar = check_superadditive(m, trials, seed)
    agree = scalar.verdict == rep.verdict
    out = combine(rep.name, rep.trials, {"tau-superadditive": rep.checks["tau-superadditive"]},
                  rep.claim, one_sided=True)
    out.checks["superadditive"] = {"verdict_scalar": scalar.verdict, "worst": scalar.worst,
                                   "agrees": agree, "verdict": "pass" if agree else "fail",
                                   "witness": scalar.witness}
    if not agree:
        out.notes.append("scalar and functional superadditivity verdicts disagree")
    return out


def check_tau_superadditive(m: MbFunction, t: TriangleFunction, trials: int = 10_000,
                            seed: int = 0, grid: Grid | None = None, cells: int = 1,
                            tol: float = D.TOL_ITER, with_scalar: bool = True) -> VerificationReport:
    """t(F, G)m >= t(Fm, Gm) on sampled pairs from the mixed DDF family.

    The report also carries the scalar superadditivity verdict and whether
    the two agree.
    """
    rep = tau_superadditive_table([m], [t], trials, seed, grid, cells, tol)[(m.label, t.name)]
    return with_scalar_verdict(rep, m, trials, seed) if with_scalar else rep
