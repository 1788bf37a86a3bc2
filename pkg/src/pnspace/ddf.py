"""Distance distribution functions on a uniform grid.

A grid DDF stores ``values[k] = F(x_k)`` at ``x_k = k * h`` for ``k = 0..n``.
Between grid points the function is read with the left-continuous cell
convention: on ``(x_{k-1}, x_k]`` it equals ``values[k]``.  Every grid DDF is
therefore an exact member of Delta+ (a nondecreasing, left-continuous step
function), and the step function ``eps_a`` with ``a`` on the grid is
represented without error.

``at_inf`` is the limit of F at +infinity.  It equals 1 for functions in D+,
and is also what :func:`eval` returns for any abscissa beyond ``x_max``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

TOL_CLOSED = 1e-9
TOL_ITER = 1e-6

# snaps abscissae that are on the grid up to float noise
_SNAP = 1e-9


@dataclass(frozen=True)
class Grid:
    n: int = 1024
    x_max: float = 16.0

    def __post_init__(self):
        if self.n < 1 or not self.x_max > 0:
            raise ValueError(f"bad grid n={self.n} x_max={self.x_max}")

    @property
    def h(self) -> float:
        return self.x_max / self.n

    @property
    def xs(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.h

    def index_ceil(self, x: float) -> int:
        """Index of the cell containing ``x`` (left-continuous reading)."""
        return max(0, math.ceil(x / self.h - _SNAP))

    def nearest(self, x: float) -> int:
        return int(round(x / self.h))

    def to_json(self) -> dict:
        return {"n": self.n, "x_max": self.x_max}


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DDF:
    """Grid-sampled distance distribution function."""

    values: np.ndarray
    x_max: float = 16.0
    at_inf: float = 1.0
    # mass missing from a truncated mixture
    deficit: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        if self.values.ndim != 1 or self.values.size < 2:
            raise ValueError("values must be a 1-D array with at least two points")

    @property
    def n(self) -> int:
        return self.values.size - 1

    @property
    def grid(self) -> Grid:
        return Grid(self.n, self.x_max)

    @property
    def h(self) -> float:
        return self.x_max / self.n

    @property
    def is_eps_inf(self) -> bool:
        """True for the minimum of the order (zero everywhere, zero limit)."""
        return self.at_inf == 0.0 and not self.values.any()

    def __call__(self, x):
        return eval(self, x)

    def invariant_violations(self, tol: float = TOL_CLOSED) -> list[str]:
        v = self.values
        out = []
        if v[0] != 0.0:
            out.append(f"F(0) = {v[0]} != 0")
        if v.min() < -tol or v.max() > 1 + tol:
            out.append("values outside [0,1]")
        if np.any(np.diff(v) < -tol):
            out.append("values not nondecreasing")
        if not (-tol <= self.at_inf <= 1 + tol) or self.at_inf < v[-1] - tol:
            out.append(f"at_inf = {self.at_inf} inconsistent with F(x_max) = {v[-1]}")
        return out

    def to_json(self) -> dict:
        return {
            "kind": "grid",
            "grid": {
                "x_max": self.x_max,
                "n": self.n,
                "values": [float(x) for x in self.values],
                "at_inf": float(self.at_inf),
            },
        }

    def same_grid(self, other: "DDF") -> bool:
        return self.n == other.n and self.x_max == other.x_max


# ---------------------------------------------------------------- analytic


@dataclass(frozen=True, eq=False)
class AnalyticDDF:
    """Closed-form DDF: ``step``, ``ratio``, ``expc`` or ``user``.

    ratio:  G(x) = x / (x + c)
    expc:   G(x) = 1 - exp(-x / c)
    step:   eps_a
    user:   any nondecreasing ``func`` with optional closed-form ``inv``.
    """

    kind: str
    params: tuple = ()
    func: Callable | None = field(default=None, repr=False)
    inv: Callable | None = field(default=None, repr=False)
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("step", "ratio", "expc", "user"):
            raise ValueError(f"unknown analytic DDF kind {self.kind!r}")
        if self.kind in ("ratio", "expc") and not self.params[0] > 0:
            raise ValueError(f"{self.kind} needs c > 0")
        if self.kind == "user" and self.func is None:
            raise ValueError("user kind needs func")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "step":
            (a,) = self.params
            return np.where(x > a, 1.0, 0.0)
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            if self.kind == "ratio":
                (c,) = self.params
                out = np.where(np.isinf(x), 1.0, x / (x + c))
            elif self.kind == "expc":
                (c,) = self.params
                out = -np.expm1(-x / c)
            else:
                out = np.asarray(self.func(x), dtype=float)
        return out

    @property
    def has_inverse(self) -> bool:
        return self.kind in ("ratio", "expc") or self.inv is not None

    def inverse(self, y):
        """Closed-form quantile on [0, 1]; G^-1(0) = 0 and G^-1(1) = inf."""
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "ratio":
                (c,) = self.params
                return np.where(y >= 1.0, np.inf, c * y / (1.0 - y))
            if self.kind == "expc":
                (c,) = self.params
                return np.where(y >= 1.0, np.inf, -c * np.log1p(-y))
        if self.inv is None:
            raise ValueError(f"{self.label} has no closed-form inverse")
        return np.asarray(self.inv(y), dtype=float)

    @property
    def limit(self) -> float:
        return float(self(np.inf))

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "user":
            return "user"
        return f"{self.kind}:" + ":".join(f"{p:g}" for p in self.params)

    def sample(self, grid: Grid) -> DDF:
        if self.kind == "step":
            return make_eps(self.params[0], grid)
        vals = np.array(self(grid.xs), dtype=float)
        vals[0] = 0.0
        return DDF(vals, grid.x_max, self.limit)

    def to_json(self) -> dict:
        if self.kind == "user":
            raise ValueError("user DDFs are not serialisable")
        keys = {"step": ("a",), "ratio": ("c",), "expc": ("c",)}[self.kind]
        return {"kind": self.kind, "parameters": dict(zip(keys, map(float, self.params)))}


def ratio(c: float = 1.0) -> AnalyticDDF:
    return AnalyticDDF("ratio", (float(c),))


def expc(c: float = 1.0) -> AnalyticDDF:
    return AnalyticDDF("expc", (float(c),))


def step(a: float) -> AnalyticDDF:
    return AnalyticDDF("step", (float(a),))


def from_json(obj: dict) -> DDF | AnalyticDDF:
    kind = obj["kind"]
    if kind == "grid":
        g = obj["grid"]
        return DDF(np.array(g["values"], dtype=float), float(g["x_max"]), float(g["at_inf"]))
    p = obj.get("parameters", {})
    if kind == "step":
        return step(p["a"])
    if kind in ("ratio", "expc"):
        return AnalyticDDF(kind, (float(p["c"]),))
    raise ValueError(f"cannot deserialise DDF kind {kind!r}")


# -------------------------------------------------------------- operations


def eval(F: DDF | AnalyticDDF, x: float) -> float:
    """F(x) for x >= 0 or x = inf."""
    x = float(x)
    if x < 0 or math.isnan(x):
        raise ValueError(f"DDF evaluated at negative abscissa {x}")
    if isinstance(F, AnalyticDDF):
        return float(F(x))
    if math.isinf(x):
        return float(F.at_inf)
    k = math.ceil(x / F.h - _SNAP) if x > 0 else 0
    if k > F.n:
        return float(F.at_inf)
    return float(F.values[max(k, 0)])


def eval_many(F: DDF, xs: np.ndarray) -> np.ndarray:
    """Vectorised :func:`eval` for a grid DDF."""
    xs = np.asarray(xs, dtype=float)
    if np.any(xs < 0):
        raise ValueError("DDF evaluated at negative abscissa")
    with np.errstate(invalid="ignore", over="ignore"):
        k = np.ceil(xs / F.h - _SNAP)
    k = np.where(xs > 0, k, 0)
    beyond = ~(k <= F.n)  # also catches inf and nan
    idx = np.clip(np.nan_to_num(k, posinf=F.n), 0, F.n).astype(np.int64)
    return np.where(beyond, F.at_inf, F.values[idx])


def make_eps(a: float, grid: Grid | None = None) -> DDF:
    """Unit step at ``a``, snapped to the nearest grid abscissa.

    ``a = inf`` gives eps_inf: zero on the grid with zero limit, the minimum
    of the order.  A finite ``a`` beyond ``x_max`` is zero on the grid but
    keeps limit 1.
    """
    grid = grid or Grid()
    vals = np.zeros(grid.n + 1)
    if math.isinf(a):
        return DDF(vals, grid.x_max, 0.0)
    if a < 0:
        raise ValueError("step point must be nonnegative")
    k = grid.nearest(a)
    vals[k + 1 :] = 1.0
    return DDF(vals, grid.x_max, 1.0)


def eps0(grid: Grid | None = None) -> DDF:
    return make_eps(0.0, grid)


def zero(grid: Grid | None = None) -> DDF:
    grid = grid or Grid()
    return DDF(np.zeros(grid.n + 1), grid.x_max, 0.0)


def is_eps0(F: DDF) -> bool:
    return F.values[0] == 0.0 and bool(np.all(F.values[1:] == 1.0)) and F.at_inf == 1.0


def resample(F: DDF, grid: Grid) -> DDF:
    if F.n == grid.n and F.x_max == grid.x_max:
        return F
    vals = eval_many(F, grid.xs)
    vals[0] = 0.0
    return DDF(vals, grid.x_max, F.at_inf, F.deficit)


def common_grid(Fs: Sequence[DDF]) -> Grid:
    """Finest grid among the inputs (ties broken by the larger x_max)."""
    return min((F.grid for F in Fs), key=lambda g: (g.h, -g.x_max))


def align(*Fs: DDF) -> list[DDF]:
    if all(F.same_grid(Fs[0]) for F in Fs):
        return list(Fs)
    g = common_grid(Fs)
    return [resample(F, g) for F in Fs]


def mixture(weights: Sequence[float], Fs: Sequence[DDF], grid: Grid | None = None) -> DDF:
    """Weighted pointwise sum; ``deficit`` records ``1 - sum(weights)``."""
    weights = [float(w) for w in weights]
    if len(weights) != len(Fs):
        raise ValueError("weights and functions differ in length")
    if any(w < 0 for w in weights):
        raise ValueError("negative mixture weight")
    total = math.fsum(weights)
    if total > 1 + 1e-12:
        raise ValueError(f"mixture weights sum to {total} > 1")
    if not Fs:
        g = grid or Grid()
        return DDF(np.zeros(g.n + 1), g.x_max, 0.0, 1.0)
    Fs = align(*Fs)
    vals = np.zeros(Fs[0].n + 1)
    at_inf = 0.0
    for w, F in zip(weights, Fs):
        vals += w * F.values
        at_inf += w * F.at_inf
    return DDF(np.clip(vals, 0.0, 1.0), Fs[0].x_max, min(at_inf, 1.0), max(0.0, 1.0 - total))


@dataclass(frozen=True)
class Comparison:
    holds: bool
    worst: float
    x: float | None = None

    def __bool__(self):
        return self.holds


def violation_profile(F: DDF, G: DDF, cells: int = 0) -> np.ndarray:
    """``F[k] - G[k + cells]``, the amount by which F <= G fails at x_k.

    ``cells`` shifts the comparison right, allowing that many grid cells of
    horizontal slack.  The last entry compares the limits at infinity.
    """
    F, G = align(F, G)
    n = F.n
    # past x_max a grid DDF reads its limit
    ext = np.append(G.values, np.full(cells, G.at_inf))
    diff = F.values - ext[cells : cells + n + 1]
    return np.append(diff, F.at_inf - G.at_inf)


def excess(F: DDF, G: DDF, cells: int = 0) -> Comparison:
    """Largest ``F - G`` (shifted by ``cells``) and where it occurs; holds iff <= 0."""
    diff = violation_profile(F, G, cells)
    k = int(np.argmax(diff))
    worst = float(diff[k])
    x = math.inf if k == diff.size - 1 else k * F.h
    return Comparison(worst <= 0.0, worst, x)


def le(F: DDF, G: DDF, tol: float = TOL_CLOSED, cells: int = 0) -> Comparison:
    """F <= G pointwise on the grid and at infinity, within ``tol``."""
    c = excess(F, G, cells)
    if c.worst <= tol:
        return Comparison(True, max(c.worst, 0.0))
    return Comparison(False, c.worst, c.x)


def close(F: DDF, G: DDF, tol: float = TOL_CLOSED, cells: int = 0) -> Comparison:
    """Equality within ``tol`` vertically and ``cells`` horizontally."""
    a = le(F, G, tol, cells)
    b = le(G, F, tol, cells)
    if a.holds and b.holds:
        return Comparison(True, max(a.worst, b.worst))
    return a if not a.holds else b


def left_regularize(values, x_max: float = 16.0, at_inf: float | None = None) -> DDF:
    """Project raw samples back into Delta+: clamp, running max, F(0) = 0."""
    v = np.clip(np.asarray(values, dtype=float), 0.0, 1.0)
    v[0] = 0.0
    v = np.maximum.accumulate(v)
    lim = v[-1] if at_inf is None else min(max(float(at_inf), v[-1]), 1.0)
    return DDF(v, x_max, lim)


def regularize(F: DDF) -> DDF:
    out = left_regularize(F.values, F.x_max, F.at_inf)
    if F.deficit:
        out = DDF(out.values, out.x_max, out.at_inf, F.deficit)
    return out


def dist_to_eps0(F: DDF | AnalyticDDF, t: float) -> bool:
    """Whether the modified Levy distance from F to eps_0 is below ``t``."""
    if not t > 0:
        raise ValueError("t must be positive")
    return eval(F, t) > 1.0 - t


def sample_curve(curve: Callable, grid: Grid, at_inf: float | None = None) -> DDF:
    vals = np.array(curve(grid.xs), dtype=float)
    vals[0] = 0.0
    lim = float(curve(np.array([np.inf]))[0]) if at_inf is None else at_inf
    return DDF(vals, grid.x_max, lim)
