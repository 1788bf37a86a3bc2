"""Norms, probabilistic norms, PN spaces and their axiom checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import ddf as D
from .ddf import DDF, AnalyticDDF, Grid
from .report import Tracker, VerificationReport, combine, trial_rng
from .sampling import scalar_alpha, scalar_lambda, vector_pair
from .tnorm import TNorm, make_tg
from .transform import MbFunction, transform_curve
from .trifn import TAU_M, TriangleFunction

make_TG = make_tg

_ATOMIC = ("l1", "l2", "linf")
_COMBINED = ("lbeta", "max", "sum")


@dataclass(frozen=True)
class Norm:
    """Atomic l1/l2/linf norms and the combined norms on a product carrier.

    A combined norm applies ``first`` to the leading ``split`` coordinates and
    ``second`` to the rest, then merges the two numbers by max, sum, or the
    beta-mean ``(a**beta + b**beta)**(1/beta)``.
    """

    kind: str = "l2"
    beta: float | None = None
    first: "Norm | None" = None
    second: "Norm | None" = None
    split: int = 0

    def __post_init__(self):
        if self.kind not in _ATOMIC + _COMBINED:
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind in _COMBINED:
            if self.first is None or self.second is None or self.split < 1:
                raise ValueError(f"{self.kind} needs two component norms and split >= 1")
            if self.kind == "lbeta" and not (self.beta and self.beta > 0):
                raise ValueError("lbeta needs beta > 0")

    def __call__(self, p) -> float:
        p = np.asarray(p, dtype=float)
        if self.kind == "l1":
            return float(np.abs(p).sum())
        if self.kind == "l2":
            return float(np.sqrt(np.dot(p, p)))
        if self.kind == "linf":
            return float(np.abs(p).max()) if p.size else 0.0
        a, b = self.first(p[: self.split]), self.second(p[self.split :])
        if self.kind == "max":
            return max(a, b)
        if self.kind == "sum":
            return a + b
        return (a ** self.beta + b ** self.beta) ** (1.0 / self.beta)

    def rows(self, P) -> np.ndarray:
        """The norm of every row of a 2-D array."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        if self.kind == "l1":
            return np.abs(P).sum(axis=1)
        if self.kind == "l2":
            return np.sqrt(np.einsum("ij,ij->i", P, P))
        if self.kind == "linf":
            return np.abs(P).max(axis=1)
        a, b = self.first.rows(P[:, : self.split]), self.second.rows(P[:, self.split :])
        if self.kind == "max":
            return np.maximum(a, b)
        if self.kind == "sum":
            return a + b
        return (a ** self.beta + b ** self.beta) ** (1.0 / self.beta)

    @property
    def label(self) -> str:
        if self.kind in _ATOMIC:
            return self.kind
        inner = f"{self.first.label},{self.second.label}"
        return f"{self.kind}({inner}{'' if self.beta is None else f';{self.beta:g}'})"


L1, L2, LINF = Norm("l1"), Norm("l2"), Norm("linf")


def combined(kind: str, first: Norm, second: Norm, split: int, beta: float | None = None) -> Norm:
    return Norm(kind, beta, first, second, split)


def is_theta(p) -> bool:
    return not np.any(np.asarray(p))


def _eps0_curve(t):
    t = np.asarray(t, dtype=float)
    return np.where(t > 0, 1.0, 0.0)


# ------------------------------------------------------------ prob. norms


class ProbNorm:
    """Map from vectors to DDFs.

    Subclasses with a closed form implement ``curve`` (a vectorised function of
    t) and ``limit``; grid-only ones override ``ddf`` and return None from
    ``curve``.
    """

    name = "probnorm"

    def curve(self, p) -> Callable | None:
        return None

    def limit(self, p) -> float:
        return 1.0

    closed_form = True

    def ddf(self, p, grid: Grid) -> DDF:
        c = self.curve(p)
        return D.regularize(D.sample_curve(c, grid, self.limit(p)))

    def value(self, p, t: float) -> float:
        if t < 0:
            raise ValueError("negative abscissa")
        c = self.curve(p)
        if c is not None:
            return float(self.limit(p)) if math.isinf(t) else float(c(np.array([t]))[0])
        return D.eval(self.ddf(p, Grid()), t)

    def values(self, P, t: float) -> np.ndarray:
        """nu_p(t) for every row p of P (subclasses vectorise this)."""
        return np.array([self.value(p, t) for p in np.atleast_2d(P)])

    def limits(self, P) -> np.ndarray:
        return np.array([self.limit(p) for p in np.atleast_2d(P)])


@dataclass(eq=False)
class AlphaSimple(ProbNorm):
    """nu_p(t) = G(t / ||p||**alpha); alpha = 1 is the simple space."""

    norm: Norm
    G: AnalyticDDF
    alpha: float = 1.0

    @property
    def name(self):
        return f"alpha-simple[{self.norm.label},{self.G.label},{self.alpha:g}]"

    def curve(self, p):
        n = self.norm(p)
        if n == 0.0:
            return _eps0_curve
        s = n ** self.alpha
        G = self.G
        return lambda t: G(np.asarray(t, dtype=float) / s)

    def limit(self, p):
        return 1.0 if is_theta(p) else self.G.limit

    def values(self, P, t):
        n = self.norm.rows(P)
        if t <= 0:
            return np.zeros_like(n)
        with np.errstate(divide="ignore"):
            out = self.G(t / n ** self.alpha)
        return np.where(n == 0, 1.0, out)

    def limits(self, P):
        n = self.norm.rows(P)
        return np.where(n == 0, 1.0, self.G.limit)


@dataclass(eq=False)
class Equilateral(ProbNorm):
    """nu_theta = eps_0 and nu_p = F for every other p."""

    F: DDF | AnalyticDDF

    name = "equilateral"

    def curve(self, p):
        if is_theta(p):
            return _eps0_curve
        if isinstance(self.F, DDF):
            F = self.F
            return lambda t: D.eval_many(F, t)
        return self.F

    def limit(self, p):
        if is_theta(p):
            return 1.0
        return self.F.at_inf if isinstance(self.F, DDF) else self.F.limit


@dataclass(eq=False)
class ExpNorm(ProbNorm):
    """nu_p equal to exp(-||p||) on ]0, inf[ and 0 at 0.

    ``limit`` is exp(-||p||): these functions sit in Delta+ but not in D+.
    """

    norm: Norm

    @property
    def name(self):
        return f"exp[{self.norm.label}]"

    def curve(self, p):
        level = math.exp(-self.norm(p))
        return lambda t: np.where(np.asarray(t, dtype=float) > 0, level, 0.0)

    def limit(self, p):
        return math.exp(-self.norm(p))

    def values(self, P, t):
        lvl = np.exp(-self.norm.rows(P))
        return lvl if t > 0 else np.zeros_like(lvl)

    def limits(self, P):
        return np.exp(-self.norm.rows(P))


@dataclass(eq=False)
class TransformedNorm(ProbNorm):
    """p -> (nu_p) m, for an m in M_b."""

    base: ProbNorm
    m: MbFunction

    @property
    def name(self):
        return f"{self.base.name}*{self.m.label}"

    def curve(self, p):
        c = self.base.curve(p)
        if c is None:
            return None
        return transform_curve(c, self.m, self.base.limit(p))

    def limit(self, p):
        return self.base.limit(p) if math.isinf(self.m.b) else 1.0

    def values(self, P, t):
        P = np.atleast_2d(P)
        if t <= 0:
            return np.zeros(len(P))
        if t > self.m.b:
            return np.ones(len(P))
        if t == self.m.b:
            return self.base.limits(P)
        y = float(self.m(t))
        return self.base.limits(P) if math.isinf(y) else self.base.values(P, y)

    def limits(self, P):
        P = np.atleast_2d(P)
        return self.base.limits(P) if math.isinf(self.m.b) else np.ones(len(P))

    def ddf(self, p, grid):
        if self.base.curve(p) is None:
            from .transform import m_transform

            return m_transform(self.base.ddf(p, grid), self.m, grid)
        return super().ddf(p, grid)


def alpha_simple(norm: Norm, G: AnalyticDDF, alpha: float) -> AlphaSimple:
    if alpha == 1:
        raise ValueError("alpha = 1 is the simple space; use simple()")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    _check_generator(G)
    return AlphaSimple(norm, G, float(alpha))


def simple(norm: Norm, G: AnalyticDDF) -> AlphaSimple:
    _check_generator(G)
    return AlphaSimple(norm, G, 1.0)


def equilateral(F: DDF | AnalyticDDF) -> Equilateral:
    if isinstance(F, DDF) and D.is_eps0(F):
        raise ValueError("equilateral space needs F != eps_0")
    return Equilateral(F)


def exp_norm(norm: Norm) -> ExpNorm:
    return ExpNorm(norm)


def _check_generator(G: AnalyticDDF):
    if G.kind == "step" and G.params[0] in (0.0, math.inf):
        raise ValueError("G must differ from eps_0 and eps_inf")


# ------------------------------------------------------------ spaces


@dataclass(frozen=True, eq=False)
class PNSpace:
    """Finite-dimensional carrier with a probabilistic norm and (tau, tau*)."""

    dim: int
    nu: ProbNorm
    tau: TriangleFunction
    tau_star: TriangleFunction
    declared: str = "PN"
    name: str = ""
    grid: Grid = field(default_factory=Grid)

    @property
    def slack(self) -> int:
        """Horizontal margin in cells for inequality checks on this space.

        A sampled closed form is exact at grid points and one convolution
        brackets the truth within one cell; a grid-computed norm is already
        bracketed within a cell, so composing it once more needs three.
        """
        return 1 if self.nu.closed_form else 3

    def norm_ddf(self, p) -> DDF:
        return self.nu.ddf(np.asarray(p, dtype=float), self.grid)

    def value(self, p, t: float) -> float:
        p = np.asarray(p, dtype=float)
        if self.nu.closed_form:
            return self.nu.value(p, t)
        return D.eval(self.norm_ddf(p), t)

    def with_pair(self, tau: TriangleFunction, tau_star: TriangleFunction, **kw) -> "PNSpace":
        from dataclasses import replace

        return replace(self, tau=tau, tau_star=tau_star, **kw)


# ------------------------------------------------------------ axiom checks

AXIOMS = ("N1", "N2", "N3", "N4", "tau<=tau*")


def axiom_gap(space: PNSpace, axiom: str, p, q=None, alpha: float = 0.5,
              cells: int = 1) -> D.Comparison:
    """Signed violation of one axiom at (p, q, alpha); positive means violated."""
    p = np.asarray(p, dtype=float)
    nu = space.norm_ddf
    if axiom == "N1":
        F = nu(p)
        if is_theta(p):
            return D.Comparison(D.is_eps0(F), 0.0 if D.is_eps0(F) else 1.0, None)
        # "only if": some grid t with nu_p(t) < 1, or a limit below 1
        hit = bool(np.any(F.values[1:] < 1.0)) or F.at_inf < 1.0
        return D.Comparison(hit, 0.0 if hit else 1.0, None)
    if axiom == "N2":
        a, b = nu(-p), nu(p)
        fwd, back = D.excess(a, b), D.excess(b, a)
        return fwd if fwd.worst >= back.worst else back
    q = np.asarray(q, dtype=float)
    if axiom == "N3":
        return D.excess(space.tau(nu(p), nu(q)), nu(p + q), cells)
    if axiom == "N4":
        return D.excess(nu(p), space.tau_star(nu(alpha * p), nu((1 - alpha) * p)), cells)
    if axiom == "tau<=tau*":
        F, G = nu(p), nu(q)
        return D.excess(space.tau(F, G), space.tau_star(F, G), cells)
    raise KeyError(axiom)


def verify_axioms(space: PNSpace, trials: int = 1000, seed: int = 0, cells: int | None = None,
                  tol: float = D.TOL_ITER, axioms=AXIOMS) -> VerificationReport:
    """N1-N4 and tau <= tau* on sampled vectors and scalars.

    Inequalities are read with ``cells`` of horizontal slack (default: the
    space's ``slack``) and ``tol`` of vertical slack; N1 at theta and N2 are
    checked with no slack.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cells = space.slack if cells is None else cells
    tr = Tracker(list(axioms), tol)
    nu = space.norm_ddf
    theta = np.zeros(space.dim)
    for i in range(trials):
        rng = trial_rng(seed, i)
        p, q = vector_pair(rng, space.dim, i)
        a = scalar_alpha(rng, i)
        Fp, Fq = nu(p), nu(q)
        wit = {"trial": i, "p": p, "q": q, "alpha": a}
        if "N1" in tr.worst:
            z = nu(theta)
            bad = 0.0 if D.is_eps0(z) else 1.0
            if not is_theta(p):
                ok = bool(np.any(Fp.values[1:] < 1.0)) or Fp.at_inf < 1.0
                bad = max(bad, 0.0 if ok else 1.0)
            tr.update("N1", bad, wit)
        if "N2" in tr.worst:
            Fm = nu(-p)
            d = float(max(np.max(np.abs(Fm.values - Fp.values)), abs(Fm.at_inf - Fp.at_inf)))
            # closed forms are exact; anything else gets the closed tolerance
            tr.update("N2", d if d > D.TOL_CLOSED else 0.0, wit)
        tau_pq = None
        if "N3" in tr.worst:
            tau_pq = space.tau(Fp, Fq)
            c = D.excess(tau_pq, nu(p + q), cells)
            tr.update("N3", c.worst, {**wit, "x": c.x})
        if "N4" in tr.worst:
            c = D.excess(Fp, space.tau_star(nu(a * p), nu((1 - a) * p)), cells)
            tr.update("N4", c.worst, {**wit, "x": c.x})
        if "tau<=tau*" in tr.worst:
            if tau_pq is None:
                tau_pq = space.tau(Fp, Fq)
            c = D.excess(tau_pq, space.tau_star(Fp, Fq), cells)
            tr.update("tau<=tau*", c.worst, {**wit, "x": c.x})
    return tr.report(f"axioms[{space.name or space.nu.name}]", trials,
                     claim=f"{space.name or space.nu.name} is a PN space under "
                           f"({space.tau.name}, {space.tau_star.name})",
                     one_sided=True)


def replay_axiom(space: PNSpace, witness: dict, cells: int | None = None) -> float:
    """Recompute the violation recorded in an axiom witness."""
    cells = space.slack if cells is None else cells
    axiom = witness["check"]
    p = np.asarray(witness["p"], dtype=float)
    q = np.asarray(witness["q"], dtype=float)
    if axiom == "N1":
        return max(axiom_gap(space, "N1", np.zeros_like(p)).worst, axiom_gap(space, "N1", p).worst)
    return axiom_gap(space, axiom, p, q, float(witness["alpha"]), cells).worst


def n3_values(space: PNSpace, p, q, t: float) -> tuple[float, float]:
    """(nu_{p+q}(t), tau(nu_p, nu_q)(t)) on the space's grid."""
    p, q = np.asarray(p, float), np.asarray(q, float)
    lhs = D.eval(space.norm_ddf(p + q), t)
    rhs = D.eval(space.tau(space.norm_ddf(p), space.norm_ddf(q)), t)
    return lhs, rhs


# ------------------------------------------------------------ Serstnev


def _read(F: DDF, idx: np.ndarray) -> np.ndarray:
    """F at integer grid indices, 0 below the grid and the limit above it."""
    out = np.where(idx > F.n, F.at_inf, F.values[np.clip(idx, 0, F.n)])
    return np.where(idx <= 0, 0.0, out)


def scaling_gap(nu: ProbNorm, p, lam: float, grid: Grid, rng=None) -> D.Comparison:
    """Violation of nu_{lam p}(t) = nu_p(t / |lam|).

    Closed forms are compared at sampled t.  Grid-only norms carry the
    bracket true(x_k) <= stored[k] <= true(x_{k+1}), which turns into a
    rigorous two-sided test at each grid abscissa.
    """
    p = np.asarray(p, dtype=float)
    a = abs(lam)
    if nu.curve(p) is not None:
        rng = rng or np.random.default_rng(0)
        t = np.concatenate((np.exp(rng.uniform(np.log(1e-3), np.log(1e3), 64)), [1.0]))
        lhs = nu.curve(lam * p)(t)
        rhs = nu.curve(p)(t / a)
        d = np.abs(lhs - rhs)
        k = int(np.argmax(d))
        return D.Comparison(bool(d[k] <= D.TOL_CLOSED), float(d[k]), float(t[k]))
    F, Fl = nu.ddf(p, grid), nu.ddf(lam * p, grid)
    k = np.arange(Fl.n + 1)
    with np.errstate(over="ignore"):
        lo_idx = np.floor(k / a - 1e-9).astype(np.int64) - 1
        hi_idx = np.ceil((k + 1) / a + 1e-9).astype(np.int64)
    # a lower bound may not borrow the limit at infinity
    lo, hi = _read(F, np.minimum(lo_idx, F.n)), _read(F, hi_idx)
    lo[0] = 0.0
    gap = np.maximum(lo - Fl.values, Fl.values - hi)
    gap[0] = 0.0
    j = int(np.argmax(gap))
    lim = abs(Fl.at_inf - F.at_inf)
    worst = max(float(gap[j]), lim)
    return D.Comparison(worst <= D.TOL_ITER, worst, j * grid.h)


def check_serstnev(space: PNSpace, trials: int = 100, seed: int = 0,
                   tol: float = D.TOL_ITER) -> VerificationReport:
    """nu_p = tau_M(nu_{a p}, nu_{(1-a) p}) within one cell, and the scaling law."""
    tr = Tracker(["N4-equality", "scaling"], tol)
    nu = space.norm_ddf
    for i in range(trials):
        rng = trial_rng(seed, i)
        p, _ = vector_pair(rng, space.dim, i + 1)  # skip the theta slot
        a = scalar_alpha(rng, i)
        lam = -1.0 if i % 11 == 3 else scalar_lambda(rng)
        Fp = nu(p)
        split = TAU_M(nu(a * p), nu((1 - a) * p))
        up, down = D.excess(split, Fp, space.slack), D.excess(Fp, split, space.slack)
        c = up if up.worst >= down.worst else down
        tr.update("N4-equality", c.worst, {"trial": i, "p": p, "alpha": a, "x": c.x})
        s = scaling_gap(space.nu, p, lam, space.grid, rng)
        tr.update("scaling", s.worst, {"trial": i, "p": p, "lambda": lam, "t": s.x})
    return tr.report(f"serstnev[{space.name or space.nu.name}]", trials,
                     claim="N4 holds with equality under tau_M and nu scales homogeneously",
                     one_sided=True)


# ------------------------------------------------------------ Menger condition


def menger_alpha_condition(norm: Norm, G: AnalyticDDF, alpha: float, T: TNorm,
                           trials: int = 10_000, seed: int = 0, dim: int = 2,
                           tol: float = 1e-9) -> VerificationReport:
    """||p+q||^a h(s+t) <= ||p||^a h(s) + ||q||^a h(t), h = (f o G)^-1.

    ``T`` supplies the additive generator f (through ``generator_inv``).
    Vectors avoid p = theta, q = theta and p + q = theta; s, t >= 1e-6.
    The tolerance is relative to the right-hand side.
    """
    if not T.strict:
        raise ValueError(f"{T.name} has no additive generator")
    if not alpha > 1:
        raise ValueError("the condition is stated for alpha > 1")

    def h(s):
        return G.inverse(T.generator_inv(s))

    tr = Tracker(["menger-condition"], tol)
    skipped = 0
    for i in range(trials):
        rng = trial_rng(seed, i)
        p, q = vector_pair(rng, dim, i)
        if is_theta(p) or is_theta(q) or is_theta(p + q):
            skipped += 1
            continue
        s, t = np.exp(rng.uniform(np.log(1e-6), np.log(1e3), 2))
        lhs = norm(p + q) ** alpha * h(s + t)
        rhs = norm(p) ** alpha * h(s) + norm(q) ** alpha * h(t)
        v = float((lhs - rhs) / max(abs(rhs), 1e-300))
        tr.update("menger-condition", v, {"trial": i, "p": p, "q": q, "s": s, "t": t})
    rep = tr.report(f"menger-alpha[{norm.label},{G.label},{alpha:g},{T.name}]", trials - skipped,
                    claim=f"alpha-simple space is Menger under {T.name}", one_sided=True)
    rep.notes.append(f"{skipped} trials skipped by the p, q, p+q != theta precondition")
    return rep


def check_norm_axioms(norm: Norm, dim: int, trials: int = 10_000, seed: int = 0,
                      tol: float = 1e-9) -> VerificationReport:
    """Definiteness, absolute homogeneity and the triangle inequality (relative tol)."""
    tr = Tracker(["definite", "homogeneous", "triangle"], tol)
    for i in range(trials):
        rng = trial_rng(seed, i)
        p, q = vector_pair(rng, dim, i)
        lam = scalar_lambda(rng)
        np_, nq = norm(p), norm(q)
        tr.update("definite", 0.0 if (np_ == 0) == is_theta(p) else 1.0, {"p": p})
        tr.update("homogeneous", abs(norm(lam * p) - abs(lam) * np_) / (1 + abs(lam) * np_),
                  {"p": p, "lambda": lam})
        tr.update("triangle", (norm(p + q) - np_ - nq) / (1 + np_ + nq), {"p": p, "q": q})
    return tr.report(f"norm-axioms[{norm.label}]", trials, claim=f"{norm.label} is a norm",
                     one_sided=True)


def space(nu: ProbNorm, dim: int, tau: TriangleFunction, tau_star: TriangleFunction,
          declared: str = "PN", name: str = "", grid: Grid | None = None) -> PNSpace:
    return PNSpace(dim, nu, tau, tau_star, declared, name, grid or Grid())
