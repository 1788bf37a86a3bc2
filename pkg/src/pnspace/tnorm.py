"""t-norms, t-conorms, additive generators and axiom campaigns."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ddf import AnalyticDDF
from .report import Tracker, VerificationReport, trial_rng

TOL_TNORM = 1e-12


@dataclass(frozen=True, eq=False)
class TNorm:
    """A t-norm given by a vectorised function on [0,1]^2.

    ``generator`` / ``generator_inv`` are set for strict kinds, where
    ``T(x, y) = generator_inv(generator(x) + generator(y))``.
    """

    name: str
    fn: Callable = field(repr=False)
    generator: Callable | None = field(default=None, repr=False)
    generator_inv: Callable | None = field(default=None, repr=False)
    is_conorm: bool = False
    # fn itself is computed through the generator, so kernels may use it too
    via_generator: bool = False

    def __call__(self, x, y):
        return self.fn(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def dual(self) -> "TNorm":
        f = self.fn
        star = self.name[:-1] if self.name.endswith("*") else self.name + "*"
        return TNorm(star, lambda x, y: 1.0 - f(1.0 - x, 1.0 - y), is_conorm=not self.is_conorm)

    @property
    def strict(self) -> bool:
        return self.generator is not None


# conorms share the type; the flag only documents which axioms apply
TConorm = TNorm


def _min(x, y):
    return np.minimum(x, y)


def _prod(x, y):
    return x * y


def _luk(x, y):
    # x + 1 - 1 can round away from x; keep the identity exact
    x, y = np.broadcast_arrays(x, y)
    out = np.maximum(x + y - 1.0, 0.0)
    return np.where(y == 1.0, x, np.where(x == 1.0, y, out))


def _neglog(x):
    with np.errstate(divide="ignore"):
        return -np.log(x)


def _expneg(s):
    return np.exp(-s)


M = TNorm("M", _min)
PI = TNorm("Pi", _prod, _neglog, _expneg)
W = TNorm("W", _luk)

M_STAR = TNorm("M*", lambda x, y: np.maximum(x, y), is_conorm=True)
PI_STAR = TNorm("Pi*", lambda x, y: x + y - x * y, is_conorm=True)
W_STAR = TNorm("W*", lambda x, y: np.minimum(x + y, 1.0), is_conorm=True)

BUILTIN = {"M": M, "Pi": PI, "W": W, "M*": M_STAR, "Pi*": PI_STAR, "W*": W_STAR}


def conorm_of(T: TNorm) -> TNorm:
    """Named dual for the built-ins, generic dual otherwise."""
    return BUILTIN.get(T.name + "*") or T.dual()


def make_tg(G: AnalyticDDF, alpha: float) -> TNorm:
    """The strict t-norm T_G for a continuous strictly increasing G and alpha > 1.

    T_G(x, y) = G( (G^-1(x)^e + G^-1(y)^e)^(1-alpha) ),  e = 1/(1-alpha),
    evaluated through its additive generator f = (G^-1)^e.
    """
    if not alpha > 1:
        raise ValueError("T_G needs alpha > 1")
    if not G.has_inverse:
        raise ValueError(f"{G.label} has no closed-form inverse; cannot build T_G")
    e = 1.0 / (1.0 - alpha)

    def f(x):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.power(G.inverse(x), e)

    def finv(s):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return G(np.power(s, 1.0 - alpha))

    def fn(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        out = finv(f(x) + f(y))
        # boundary values by their limits, not by the round trip through G
        out = np.where(y == 1.0, x, np.where(x == 1.0, y, out))
        return np.where((x == 0.0) | (y == 0.0), 0.0, out)

    return TNorm(f"TG:{G.label}:{alpha:g}", fn, f, finv, via_generator=True)


def table_tnorm(source, size: int = 256, name: str = "table") -> TNorm:
    """User t-norm sampled on a ``size`` x ``size`` lattice, read bilinearly.

    ``source`` is a vectorised callable or a ready (size, size) array.  Axiom
    checks on such a t-norm only speak for the lattice interpolant.
    """
    if callable(source):
        g = np.linspace(0.0, 1.0, size)
        tab = np.asarray(source(g[:, None], g[None, :]), dtype=float)
    else:
        tab = np.asarray(source, dtype=float)
        size = tab.shape[0]
    tab = tab.copy()
    tab.setflags(write=False)
    last = size - 1

    def fn(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        u, v = x * last, y * last
        i = np.clip(np.floor(u).astype(int), 0, last - 1)
        j = np.clip(np.floor(v).astype(int), 0, last - 1)
        a, b = u - i, v - j
        return ((1 - a) * (1 - b) * tab[i, j] + a * (1 - b) * tab[i + 1, j]
                + (1 - a) * b * tab[i, j + 1] + a * b * tab[i + 1, j + 1])

    return TNorm(name, fn)


def parse_tnorm(name: str, ddfs: dict | None = None) -> TNorm:
    """Resolve ``M`` | ``Pi`` | ``W`` | ``TG:<ddf-name>:<alpha>`` (and conorms ``X*``)."""
    if name in BUILTIN:
        return BUILTIN[name]
    if name == "Π":
        return PI
    if name.startswith("TG:"):
        try:
            _, gname, alpha = name.rsplit(":", 2)
            alpha = float(alpha)
        except ValueError:
            raise KeyError(f"malformed T_G name {name!r}") from None
        from .config import resolve_ddf

        return make_tg(resolve_ddf(gname, ddfs or {}), alpha)
    if name.endswith("*"):
        return parse_tnorm(name[:-1], ddfs).dual()
    raise KeyError(f"unknown t-norm {name!r}")


def _check_unit(*arrs):
    for a in arrs:
        a = np.asarray(a)
        if np.any((a < 0) | (a > 1)) or np.any(np.isnan(a)):
            raise ValueError("t-norm arguments must lie in [0, 1]")


def eval_t(T: TNorm, x, y):
    _check_unit(x, y)
    out = T(x, y)
    return float(out) if np.ndim(out) == 0 else out


eval_conorm = eval_t


# --------------------------------------------------------------- campaigns

_PROBES = np.array([0.0, 0.25, 0.5, 0.75, 1.0])


def _sample_unit(rng, size):
    u = rng.random(size)
    # a slice of lattice probes hits boundary cases
    probe = rng.random(size) < 0.1
    u[probe] = rng.choice(_PROBES, size=int(probe.sum()))
    return u


def check_tnorm_axioms(T: TNorm, trials: int = 10_000, seed: int = 0,
                       tol: float = TOL_TNORM, batch: int = 4096) -> VerificationReport:
    """Commutativity, monotonicity, identity and associativity on random triples."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    one = 0.0 if T.is_conorm else 1.0
    tr = Tracker(["commutative", "monotone", "identity", "associative"], tol)
    done = 0
    for b in range(0, trials, batch):
        m = min(batch, trials - b)
        rng = trial_rng(seed, b)
        x, y, z = (_sample_unit(rng, m) for _ in range(3))
        xy = T(x, y)
        checks = {
            "commutative": np.abs(xy - T(y, x)),
            "monotone": T(np.minimum(x, z), y) - T(np.maximum(x, z), y),
            "identity": np.abs(T(x, one) - x),
            "associative": np.abs(T(xy, z) - T(x, T(y, z))),
        }
        for key, viol in checks.items():
            k = int(np.argmax(viol))
            tr.update(key, float(viol[k]), {"x": float(x[k]), "y": float(y[k]), "z": float(z[k])}, m)
        done += m
    kind = "t-conorm" if T.is_conorm else "t-norm"
    return tr.report(f"{kind}-axioms[{T.name}]", done,
                     claim=f"{T.name} is a {kind}: commutative, monotone, identity, associative")


def replay_tnorm_axiom(T: TNorm, axiom: str, x: float, y: float, z: float) -> float:
    one = 0.0 if T.is_conorm else 1.0
    if axiom == "commutative":
        return abs(float(T(x, y) - T(y, x)))
    if axiom == "monotone":
        return float(T(min(x, z), y) - T(max(x, z), y))
    if axiom == "identity":
        return abs(float(T(x, one)) - x)
    if axiom == "associative":
        return abs(float(T(T(x, y), z) - T(x, T(y, z))))
    raise KeyError(axiom)


def dominates(Ta: TNorm, Tb: TNorm, x, y, u, v):
    """Shortfall of ``Ta(Tb(x,u), Tb(y,v)) >= Tb(Ta(x,y), Ta(u,v))`` (positive = violated)."""
    return Tb(Ta(x, y), Ta(u, v)) - Ta(Tb(x, u), Tb(y, v))


def check_tnorm_dominance(Ta: TNorm, Tb: TNorm, trials: int = 10_000, seed: int = 0,
                          tol: float = TOL_TNORM, batch: int = 4096) -> VerificationReport:
    """Interchange inequality between two binary operations on [0,1], sampled on [0,1]^4."""
    tr = Tracker(["dominance"], tol)
    for b in range(0, trials, batch):
        m = min(batch, trials - b)
        rng = trial_rng(seed, b)
        x, y, u, v = (_sample_unit(rng, m) for _ in range(4))
        viol = dominates(Ta, Tb, x, y, u, v)
        k = int(np.argmax(viol))
        tr.update("dominance", float(viol[k]),
                  {"x": float(x[k]), "y": float(y[k]), "u": float(u[k]), "v": float(v[k])}, m)
    return tr.report(f"dominates[{Ta.name}>>{Tb.name}]", trials,
                     claim=f"{Ta.name} dominates {Tb.name} on [0,1]^4", one_sided=True)


def _dyadic(a):
    k = a.shape[-1]
    return (a * 0.5 ** np.arange(1, k + 1)).sum(axis=-1)


def lemma2_gap(a, b):
    """``W(sum a/2^i, sum b/2^i) - sum W(a_i, b_i)/2^i``; <= 0 when the bound holds."""
    return W(_dyadic(a), _dyadic(b)) - _dyadic(W(a, b))


def lemma3_gap(a, b):
    """``sum W*(a_i, b_i)/2^i - W*(sum a/2^i, sum b/2^i)``; <= 0 when the bound holds."""
    return _dyadic(W_STAR(a, b)) - W_STAR(_dyadic(a), _dyadic(b))


def lemma2_lemma3_check(trials: int = 100_000, K: int = 16, seed: int = 0,
                        tol: float = TOL_TNORM, batch: int = 8192) -> VerificationReport:
    """Dyadic-mixture bounds for W and W* on random length-K prefixes (zeros beyond)."""
    if K < 1:
        raise ValueError("K must be >= 1")
    tr = Tracker(["W-subdyadic", "W*-superdyadic"], tol)
    for bstart in range(0, trials, batch):
        m = min(batch, trials - bstart)
        rng = trial_rng(seed, bstart)
        a = rng.random((m, K))
        b = rng.random((m, K))
        # binary and constant rows stress the equality cases
        mode = rng.integers(0, 4, size=m)
        a[mode == 1] = np.round(a[mode == 1])
        b[mode == 1] = np.round(b[mode == 1])
        a[mode == 2] = 1.0
        b[mode == 2] = rng.random((int((mode == 2).sum()), 1))
        for key, gap in (("W-subdyadic", lemma2_gap(a, b)), ("W*-superdyadic", lemma3_gap(a, b))):
            k = int(np.argmax(gap))
            tr.update(key, float(gap[k]), {"a": a[k].tolist(), "b": b[k].tolist()}, m)
    return tr.report(f"lemma2-lemma3[K={K}]", trials,
                     claim="W and W* commute with dyadic mixtures in the stated directions")
