"""Strong neighborhoods and the product-topology containment experiments.

A strong neighborhood is N_p(t) = {q : nu_{q-p}(t) > 1 - t}.  A finite-support
product neighborhood constrains the first m components to factor
neighborhoods and leaves the rest free.  Membership is decided by closed-form
evaluation, batched over proposals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .report import FAIL, INSUFFICIENT, PASS, VerificationReport, combine, trial_rng
from .spaces import PNSpace

BUDGET = 100_000
BATCH = 4096


def in_strong(space: PNSpace, p, q, t: float) -> bool:
    if not t > 0:
        raise ValueError("t must be positive")
    d = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
    return space.value(d, t) > 1.0 - t


def members(space: PNSpace, offsets: np.ndarray, t: float) -> np.ndarray:
    """Membership of p + offset in N_p(t) for each row of ``offsets``."""
    return space.nu.values(offsets, t) > 1.0 - t


@dataclass(frozen=True)
class Layout:
    """Component blocks of a product carrier and their weights."""

    dims: tuple
    weights: tuple

    @property
    def K(self) -> int:
        return len(self.dims)

    def slices(self):
        at = 0
        for d in self.dims:
            yield slice(at, at + d)
            at += d


def layout_of(prod) -> Layout:
    w = getattr(prod.nu, "weights", None)
    dims = tuple(f.dim for f in prod.factors)
    return Layout(dims, tuple(np.ones(len(dims)) if w is None else w))


def _propose(rng, lay: Layout, n: int, base: float, lo: float, hi: float,
             weighted: bool) -> np.ndarray:
    """Gaussian offsets, scale base * 10^U(lo, hi) per component block.

    With ``weighted`` the scale of block i is divided by its weight, so
    lightly weighted components roam further.
    """
    out = np.empty((n, sum(lay.dims)))
    for i, sl in enumerate(lay.slices()):
        s = base * 10.0 ** rng.uniform(lo, hi, (n, 1))
        if weighted:
            s = s / lay.weights[i]
        out[:, sl] = rng.standard_normal((n, sl.stop - sl.start)) * s
    return out


def factor_members(prod, offsets: np.ndarray, t: float, upto: int | None = None) -> np.ndarray:
    """(rows, K) membership of each component in its factor neighborhood."""
    lay = layout_of(prod)
    cols = []
    for i, (f, sl) in enumerate(zip(prod.factors, lay.slices())):
        if upto is not None and i >= upto:
            break
        cols.append(f.nu.values(offsets[:, sl], t) > 1.0 - t)
    return np.column_stack(cols)


def _sample_members(space, lay, rng_seed, eps, want, budget, base, lo, hi, weighted, accept):
    got, tried, batch_no = [], 0, 0
    while sum(len(g) for g in got) < want and tried < budget:
        rng = trial_rng(rng_seed, batch_no)
        n = min(BATCH, budget - tried)
        prop = _propose(rng, lay, n, base, lo, hi, weighted)
        got.append(prop[accept(prop)])
        tried += n
        batch_no += 1
    acc = np.concatenate(got) if got else np.empty((0, sum(lay.dims)))
    return acc[:want], tried


# ------------------------------------------------------------ tau-product


def tau_product_containment(prod, p=None, eps: float = 0.1, samples: int = 10_000,
                            budget: int = BUDGET, seed: int = 0) -> VerificationReport:
    """N_p(eps) inside the product of the factor neighborhoods N_{p_i}(eps),
    plus a witness that a finite-support product neighborhood is not inside
    N_p(eps).

    Membership only depends on q - p, so offsets are sampled directly.
    """
    lay = layout_of(prod)
    dim = sum(lay.dims)
    p = np.zeros(dim) if p is None else np.asarray(p, dtype=float)
    acc, tried = _sample_members(prod, lay, seed, eps, samples, budget, eps, -3, 0.5, False,
                                 lambda X: members(prod, X, eps))
    fm = factor_members(prod, acc, eps) if len(acc) else np.ones((0, lay.K), bool)
    bad = np.flatnonzero(~fm.all(axis=1))
    fwd = {"verdict": PASS if bad.size == 0 else FAIL, "worst": float(bad.size),
           "samples": int(len(acc)), "proposals": int(tried)}
    if len(acc) < samples:
        fwd["verdict"] = INSUFFICIENT if bad.size == 0 else FAIL
    if bad.size:
        fwd["witness"] = {"q_minus_p": acc[bad[0]], "components_out": np.flatnonzero(~fm[bad[0]])}
    rev = reverse_witness(prod, p, eps)
    checks = {"forward": fwd, "reverse-witness": rev}
    return combine(f"tau-containment[{prod.name},eps={eps:g}]", samples, checks,
                   "the strong neighborhood sits inside the product neighborhoods; "
                   "a finite-support product neighborhood does not sit inside it")


def reverse_witness(prod, p, eps: float, m: int = 1) -> dict:
    """q agreeing with p on the first m components and pushed away on one later
    component until q leaves N_p(eps)."""
    lay = layout_of(prod)
    blocks = list(lay.slices())
    for j in range(m, lay.K):
        d = np.zeros(sum(lay.dims))
        d[blocks[j].start] = 1.0
        for _ in range(80):
            if not members(prod, d[None, :], eps)[0]:
                return {"verdict": PASS, "found": True, "m": m, "component": j + 1,
                        "q_minus_p": d, "value": float(prod.nu.values(d[None, :], eps)[0]),
                        "threshold": 1.0 - eps}
            d *= 2.0
    return {"verdict": FAIL, "found": False, "m": m,
            "note": f"every factor beyond {m} has V_i = N(eps); the containment reverses"}


# ------------------------------------------------------------ Sigma-product


def sigma_schedule(eps: float, K: int) -> tuple[int, float]:
    """m = ceil(log2(2/eps)) (capped at K) and delta = eps * 2^-m."""
    m = min(K, max(1, math.ceil(math.log2(2.0 / eps))))
    return m, eps * 2.0 ** -m


def sigma_topology_equivalence(prod, p=None, eps: float = 0.1, samples: int = 1000,
                               budget: int = BUDGET, seed: int = 0) -> VerificationReport:
    """Mutual neighborhood containment for a Sigma-product.

    (a) offsets with nu^i(eps/2) > 1 - eps/2 on the first m factors (the rest
        free) land in N_p(eps).
    (b) offsets in N_p(delta), delta = eps 2^-m, satisfy nu^i(eps) > 1 - eps
        on the first m factors.
    """
    lay = layout_of(prod)
    dim = sum(lay.dims)
    p = np.zeros(dim) if p is None else np.asarray(p, dtype=float)
    m, delta = sigma_schedule(eps, lay.K)
    K = lay.K
    half = eps / 2

    def in_u(X):
        return factor_members(prod, X, half, upto=m).all(axis=1)

    # (a) first m components near, the rest anywhere
    def prop_a(rng, n):
        X = _propose(rng, lay, n, 1.0, -1, 3, True)
        near = _propose(rng, lay, n, half ** 2, -3, 0, False)
        for sl in list(lay.slices())[:m]:
            X[:, sl] = near[:, sl]
        return X

    got, tried, b = [], 0, 0
    while sum(len(g) for g in got) < samples and tried < budget:
        rng = trial_rng(seed, b)
        n = min(BATCH, budget - tried)
        X = prop_a(rng, n)
        got.append(X[in_u(X)])
        tried += n
        b += 1
    A = np.concatenate(got)[:samples] if got else np.empty((0, dim))
    out_a = np.flatnonzero(~members(prod, A, eps)) if len(A) else np.array([], int)
    da = _direction(out_a, A, samples, tried, "(a)")
    # (b) members of the small Sigma neighborhood
    B, tried_b = _sample_members(prod, lay, seed + 1, delta, samples, budget, delta ** 2, -3, 1,
                                 True, lambda X: members(prod, X, delta))
    ok_b = factor_members(prod, B, eps, upto=m).all(axis=1) if len(B) else np.ones(0, bool)
    db = _direction(np.flatnonzero(~ok_b), B, samples, tried_b, "(b)")
    checks = {"a": da, "b": db, "far-component": far_component_witness(prod, eps, m)}
    rep = combine(f"sigma-topology[{prod.name},eps={eps:g}]", samples, checks,
                  "strong and product topologies coincide on the Sigma-product")
    rep.notes.append(f"m = {m}, radius eps/2 = {half:g}, delta = {delta:g}, K = {K}")
    return rep


def _direction(bad, X, want, tried, label):
    d = {"verdict": PASS if bad.size == 0 else FAIL, "worst": float(bad.size),
         "samples": int(len(X)), "proposals": int(tried)}
    if bad.size == 0 and len(X) < want:
        d["verdict"] = INSUFFICIENT
    if bad.size:
        d["witness"] = {"q_minus_p": X[bad[0]], "direction": label}
    return d


def far_component_witness(prod, eps: float, m: int | None = None) -> dict:
    """An offset that is 0 except one component sent to 1e12, yet still in N(eps).

    For the Sigma-product this works for any component with weight < eps; the
    same offset leaves the neighborhood of a lifted product (see
    :func:`reverse_witness`).
    """
    lay = layout_of(prod)
    blocks = list(lay.slices())
    for j in range(lay.K):
        if lay.weights[j] < eps:
            d = np.zeros(sum(lay.dims))
            d[blocks[j].start] = 1e12
            val = float(prod.nu.values(d[None, :], eps)[0])
            ok = val > 1 - eps
            return {"verdict": PASS if ok else FAIL, "component": j + 1, "value": val,
                    "threshold": 1 - eps}
    return {"verdict": INSUFFICIENT, "note": "no component weight below eps"}


def only_one_close(prod, eps: float, keep: int = 0) -> dict:
    """Offset with every component far except ``keep``: membership value in N(eps)."""
    lay = layout_of(prod)
    d = np.zeros(sum(lay.dims))
    for j, sl in enumerate(lay.slices()):
        if j != keep:
            d[sl.start] = 1e12
    val = float(prod.nu.values(d[None, :], eps)[0])
    return {"member": bool(val > 1 - eps), "value": val, "threshold": 1 - eps}


# ------------------------------------------------------------ neighborhood bullets


def _largest_root(f, lo: float, hi: float, iters: int = 60) -> float | None:
    """Some s in ]lo, hi] with f(s) True, found by halving from hi towards lo."""
    s = hi
    for _ in range(iters):
        if f(s):
            return s
        s = lo + (s - lo) / 2
    return None


def inner_radius(space: PNSpace, d, t: float) -> float | None:
    """A t' with nu_d(t - t') - t' >= 1 - t, which under tau_W gives
    N_q(t') inside N_p(t) for q - p = d."""
    val = lambda s: space.value(d, t - s) - s >= 1 - t  # noqa: E731
    return _largest_root(val, 0.0, t / 2)


def separating_radius(space: PNSpace, d, t0: float = 1.0) -> float | None:
    """A t with nu_d(2t) <= 1 - 2t, which under tau_W separates N_p(t), N_q(t)."""
    return _largest_root(lambda s: space.value(d, 2 * s) <= 1 - 2 * s, 0.0, t0)


def check_neighborhood_bullets(space: PNSpace, trials: int = 200, probes: int = 64,
                               seed: int = 0) -> VerificationReport:
    """Both neighborhood bullets on a space assumed to satisfy N3 under tau_W.

    (1) for q in N_p(t) find t' and check sampled r in N_q(t') lie in N_p(t);
    (2) for p != q find t and check sampled r in N_p(t) avoid N_q(t).
    """
    dim = space.dim
    counts = {"inner": [0, 0, 0], "separate": [0, 0, 0]}  # trials, probes, violations
    wit = {}
    lay = layout_of(space) if hasattr(space, "factors") and space.factors else Layout((dim,), (1.0,))
    for i in range(trials):
        rng = trial_rng(seed, i)
        t = float(rng.uniform(0.05, 0.5))
        # bullet 1: p = 0, q = d inside N_p(t)
        d = None
        for _ in range(50):
            cand = _propose(rng, lay, 1, t, -4, 0, True)[0]
            if space.value(cand, t) > 1 - t:
                d = cand
                break
        if d is not None:
            tp = inner_radius(space, d, t)
            if tp is not None:
                R = _propose(rng, lay, probes * 4, tp, -4, 0, True)
                R = R[members(space, R, tp)][:probes]
                outside = ~members(space, d + R, t)
                counts["inner"][0] += 1
                counts["inner"][1] += len(R)
                counts["inner"][2] += int(outside.sum())
                if outside.any() and "inner" not in wit:
                    wit["inner"] = {"t": t, "t_prime": tp, "q": d, "r_minus_q": R[np.argmax(outside)]}
        # bullet 2: p = 0, q = e far enough to be separated
        e = _propose(rng, lay, 1, 1.0, -1, 1, True)[0]
        ts = separating_radius(space, e)
        if ts is not None and ts > 0:
            R = _propose(rng, lay, probes * 4, ts, -4, 0, True)
            R = R[members(space, R, ts)][:probes]
            shared = members(space, R - e, ts)  # r - q for q = e
            counts["separate"][0] += 1
            counts["separate"][1] += len(R)
            counts["separate"][2] += int(shared.sum())
            if shared.any() and "separate" not in wit:
                wit["separate"] = {"t": ts, "q": e, "r": R[np.argmax(shared)]}
    checks = {}
    for k, (n, pr, bad) in counts.items():
        v = FAIL if bad else (PASS if pr else INSUFFICIENT)
        checks[k] = {"verdict": v, "worst": float(bad), "samples": pr, "cases": n}
        if bad:
            checks[k]["witness"] = wit[k]
    return combine(f"neighborhood-bullets[{space.name}]", trials, checks,
                   "strong neighborhoods nest and separate points", one_sided=True)
