"""Step functions, martingales, and every norm used by the toolkit.

A ``StepFunction`` is a terminal value (one real per leaf); a ``Martingale``
carries the whole adapted sequence f_0, ..., f_N obtained by conditioning.
Differences use the convention f_{-1} = 0, so d_0 f = f_0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .filtration import FiltrationTree


@dataclass(frozen=True)
class StepFunction:
    """Real function constant on the leaf cells of a tree."""

    tree: FiltrationTree
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.tree.n_leaves,):
            raise ValueError(f"expected {self.tree.n_leaves} leaf values, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("leaf values must be finite")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __add__(self, other):
        return StepFunction(self.tree, self.values + _vals(other, self.tree))

    def __sub__(self, other):
        return StepFunction(self.tree, self.values - _vals(other, self.tree))

    def __mul__(self, other):
        return StepFunction(self.tree, self.values * _vals(other, self.tree))

    __rmul__ = __mul__

    def __neg__(self):
        return StepFunction(self.tree, -self.values)

    def abs(self) -> "StepFunction":
        return StepFunction(self.tree, np.abs(self.values))

    def integral(self) -> float:
        return float(self.tree.integrate(self.values))


def _vals(x, tree: FiltrationTree) -> np.ndarray | float:
    if isinstance(x, StepFunction):
        if x.tree is not tree:
            raise ValueError("step functions live on different trees")
        return x.values
    return x


class Martingale:
    """Adapted sequence (f_0, ..., f_N) with E_n f_{n+1} = f_n.

    ``levels`` is an array of shape (depth+1, n_leaves); row n is f_n written
    out at leaf resolution.
    """

    def __init__(self, tree: FiltrationTree, levels: np.ndarray):
        levels = np.asarray(levels, dtype=float)
        if levels.shape != (tree.depth + 1, tree.n_leaves):
            raise ValueError(
                f"levels must have shape {(tree.depth + 1, tree.n_leaves)}, got {levels.shape}"
            )
        self.tree = tree
        self.levels = levels

    @classmethod
    def from_terminal(cls, f: StepFunction | np.ndarray, tree: FiltrationTree | None = None):
        """Martingale generated by a terminal value: f_n = E_n f."""
        if isinstance(f, StepFunction):
            tree = f.tree
            v = f.values
        else:
            if tree is None:
                raise ValueError("tree required when passing a bare array")
            v = np.asarray(f, dtype=float)
        levels = np.empty((tree.depth + 1, tree.n_leaves))
        for n in range(tree.depth + 1):
            levels[n] = tree.cond_exp(v, n)
        return cls(tree, levels)

    @classmethod
    def from_differences(cls, tree: FiltrationTree, diffs: np.ndarray):
        return cls(tree, np.cumsum(np.asarray(diffs, dtype=float), axis=0))

    @property
    def depth(self) -> int:
        return self.tree.depth

    def level(self, n: int) -> StepFunction:
        return StepFunction(self.tree, self.levels[n])

    @property
    def terminal(self) -> StepFunction:
        return StepFunction(self.tree, self.levels[-1])

    def differences(self) -> np.ndarray:
        """d_n f for n = 0..depth (d_0 f = f_0), shape (depth+1, n_leaves)."""
        d = np.empty_like(self.levels)
        d[0] = self.levels[0]
        d[1:] = np.diff(self.levels, axis=0)
        return d

    def validate(self, tol: float = 1e-12) -> None:
        """Check adaptedness and the martingale property componentwise."""
        scale = 1.0 + np.abs(self.levels).max(initial=0.0)
        for n in range(self.depth + 1):
            if np.abs(self.tree.cond_exp(self.levels[n], n) - self.levels[n]).max() > tol * scale:
                raise ValueError(f"level {n} is not F_{n}-measurable")
        for n in range(self.depth):
            gap = np.abs(self.tree.cond_exp(self.levels[n + 1], n) - self.levels[n]).max()
            if gap > tol * scale:
                raise ValueError(f"E_{n} f_{n + 1} != f_{n} (gap {gap:.3e})")

    def __add__(self, other: "Martingale") -> "Martingale":
        if other.tree is not self.tree:
            raise ValueError("martingales live on different trees")
        return Martingale(self.tree, self.levels + other.levels)

    def __sub__(self, other: "Martingale") -> "Martingale":
        if other.tree is not self.tree:
            raise ValueError("martingales live on different trees")
        return Martingale(self.tree, self.levels - other.levels)

    def __rmul__(self, c: float) -> "Martingale":
        return Martingale(self.tree, float(c) * self.levels)

    __mul__ = __rmul__


def as_martingale(f, tree: FiltrationTree | None = None) -> Martingale:
    if isinstance(f, Martingale):
        return f
    return Martingale.from_terminal(f, tree)


# -- the three basic operators --------------------------------------------------


def doob_maximal(f: Martingale) -> StepFunction:
    """M(f) = max_n |f_n| pointwise."""
    return StepFunction(f.tree, np.abs(f.levels).max(axis=0))


def square_function(f: Martingale) -> StepFunction:
    """S(f) = (sum_n |d_n f|^2)^(1/2)."""
    return StepFunction(f.tree, np.sqrt((f.differences() ** 2).sum(axis=0)))


def cond_square_function(f: Martingale) -> StepFunction:
    """s(f) = (|d_0 f|^2 + sum_{n>=1} E_{n-1} |d_n f|^2)^(1/2)."""
    d = f.differences()
    acc = d[0] ** 2
    for n in range(1, f.depth + 1):
        acc = acc + f.tree.cond_exp(d[n] ** 2, n - 1)
    return StepFunction(f.tree, np.sqrt(acc))


def partial_cond_square(f: Martingale) -> np.ndarray:
    """s_m(f) for m = 0..depth, shape (depth+1, n_leaves); s_0 = |d_0 f|."""
    d = f.differences()
    out = np.empty_like(f.levels)
    acc = d[0] ** 2
    out[0] = acc
    for n in range(1, f.depth + 1):
        acc = acc + f.tree.cond_exp(d[n] ** 2, n - 1)
        out[n] = acc
    return np.sqrt(out)


# -- scalar Orlicz machinery ----------------------------------------------------


def phi_log(t):
    """The Orlicz function t / log(e + t)."""
    t = np.asarray(t, dtype=float)
    return t / np.log(np.e + t)


def phi_log_inverse(y: float) -> float:
    """Inverse of phi_log on [0, inf), by bracketed bisection."""
    if y < 0:
        raise ValueError("phi_log is nonnegative")
    if y == 0:
        return 0.0
    hi = max(1.0, y)
    while phi_log(hi) < y:
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if phi_log(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _luxemburg(feasible, lo: float, hi: float, iters: int = 200) -> float:
    """Smallest lam with feasible(lam), given feasible(hi) and not feasible(lo)."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


# -- norms -----------------------------------------------------------------------


def lp_norm(f: StepFunction, p: float) -> float:
    """L^p norm against the tree's measure; p = inf gives the essential sup."""
    if p < 1:
        raise ValueError("p must be >= 1")
    v = np.abs(f.values)
    if math.isinf(p):
        mask = f.tree.positive_mask
        return float(v[mask].max()) if mask.any() else 0.0
    return float(f.tree.integrate(v**p)) ** (1.0 / p)


def weak_lq_norm(f: StepFunction, q: float) -> float:
    """sup_t t * P(|f| > t)^(1/q), evaluated exactly at left limits of the levels."""
    if q < 1:
        raise ValueError("q must be >= 1")
    mask = f.tree.positive_mask
    v = np.abs(f.values[mask])
    w = f.tree.leaf_mass[mask]
    if v.size == 0:
        return 0.0
    order = np.argsort(v)[::-1]
    v, w = v[order], w[order]
    tail = np.cumsum(w)  # tail[i] = P(|f| >= v_i) once grouped by value
    # group equal values: probability of {|f| >= level} is the cumsum at the
    # last occurrence of the level
    levels, last = np.unique(v[::-1], return_index=True)
    levels = levels[::-1]
    prob = tail[v.size - 1 - last][::-1]
    if math.isinf(q):
        pos = levels[prob > 0]
        return float(pos.max()) if pos.size else 0.0
    vals = levels * prob ** (1.0 / q)
    return float(vals.max())


def llog_norm(f: StepFunction) -> float:
    """Luxemburg quasi-norm for phi_log: inf{lam : E phi_log(|f|/lam) <= 1}."""
    v = np.abs(f.values)
    l1 = float(f.tree.integrate(v))
    if l1 == 0.0:
        return 0.0
    mass = f.tree.leaf_mass

    def feasible(lam: float) -> bool:
        return float((phi_log(v / lam) * mass).sum()) <= 1.0

    return _luxemburg(feasible, 0.0, l1 + 1.0)  # phi_log(t) <= t makes hi feasible


def explog_norm(f: StepFunction) -> float:
    """Luxemburg norm of the exponential class: inf{lam : E exp(|f|/lam) <= 2}."""
    mask = f.tree.positive_mask
    v = np.abs(f.values)
    top = float(v[mask].max()) if mask.any() else 0.0
    if top == 0.0:
        return 0.0
    mass = f.tree.leaf_mass
    hi = top / math.log(2.0)  # exp(top/hi) = 2 pointwise, certainly feasible

    def feasible(lam: float) -> bool:
        with np.errstate(over="ignore"):
            val = float((np.exp(np.minimum(v / lam, 700.0)) * mass).sum())
        return val <= 2.0

    return _luxemburg(feasible, 0.0, hi * (1.0 + 1e-12))


def h1_norm(f: Martingale) -> float:
    """H_1 norm: L^1 norm of the square function."""
    return lp_norm(square_function(f), 1)


def h1_cond_norm(f: Martingale) -> float:
    """h_1 norm: L^1 norm of the conditional square function (members have f_0 = 0)."""
    return lp_norm(cond_square_function(f), 1)


def h1_diff_norm(f: Martingale) -> float:
    """h_1^d norm: sum_n ||d_n f||_1."""
    d = np.abs(f.differences())
    return float(sum(f.tree.integrate(d[n]) for n in range(f.depth + 1)))


def hlog_norm(f: Martingale) -> float:
    return llog_norm(square_function(f))


def hlog_cond_norm(f: Martingale) -> float:
    return llog_norm(cond_square_function(f))


def hlog_max_norm(f: Martingale) -> float:
    return llog_norm(doob_maximal(f))


def _sup_positive(tree: FiltrationTree, leaf_values: np.ndarray) -> float:
    mask = tree.positive_mask
    return float(leaf_values[mask].max()) if mask.any() else 0.0


def bmo_norm(b: Martingale | StepFunction, p: float = 2.0) -> float:
    """BMO_p norm: sup_n || E_n |f - f_{n-1}|^p ||_inf^(1/p), with f_{-1} = 0."""
    if p < 1:
        raise ValueError("p must be >= 1")
    b = as_martingale(b)
    f = b.levels[-1]
    worst = 0.0
    for n in range(b.depth + 1):
        prev = b.levels[n - 1] if n >= 1 else 0.0
        worst = max(worst, _sup_positive(b.tree, b.tree.cond_exp(np.abs(f - prev) ** p, n)))
    return worst ** (1.0 / p)


def bmo_small_norm(b: Martingale | StepFunction, p: float = 2.0) -> float:
    """bmo_p norm: sup_n || E_n |f - f_n|^p ||_inf^(1/p)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    b = as_martingale(b)
    f = b.levels[-1]
    worst = 0.0
    for n in range(b.depth + 1):
        worst = max(worst, _sup_positive(b.tree, b.tree.cond_exp(np.abs(f - b.levels[n]) ** p, n)))
    return worst ** (1.0 / p)


def bmo_diff_norm(b: Martingale | StepFunction) -> float:
    """bmo^d norm: sup_n ||d_n f||_inf."""
    b = as_martingale(b)
    d = np.abs(b.differences())
    return max(_sup_positive(b.tree, d[n]) for n in range(b.depth + 1))


def bmo_log_norm(b: Martingale | StepFunction) -> float:
    """Campanato-type norm weighting the L^2 oscillation on a cell A by
    1/phi(P(A)) with phi(r) = 1/(r * phi_log^{-1}(1/r))."""
    b = as_martingale(b)
    f = b.levels[-1]
    tree = b.tree
    phi_cache: dict[float, float] = {}
    worst = 0.0
    for n in range(tree.depth + 1):
        osc2 = tree.cell_averages((f - b.levels[n]) ** 2, n)
        masses = tree.level_mass(n)
        for j in np.nonzero(masses > 0)[0]:
            r = float(masses[j])
            phi = phi_cache.get(r)
            if phi is None:
                phi = 1.0 / (r * phi_log_inverse(1.0 / r))
                phi_cache[r] = phi
            worst = max(worst, math.sqrt(max(osc2[j], 0.0)) / phi)
    return worst


def osc_norm(b: StepFunction | Martingale) -> float:
    """sup over cells Q of the mean oscillation avg_Q |b - b_Q|."""
    b = as_martingale(b)
    f = b.levels[-1]
    tree = b.tree
    worst = 0.0
    for n in range(tree.depth + 1):
        dev = tree.cell_averages(np.abs(f - b.levels[n]), n)
        mask = tree.level_mass(n) > 0
        if mask.any():
            worst = max(worst, float(dev[mask].max()))
    return worst


_MART_KINDS = {"H1", "h1", "h1d", "Hlog", "hlog", "HMlog"}


def norm(f, kind: str, *, p: float | None = None, q: float | None = None) -> float:
    """Norm dispatcher over every kind the toolkit defines.

    Kinds: Lp (needs p), weak-Lq (needs q), Llog, expL, H1, h1, h1d, Hlog,
    hlog, HMlog, BMOp (needs p), bmop (needs p), bmod, bmolog, osc.
    """
    if kind in _MART_KINDS:
        m = as_martingale(f)
        return {
            "H1": h1_norm,
            "h1": h1_cond_norm,
            "h1d": h1_diff_norm,
            "Hlog": hlog_norm,
            "hlog": hlog_cond_norm,
            "HMlog": hlog_max_norm,
        }[kind](m)
    if kind in {"BMOp", "bmop", "bmod", "bmolog", "osc"}:
        if kind == "BMOp":
            return bmo_norm(f, 2.0 if p is None else p)
        if kind == "bmop":
            return bmo_small_norm(f, 2.0 if p is None else p)
        if kind == "bmod":
            return bmo_diff_norm(f)
        if kind == "bmolog":
            return bmo_log_norm(f)
        return osc_norm(f)
    sf = f.terminal if isinstance(f, Martingale) else f
    if kind == "Lp":
        if p is None:
            raise ValueError("Lp norm needs p")
        return lp_norm(sf, p)
    if kind == "weak-Lq":
        if q is None:
            raise ValueError("weak-Lq norm needs q")
        return weak_lq_norm(sf, q)
    if kind == "Llog":
        return llog_norm(sf)
    if kind == "expL":
        return explog_norm(sf)
    raise ValueError(f"unknown norm kind {kind!r}")


# -- serialisation ---------------------------------------------------------------


def step_function_to_json(f: StepFunction) -> dict:
    return {"tree": f.tree.key(), "values": f.values.tolist()}


def step_function_from_json(doc: dict, tree: FiltrationTree) -> StepFunction:
    ref = doc.get("tree")
    if ref is not None and ref != tree.key():
        raise ValueError(f"step function was saved against tree {ref}, not {tree.key()}")
    return StepFunction(tree, np.asarray(doc["values"], dtype=float))


def save_step_function(f: StepFunction, path: str | Path) -> None:
    Path(path).write_text(json.dumps(step_function_to_json(f)))


def load_step_function(path: str | Path, tree: FiltrationTree) -> StepFunction:
    return step_function_from_json(json.loads(Path(path).read_text()), tree)
