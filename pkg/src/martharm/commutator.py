"""Commutators [T, b], the bilinear operator U, and operator-class certification.

Every operator here acts on terminal values: a step function f stands for the
martingale (E_n f)_n, which is a bijection at finite depth.  The sublinear
commutator [T, b](f)(x) = T(bf - b(x)f)(x) is evaluated exactly by grouping
the leaves on which b takes the same value and applying T once per group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .decomp import product_decompose
from .filtration import FiltrationTree
from .martingale import (
    StepFunction,
    as_martingale,
    bmo_norm,
    h1_norm,
    lp_norm,
    weak_lq_norm,
)
from .operators.haar import HaarSystem, dyadic_hilbert_adjoint_values, dyadic_hilbert_values
from .operators.transforms import TransformSymbol, level_mass_function
from .operators.walsh import WalshContext, cesaro_maximal_values

BATCH_LEAF_BUDGET = 1 << 22  # cap rows*leaves handled per batched call


@dataclass
class SublinearOp:
    """Named sublinear operator with a vectorised apply.

    ``apply_batch`` maps an array of row functions (..., n_leaves) to the
    operator's output rows.  ``linear`` enables the two-apply commutator
    shortcut; ``commutes_with_past`` marks operators satisfying
    T(g a) = g T(a) for g measurable strictly before the first active level
    of a (|g| T(a) when the operator only produces absolute values, flagged
    by ``nonnegative``).
    """

    name: str
    tree: FiltrationTree
    q: float
    linear: bool
    apply_batch: Callable[[np.ndarray], np.ndarray]
    commutes_with_past: bool = True
    nonnegative: bool = False

    def apply(self, f: StepFunction) -> StepFunction:
        return StepFunction(self.tree, self.apply_batch(f.values))

    def spot_check_sublinear(self, rng: np.random.Generator, trials: int = 8, tol: float = 1e-10) -> float:
        """Max violation of |T(af+bg)| <= |a||Tf| + |b||Tg| over random triples."""
        worst = 0.0
        for _ in range(trials):
            f = rng.standard_normal(self.tree.n_leaves)
            g = rng.standard_normal(self.tree.n_leaves)
            a, b = rng.normal(size=2)
            lhs = np.abs(self.apply_batch(a * f + b * g))
            rhs = abs(a) * np.abs(self.apply_batch(f)) + abs(b) * np.abs(self.apply_batch(g))
            scale = 1.0 + rhs.max()
            worst = max(worst, float((lhs - rhs).max() / scale))
        if worst > tol:
            raise ValueError(f"{self.name} failed the sublinearity spot check ({worst:.2e})")
        return worst


# -- batched level machinery -----------------------------------------------------


def _batched_levels(tree: FiltrationTree, rows: np.ndarray):
    """Yield E_n(rows) for n = 0..depth without storing all levels."""
    for n in range(tree.depth + 1):
        yield n, tree.cond_exp(rows, n)


def doob_maximal_batch(tree: FiltrationTree, rows: np.ndarray) -> np.ndarray:
    out = None
    for _, lev in _batched_levels(tree, rows):
        out = np.abs(lev) if out is None else np.maximum(out, np.abs(lev))
    return out


def square_function_batch(tree: FiltrationTree, rows: np.ndarray) -> np.ndarray:
    prev = None
    acc = None
    for _, lev in _batched_levels(tree, rows):
        d = lev if prev is None else lev - prev
        acc = d**2 if acc is None else acc + d**2
        prev = lev
    return np.sqrt(acc)


def cond_square_function_batch(tree: FiltrationTree, rows: np.ndarray) -> np.ndarray:
    prev = None
    acc = None
    for n, lev in _batched_levels(tree, rows):
        if prev is None:
            acc = lev**2
        else:
            acc = acc + tree.cond_exp((lev - prev) ** 2, n - 1)
        prev = lev
    return np.sqrt(acc)


def transform_batch(tree: FiltrationTree, eps: np.ndarray, rows: np.ndarray, *, maximal: bool) -> np.ndarray:
    prev = None
    total = np.zeros_like(rows, dtype=float)
    best = np.zeros_like(rows, dtype=float)
    for n, lev in _batched_levels(tree, rows):
        if prev is not None:
            total = total + eps[n - 1] * (lev - prev)
            if maximal:
                np.maximum(best, np.abs(total), out=best)
        prev = lev
    return best if maximal else total


def fractional_batch(tree: FiltrationTree, alpha: float, rows: np.ndarray) -> np.ndarray:
    prev = None
    total = np.zeros_like(rows, dtype=float)
    for n, lev in _batched_levels(tree, rows):
        beta = level_mass_function(tree, max(n - 1, 0))
        d = lev if prev is None else lev - prev
        total = total + beta**alpha * d
        prev = lev
    return total


# -- operator factory --------------------------------------------------------------

OPERATOR_NAMES = ("M", "S", "Teps", "MTeps", "HD", "HDstar", "sigma", "Ialpha")


def build_operator(
    name: str,
    tree: FiltrationTree,
    *,
    symbol: TransformSymbol | None = None,
    alpha: float = 0.5,
    walsh: WalshContext | None = None,
    seed: int = 0,
) -> SublinearOp:
    """Construct one of the named operators on the given tree.

    M/S are the maximal and square functions (q = 1, sublinear); Teps/MTeps a
    martingale transform and its maximal version (random signs when no symbol
    is given); HD/HDstar the dyadic Hilbert transform and adjoint; sigma the
    maximal Cesaro operator (tree must be uniform dyadic); Ialpha the
    fractional integral with target exponent q = 1/(1-alpha).
    """
    if name == "M":
        return SublinearOp("M", tree, 1.0, False, lambda v: doob_maximal_batch(tree, v), nonnegative=True)
    if name == "S":
        return SublinearOp("S", tree, 1.0, False, lambda v: square_function_batch(tree, v), nonnegative=True)
    if name in ("Teps", "MTeps"):
        if symbol is None:
            symbol = TransformSymbol.random_signs(tree, np.random.default_rng(seed))
        eps = symbol.eps
        if name == "Teps":
            return SublinearOp(
                "Teps", tree, 1.0, True, lambda v: transform_batch(tree, eps, v, maximal=False)
            )
        return SublinearOp(
            "MTeps", tree, 1.0, False, lambda v: transform_batch(tree, eps, v, maximal=True), nonnegative=True
        )
    if name in ("HD", "HDstar"):
        sys = HaarSystem(tree)
        fn = dyadic_hilbert_values if name == "HD" else dyadic_hilbert_adjoint_values
        return SublinearOp(name, tree, 1.0, True, lambda v: fn(sys, v))
    if name == "sigma":
        ctx = walsh if walsh is not None else WalshContext(tree.depth)
        uniform = np.allclose(tree.leaf_mass, 1.0 / tree.n_leaves, rtol=0, atol=1e-15)
        if ctx.tree.n_leaves != tree.n_leaves or any(p != 2 for p in tree.branching) or not uniform:
            raise ValueError("sigma requires the uniform dyadic tree of matching depth")
        return SublinearOp(
            "sigma",
            tree,
            1.0,
            False,
            lambda v: cesaro_maximal_values(ctx, v),
            commutes_with_past=False,
            nonnegative=True,
        )
    if name == "Ialpha":
        if not 0 < alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        return SublinearOp(
            f"Ialpha({alpha:g})",
            tree,
            1.0 / (1.0 - alpha),
            True,
            lambda v: fractional_batch(tree, alpha, v),
        )
    raise ValueError(f"unknown operator {name!r}; choose from {OPERATOR_NAMES}")


# -- commutators --------------------------------------------------------------------


def _grouped_eval(T: SublinearOp, base_rows: Callable[[np.ndarray], np.ndarray], b: np.ndarray) -> np.ndarray:
    """Evaluate x -> T(row(b(x)))(x) by grouping leaves with equal b-values.

    ``base_rows`` maps an array of group values beta (G,) to rows (G, L);
    groups are processed in blocks so memory stays within the batch budget.
    """
    values, inverse = np.unique(b, return_inverse=True)
    out = np.empty_like(b, dtype=float)
    L = b.shape[-1]
    block = max(1, BATCH_LEAF_BUDGET // L)
    for start in range(0, values.size, block):
        beta = values[start : start + block]
        rows = T.apply_batch(base_rows(beta))
        local = inverse - start
        sel = (local >= 0) & (local < beta.size)
        out[sel] = rows[local[sel], np.nonzero(sel)[0]]
    return out


def commutator_apply(T: SublinearOp, b: StepFunction, f: StepFunction) -> StepFunction:
    """[T, b](f)(x) = T(bf - b(x)f)(x); linear T uses T(bf) - b T(f)."""
    if b.tree is not T.tree or f.tree is not T.tree:
        raise ValueError("operator, b, and f must share one tree")
    if T.linear:
        out = T.apply_batch(b.values * f.values) - b.values * T.apply_batch(f.values)
        return StepFunction(T.tree, out)
    bf = b.values * f.values

    def rows(beta: np.ndarray) -> np.ndarray:
        return bf[None, :] - beta[:, None] * f.values[None, :]

    return StepFunction(T.tree, _grouped_eval(T, rows, b.values))


def operator_U(T: SublinearOp, f: StepFunction, b: StepFunction) -> StepFunction:
    """U(f, b)(x) = T(Pi2(f, b) - b(x) f)(x), the commutator's non-structured core."""
    if b.tree is not T.tree or f.tree is not T.tree:
        raise ValueError("operator, b, and f must share one tree")
    pi2 = product_decompose(as_martingale(f), as_martingale(b)).pi2.terminal.values
    if T.linear:
        return StepFunction(T.tree, T.apply_batch(pi2) - b.values * T.apply_batch(f.values))

    def rows(beta: np.ndarray) -> np.ndarray:
        return pi2[None, :] - beta[:, None] * f.values[None, :]

    return StepFunction(T.tree, _grouped_eval(T, rows, b.values))


def maximal_conditional_commutator(b: StepFunction, f: StepFunction) -> StepFunction:
    """sup_n |E_n(bf) - b E_n(f)| pointwise (the commutator with the Doob maximal)."""
    tree = b.tree
    bf = b.values * f.values
    best = np.zeros(tree.n_leaves)
    for n in range(tree.depth + 1):
        gap = tree.cond_exp(bf, n) - b.values * tree.cond_exp(f.values, n)
        np.maximum(best, np.abs(gap), out=best)
    return StepFunction(tree, best)


def h1b_norm(b: StepFunction, f: StepFunction) -> float:
    """||f||_H1 ||b||_BMO2 + || sup_n |[E_n, b](f)| ||_L1."""
    base = h1_norm(as_martingale(f)) * bmo_norm(as_martingale(b))
    return base + lp_norm(maximal_conditional_commutator(b, f), 1)


def is_essentially_constant(b: StepFunction, tol: float = 1e-12) -> bool:
    mask = b.tree.positive_mask
    v = b.values[mask]
    if v.size == 0:
        return True
    return float(v.max() - v.min()) < tol * (1.0 + float(np.abs(v).max()))


# -- certification -------------------------------------------------------------------


@dataclass
class KqCertificate:
    """Empirical constants for the membership checks of one operator."""

    op: str
    q: float
    constants: dict[str, float] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    witnesses: dict[str, dict] = field(default_factory=dict)
    seed: int = 0

    def record(self, key: str, ratio: float, witness: dict) -> None:
        self.counts[key] = self.counts.get(key, 0) + 1
        if not math.isfinite(ratio):
            raise FloatingPointError(f"non-finite ratio for {key}: witness {witness}")
        if ratio > self.constants.get(key, -math.inf):
            self.constants[key] = ratio
            self.witnesses[key] = witness

    def to_json(self) -> dict:
        return {
            "op": self.op,
            "q": self.q,
            "constants": self.constants,
            "counts": self.counts,
            "witnesses": self.witnesses,
            "seed": self.seed,
        }


def kq_certify(
    T: SublinearOp,
    q: float,
    *,
    atoms,
    jumps,
    bmo_functions,
    random_functions,
    seed: int = 0,
    check_commuting: bool | None = None,
    include_spikes: bool = True,
) -> KqCertificate:
    """Estimate the four membership constants plus the mapping bounds.

    ``atoms``/``jumps`` are certificate lists, ``bmo_functions`` step
    functions paired cyclically with them, ``random_functions`` terminal
    draws for the H1->Lq and L1->weak-Lq ratios (complemented by a scan of
    every single-leaf spike unless ``include_spikes`` is off).  For
    transform-like operators the predictable-multiplier commutation identity
    is also verified exactly.
    """
    tree = T.tree
    cert = KqCertificate(op=T.name, q=q, seed=seed)
    if check_commuting is None:
        check_commuting = T.commutes_with_past

    for i, f in enumerate(random_functions):
        m = as_martingale(f)
        tf = T.apply(f)
        h1 = h1_norm(m)
        l1 = lp_norm(f, 1)
        if h1 > 0:
            cert.record("H1->Lq", lp_norm(tf, q) / h1, {"sample": i})
        if l1 > 0:
            cert.record("L1->weak-Lq", weak_lq_norm(tf, q) / l1, {"sample": i})

    if include_spikes:
        # single-leaf spikes are the extremal family for the weak-type bound
        # and give a systematic, depth-comparable scan of both mapping ratios
        leaves = np.nonzero(tree.positive_mask)[0]
        block = max(1, BATCH_LEAF_BUDGET // tree.n_leaves)
        for start in range(0, leaves.size, block):
            idx = leaves[start : start + block]
            rows = np.zeros((idx.size, tree.n_leaves))
            rows[np.arange(idx.size), idx] = 1.0
            out = T.apply_batch(rows)
            h1s = (square_function_batch(tree, rows) * tree.leaf_mass).sum(axis=1)
            for i, leaf in enumerate(idx):
                sf = StepFunction(tree, out[i])
                cert.record(
                    "L1->weak-Lq", weak_lq_norm(sf, q) / tree.leaf_mass[leaf], {"spike": int(leaf)}
                )
                if h1s[i] > 0:
                    cert.record("H1->Lq", lp_norm(sf, q) / h1s[i], {"spike": int(leaf)})

    for i, atom in enumerate(atoms):
        b = bmo_functions[i % len(bmo_functions)]
        bn = bmo_norm(as_martingale(b))
        a_sf = StepFunction(tree, atom.values)
        prev = tree.cond_exp(b.values, atom.level - 1) if atom.level >= 1 else np.zeros(tree.n_leaves)
        ta = T.apply(a_sf)
        lhs_mult = lp_norm(StepFunction(tree, (b.values - prev) * ta.values), q)
        cert.record("atom-mult", lhs_mult / bn, {"atom": i, "level": atom.level})
        comm = commutator_apply(T, StepFunction(tree, prev), a_sf)
        cert.record("atom-comm", lp_norm(comm, q) / bn, {"atom": i, "level": atom.level})
        if check_commuting:
            # the identity is homogeneous in the atom: check its unit-sup copy
            unit = atom.values / max(float(np.abs(atom.values).max()), 1e-300)
            mult = np.abs(prev) if T.nonnegative else prev
            direct = T.apply_batch(prev * unit)
            shortcut = mult * T.apply_batch(unit)
            gap = float(np.abs(direct - shortcut).max())
            scale = 1.0 + float(np.abs(shortcut).max())
            cert.record("commuting-gap", gap / scale, {"atom": i})

    for i, jump in enumerate(jumps):
        b = bmo_functions[i % len(bmo_functions)]
        bn = bmo_norm(as_martingale(b))
        w_sf = StepFunction(tree, jump.values)
        l1 = lp_norm(w_sf, 1)
        if l1 == 0:
            continue
        prev = tree.cond_exp(b.values, jump.level - 1) if jump.level >= 1 else np.zeros(tree.n_leaves)
        tw = T.apply(w_sf)
        lhs_mult = lp_norm(StepFunction(tree, (b.values - prev) * tw.values), q)
        cert.record("jump-mult", lhs_mult / (l1 * bn), {"jump": i, "level": jump.level})
        comm = commutator_apply(T, StepFunction(tree, prev), w_sf)
        cert.record("jump-comm", lp_norm(comm, q) / (l1 * bn), {"jump": i, "level": jump.level})
        if check_commuting:
            unit = jump.values / max(float(np.abs(jump.values).max()), 1e-300)
            mult = np.abs(prev) if T.nonnegative else prev
            gap = float(np.abs(T.apply_batch(prev * unit) - mult * T.apply_batch(unit)).max())
            cert.record("commuting-gap", gap / (1.0 + float(np.abs(T.apply_batch(unit)).max())), {"jump": i})
    return cert


def endpoint_report(
    T: SublinearOp,
    b: StepFunction,
    *,
    weak_functions,
    strong_functions,
    q: float | None = None,
) -> dict[str, float]:
    """Max endpoint ratios: weak-type over H1 and strong type over the b-adapted norm.

    ``strong_functions`` should be finite combinations of atoms with zero
    conditional mean against b, so the adapted norm stays comparable.
    """
    if is_essentially_constant(b):
        raise ValueError("b must be non-constant")
    q = T.q if q is None else q
    weak_worst = 0.0
    for f in weak_functions:
        h1 = h1_norm(as_martingale(f))
        if h1 == 0:
            continue
        lhs = weak_lq_norm(commutator_apply(T, b, f), q)
        weak_worst = max(weak_worst, lhs / h1)
    strong_worst = 0.0
    for f in strong_functions:
        denom = h1b_norm(b, f)
        if denom == 0:
            continue
        lhs = lp_norm(commutator_apply(T, b, f), q)
        strong_worst = max(strong_worst, lhs / denom)
    return {"weak": weak_worst, "strong": strong_worst}
