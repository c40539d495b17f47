"""Martingale transforms and fractional integrals."""

from __future__ import annotations

import numpy as np

from ..filtration import FiltrationTree
from ..martingale import Martingale, StepFunction


class TransformSymbol:
    """Predictable multiplier sequence: eps_k is F_k-measurable with |eps_k| <= 1.

    ``eps`` has shape (depth, n_leaves); row k multiplies d_{k+1} f (the
    convention eps_{-1} = 0 kills the level-0 difference).
    """

    def __init__(self, tree: FiltrationTree, eps: np.ndarray):
        eps = np.asarray(eps, dtype=float)
        if eps.shape != (tree.depth, tree.n_leaves):
            raise ValueError(f"eps must have shape {(tree.depth, tree.n_leaves)}")
        scale = 1.0 + 1e-12
        mask = tree.positive_mask
        for k in range(tree.depth):
            if np.abs(eps[k] - tree.cond_exp(eps[k], k)).max() > 1e-10:
                raise ValueError(f"eps_{k} is not F_{k}-measurable")
            if mask.any() and np.abs(eps[k][mask]).max() > scale:
                raise ValueError(f"eps_{k} exceeds the unit sup bound")
        self.tree = tree
        self.eps = eps

    @classmethod
    def random_signs(cls, tree: FiltrationTree, rng: np.random.Generator) -> "TransformSymbol":
        eps = np.empty((tree.depth, tree.n_leaves))
        for k in range(tree.depth):
            signs = rng.integers(0, 2, tree.n_cells[k]) * 2.0 - 1.0
            eps[k] = tree.expand(signs, k)
        return cls(tree, eps)

    @classmethod
    def constant(cls, tree: FiltrationTree, value: float = 1.0) -> "TransformSymbol":
        return cls(tree, np.full((tree.depth, tree.n_leaves), float(value)))


def _transform_differences(eps: TransformSymbol, f: Martingale) -> np.ndarray:
    if eps.tree is not f.tree:
        raise ValueError("symbol and martingale live on different trees")
    d = f.differences()
    out = np.zeros_like(d)
    out[1:] = eps.eps * d[1:]
    return out


def martingale_transform(eps: TransformSymbol, f: Martingale) -> Martingale:
    """T_eps f with d_k(T_eps f) = eps_{k-1} d_k f (so the level-0 term drops)."""
    return Martingale.from_differences(f.tree, _transform_differences(eps, f))


def maximal_transform(eps: TransformSymbol, f: Martingale) -> StepFunction:
    """sup_n |sum_{k<=n} eps_{k-1} d_k f| pointwise."""
    partial = np.cumsum(_transform_differences(eps, f), axis=0)
    return StepFunction(f.tree, np.abs(partial).max(axis=0))


def level_mass_function(tree: FiltrationTree, level: int) -> np.ndarray:
    """beta_level: the leaf function whose value on each level cell is its mass."""
    return tree.expand(tree.level_mass(level), level)


def fractional_integral(alpha: float, f: Martingale, upto: int | None = None) -> Martingale:
    """I_alpha f = sum_k beta_{k-1}^alpha d_k f, with beta_{-1} = beta_0 = 1.

    ``upto`` truncates the sum at that level (the partial operator I_{alpha,n}).
    """
    if alpha < 0:
        raise ValueError("alpha must be > 0 (alpha = 0 is the identity)")
    tree = f.tree
    d = f.differences()
    out = np.zeros_like(d)
    stop = tree.depth if upto is None else min(upto, tree.depth)
    for k in range(stop + 1):
        beta = level_mass_function(tree, max(k - 1, 0))
        out[k] = beta**alpha * d[k]
    return Martingale.from_differences(tree, out)
