"""Haar functions adapted to a general binary measure and the dyadic Hilbert transform.

For an internal cell I with children I-, I+ put m(I) = mu(I-)mu(I+)/mu(I) and

    h_I = sqrt(m(I)) [ 1_{I-}/mu(I-) - 1_{I+}/mu(I+) ],

an L^2(mu)-normalised mean-zero function.  The shift maps h at a parent to the
signed sum of the children's h's: H(f) = sum_I delta(I) <f, h_parent(I)> h_I,
with delta = +1 on left children.  Everything below works level-by-level in
O(n_leaves * depth) without materialising any matrix.
"""

from __future__ import annotations

import numpy as np

from ..decomp import AtomCertificate
from ..filtration import FiltrationTree
from ..martingale import StepFunction


class HaarSystem:
    """Haar functions of a binary tree with strictly positive cell masses."""

    def __init__(self, tree: FiltrationTree):
        if any(p != 2 for p in tree.branching):
            raise ValueError("Haar system requires a binary tree")
        for n in range(tree.depth + 1):
            if np.any(tree.level_mass(n) <= 0):
                raise ValueError(f"zero-mass cell at level {n}")
        self.tree = tree
        # m-values and child masses per internal level
        self._m = [
            tree.level_mass(n + 1)[0::2] * tree.level_mass(n + 1)[1::2] / tree.level_mass(n)
            for n in range(tree.depth)
        ]

    @property
    def depth(self) -> int:
        return self.tree.depth

    def m_value(self, level: int, index: int) -> float:
        """m(I) for the internal cell (level, index)."""
        return float(self._m[level][index])

    def haar_values(self, level: int, index: int) -> np.ndarray:
        """Leaf values of h_I for the internal cell (level, index)."""
        tree = self.tree
        root = np.sqrt(self._m[level][index])
        left, right = 2 * index, 2 * index + 1
        masses = tree.level_mass(level + 1)
        out = np.zeros(tree.n_leaves)
        s = tree.stride(level + 1)
        out[left * s : (left + 1) * s] = root / masses[left]
        out[right * s : (right + 1) * s] = -root / masses[right]
        return out

    def haar_function(self, level: int, index: int) -> StepFunction:
        return StepFunction(self.tree, self.haar_values(level, index))

    def coefficients(self, values: np.ndarray, level: int) -> np.ndarray:
        """<f, h_I> for every internal cell I of one level (batched over leading axes)."""
        tree = self.tree
        means = tree.cell_averages(values, level + 1)
        return np.sqrt(self._m[level]) * (means[..., 0::2] - means[..., 1::2])

    def expand_coefficients(self, coeffs: np.ndarray, level: int) -> np.ndarray:
        """sum_I coeffs[I] h_I over the internal cells of one level, as leaf values."""
        tree = self.tree
        masses = tree.level_mass(level + 1)
        root = np.sqrt(self._m[level])
        per_child = np.empty(coeffs.shape[:-1] + (tree.n_cells[level + 1],))
        per_child[..., 0::2] = coeffs * root / masses[0::2]
        per_child[..., 1::2] = -coeffs * root / masses[1::2]
        return tree.expand(per_child, level + 1)

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(self.tree.integrate(u * v))


def _values_of(f) -> np.ndarray:
    return f.values if isinstance(f, StepFunction) else np.asarray(f, dtype=float)


def dyadic_hilbert_values(sys: HaarSystem, values: np.ndarray) -> np.ndarray:
    """Shift f's Haar coefficient at each parent onto the two children (batched)."""
    out = np.zeros_like(values, dtype=float)
    # children at level k (internal, so k <= depth-1) with parents at k-1
    for k in range(1, sys.depth):
        parent = sys.coefficients(values, k - 1)
        signed = np.empty(values.shape[:-1] + (sys.tree.n_cells[k],))
        signed[..., 0::2] = parent
        signed[..., 1::2] = -parent
        out += sys.expand_coefficients(signed, k)
    return out


def dyadic_hilbert(sys: HaarSystem, f: StepFunction | np.ndarray) -> StepFunction:
    """H(f) = sum_{I internal, non-root} delta(I) <f, h_parent(I)> h_I."""
    return StepFunction(sys.tree, dyadic_hilbert_values(sys, _values_of(f)))


def dyadic_hilbert_adjoint_values(sys: HaarSystem, values: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values, dtype=float)
    for k in range(1, sys.depth):
        child = sys.coefficients(values, k)
        folded = child[..., 0::2] - child[..., 1::2]
        out += sys.expand_coefficients(folded, k - 1)
    return out


def dyadic_hilbert_adjoint(sys: HaarSystem, f: StepFunction | np.ndarray) -> StepFunction:
    """Adjoint shift: coefficients at the children fold back onto the parent."""
    return StepFunction(sys.tree, dyadic_hilbert_adjoint_values(sys, _values_of(f)))


def hilbert_on_jump(sys: HaarSystem, w: AtomCertificate) -> StepFunction:
    """Single-level evaluation of the shift on a jump at level n.

    Coefficients against parents away from level n-1 vanish, so only the
    level-n children contribute; agrees with the full transform.
    """
    if w.kind != "jump":
        raise ValueError("expected a jump certificate")
    tree = sys.tree
    values = np.asarray(w.values, dtype=float)
    n = w.level
    out = np.zeros(tree.n_leaves)
    if 1 <= n <= sys.depth - 1:
        parent = sys.coefficients(values, n - 1)
        signed = np.empty(tree.n_cells[n])
        signed[0::2] = parent
        signed[1::2] = -parent
        out = sys.expand_coefficients(signed, n)
    return StepFunction(tree, out)


def operator_l2_norm(
    sys: HaarSystem,
    apply_values,
    adjoint_values,
    *,
    steps: int = 200,
    seed: int = 7,
) -> float:
    """L^2(mu) operator norm by power iteration on the normal operator."""
    tree = sys.tree
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(tree.n_leaves)
    v[~tree.positive_mask] = 0.0
    lam = 0.0
    for _ in range(steps):
        w = adjoint_values(sys, apply_values(sys, v))
        norm2 = float(tree.integrate(w * w))
        if norm2 <= 0:
            return 0.0
        lam = float(tree.integrate(v * w)) / float(tree.integrate(v * v))
        v = w / np.sqrt(norm2)
    return float(np.sqrt(max(lam, 0.0)))
