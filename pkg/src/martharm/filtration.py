"""Finite atom-generated filtrations on [0, 1).

A tree here is a sequence of nested interval partitions of [0, 1): level 0 is
the single root cell, and every level-n cell splits into ``branching[n]``
equal-width children at level n+1.  Probability mass lives on the leaves and
is aggregated upward, so a tree simultaneously encodes the filtration, the
measure, and the conditional-expectation operators.
"""

from __future__ import annotations

import json
from fractions import Fraction
from hashlib import sha256
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

DEFAULT_MAX_LEAVES = 1 << 14
MASS_TOL = 1e-12


class CellRef(NamedTuple):
    """Address of one cell: (level, index among that level's cells)."""

    level: int
    index: int


class FiltrationTree:
    """Finite filtration of [0, 1) with uniform per-level branching.

    Cells at level n are the intervals [j/C_n, (j+1)/C_n) where C_n is the
    product of the first n branching factors; endpoints are therefore exact
    rationals recoverable with :meth:`cell_interval`.  The measure is given
    by one nonnegative float per leaf, summing to 1.
    """

    def __init__(
        self,
        branching: Sequence[int],
        leaf_mass: Sequence[float] | np.ndarray,
        *,
        leaf_mass_exact: list[Fraction] | None = None,
    ):
        branching = tuple(int(p) for p in branching)
        if not branching:
            raise ValueError("branching must be nonempty (depth >= 1)")
        if any(p < 2 for p in branching):
            raise ValueError(f"branching factors must be >= 2, got {branching}")
        self.branching = branching
        self.depth = len(branching)
        counts = [1]
        for p in branching:
            counts.append(counts[-1] * p)
        self.n_cells = tuple(counts)
        self.n_leaves = counts[-1]

        mass = np.asarray(leaf_mass, dtype=float)
        if mass.shape != (self.n_leaves,):
            raise ValueError(
                f"leaf_mass must have length {self.n_leaves}, got {mass.shape}"
            )
        if np.any(mass < 0):
            raise ValueError("leaf masses must be nonnegative")
        total = float(mass.sum())
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"leaf masses must sum to 1 (got {total!r})")
        mass = mass.copy()
        mass.flags.writeable = False
        self.leaf_mass = mass
        self.leaf_mass_exact = leaf_mass_exact

        self._level_mass = [self.cell_sums(mass, n) for n in range(self.depth + 1)]
        for m in self._level_mass:
            m.flags.writeable = False

    # -- geometry ----------------------------------------------------------

    def stride(self, level: int) -> int:
        """Number of leaves under one level-``level`` cell."""
        return self.n_leaves // self.n_cells[level]

    def validate_cell(self, cell: CellRef) -> CellRef:
        n, j = cell
        if not 0 <= n <= self.depth:
            raise ValueError(f"level {n} outside 0..{self.depth}")
        if not 0 <= j < self.n_cells[n]:
            raise ValueError(f"cell index {j} outside level {n} (size {self.n_cells[n]})")
        return CellRef(n, j)

    def parent(self, cell: CellRef) -> CellRef:
        n, j = self.validate_cell(cell)
        if n == 0:
            raise ValueError("root cell has no parent")
        return CellRef(n - 1, j // self.branching[n - 1])

    def children(self, cell: CellRef) -> list[CellRef]:
        n, j = self.validate_cell(cell)
        if n == self.depth:
            return []
        p = self.branching[n]
        return [CellRef(n + 1, j * p + t) for t in range(p)]

    def cell_interval(self, cell: CellRef) -> tuple[Fraction, Fraction]:
        """Exact rational endpoints [a, b) of the cell."""
        n, j = self.validate_cell(cell)
        c = self.n_cells[n]
        return Fraction(j, c), Fraction(j + 1, c)

    def leaf_range(self, cell: CellRef) -> tuple[int, int]:
        n, j = self.validate_cell(cell)
        s = self.stride(n)
        return j * s, (j + 1) * s

    def leaf_boundaries(self) -> list[Fraction]:
        c = self.n_leaves
        return [Fraction(j, c) for j in range(c + 1)]

    # -- measure and averaging ---------------------------------------------

    def level_mass(self, level: int) -> np.ndarray:
        """Masses of the level's cells, as an array of length n_cells[level]."""
        return self._level_mass[level]

    def cell_mass(self, cell: CellRef) -> float:
        n, j = self.validate_cell(cell)
        return float(self._level_mass[n][j])

    def cell_mass_exact(self, cell: CellRef) -> Fraction:
        if self.leaf_mass_exact is None:
            raise ValueError("tree was not built with exact masses")
        lo, hi = self.leaf_range(cell)
        return sum(self.leaf_mass_exact[lo:hi], Fraction(0))

    def cell_sums(self, values, level: int) -> np.ndarray:
        """Sum leaf values within each level-``level`` cell (vectorised, any leading axes)."""
        v = np.asarray(values, dtype=float)
        c = self.n_cells[level]
        return v.reshape(v.shape[:-1] + (c, self.stride(level))).sum(axis=-1)

    def cell_averages(self, values, level: int) -> np.ndarray:
        """Mass-weighted cell averages of a leaf function; 0 on zero-mass cells."""
        s = self.cell_sums(np.asarray(values, dtype=float) * self.leaf_mass, level)
        m = self._level_mass[level]
        return np.divide(s, m, out=np.zeros_like(s), where=m > 0)

    def expand(self, cell_values, level: int) -> np.ndarray:
        """Broadcast one value per level-``level`` cell back to the leaves."""
        return np.repeat(np.asarray(cell_values, dtype=float), self.stride(level), axis=-1)

    def cond_exp(self, values, level: int) -> np.ndarray:
        """Conditional expectation onto the level's cells, as a leaf array."""
        if not 0 <= level <= self.depth:
            raise ValueError(f"level {level} outside 0..{self.depth}")
        if level == self.depth:
            return np.asarray(values, dtype=float).copy()
        return self.expand(self.cell_averages(values, level), level)

    def integrate(self, values) -> float | np.ndarray:
        """Integral against the tree's measure (sum over leaves)."""
        out = (np.asarray(values, dtype=float) * self.leaf_mass).sum(axis=-1)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def positive_mask(self) -> np.ndarray:
        return self.leaf_mass > 0

    # -- identity ------------------------------------------------------------

    def key(self) -> str:
        """Stable content id used when serialising functions against this tree."""
        payload = json.dumps(
            {"branching": list(self.branching), "mass": self.leaf_mass.tolist()},
            separators=(",", ":"),
        )
        return sha256(payload.encode()).hexdigest()[:16]

    def __repr__(self) -> str:
        return f"FiltrationTree(branching={self.branching}, leaves={self.n_leaves})"


# -- builders ----------------------------------------------------------------


def build_pk_filtration(
    p_seq: Sequence[int],
    measure: str | Sequence[float] = "uniform",
    *,
    max_leaves: int = DEFAULT_MAX_LEAVES,
) -> FiltrationTree:
    """Tree with branching factors ``p_seq`` on [0, 1).

    Level n has prod(p_seq[:n]) equal-width interval cells.  ``measure`` is
    either ``"uniform"`` (Lebesgue) or an explicit per-leaf mass vector that
    must be nonnegative and sum to 1 within 1e-12.
    """
    p_seq = tuple(int(p) for p in p_seq)
    if not p_seq:
        raise ValueError("p_seq must be nonempty")
    if any(p < 2 for p in p_seq):
        raise ValueError(f"branching factors must be >= 2, got {p_seq}")
    n_leaves = int(np.prod(p_seq))
    if n_leaves > max_leaves:
        raise ValueError(
            f"{n_leaves} leaves exceeds max_leaves={max_leaves}; pass max_leaves= to override"
        )
    if isinstance(measure, str):
        if measure != "uniform":
            raise ValueError(f"unknown measure {measure!r}")
        mass = np.full(n_leaves, 1.0 / n_leaves)
        exact = [Fraction(1, n_leaves)] * n_leaves
        return FiltrationTree(p_seq, mass, leaf_mass_exact=exact)
    return FiltrationTree(p_seq, measure)


def dyadic_lebesgue(depth: int, *, max_leaves: int = DEFAULT_MAX_LEAVES) -> FiltrationTree:
    """Uniform binary tree of the given depth with Lebesgue measure."""
    return build_pk_filtration((2,) * depth, "uniform", max_leaves=max_leaves)


def build_nondoubling_measure(
    depth: int, *, max_leaves: int = DEFAULT_MAX_LEAVES
) -> FiltrationTree:
    """Binary tree carrying the non-doubling measure on the chain I_k = [0, 2^-k).

    The chain cell keeps the fraction a_k of its parent's mass (a_1 = 1/2,
    a_k = 1 - 2^(-k^2) for k >= 2) and the brother [2^-k, 2^-(k-1)) gets the
    rest, spread uniformly (Lebesgue-proportionally) over its leaves.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    n_leaves = 1 << depth
    if n_leaves > max_leaves:
        raise ValueError(
            f"{n_leaves} leaves exceeds max_leaves={max_leaves}; pass max_leaves= to override"
        )
    exact = [Fraction(0)] * n_leaves
    chain_mass = Fraction(1)
    for k in range(1, depth + 1):
        alpha = Fraction(1, 2) if k == 1 else 1 - Fraction(1, 2 ** (k * k))
        brother_mass = (1 - alpha) * chain_mass
        chain_mass = alpha * chain_mass
        # brother of I_k is [2^-k, 2^-(k-1)): leaves 2^(depth-k) .. 2^(depth-k+1)-1
        lo = 1 << (depth - k)
        hi = 1 << (depth - k + 1)
        per_leaf = brother_mass / (hi - lo)
        for j in range(lo, hi):
            exact[j] = per_leaf
    exact[0] = chain_mass  # I_depth itself is the leftmost leaf
    mass = np.array([float(x) for x in exact])
    mass /= mass.sum()  # remove float rounding drift; exact values kept alongside
    return FiltrationTree((2,) * depth, mass, leaf_mass_exact=exact)


# -- filtration-level operations ----------------------------------------------


def conditional_expectation(tree: FiltrationTree, f, n: int):
    """E_n f as a leaf function; ``f`` is a leaf array or StepFunction."""
    values = getattr(f, "values", f)
    out = tree.cond_exp(values, n)
    if hasattr(f, "values"):
        return type(f)(tree, out)
    return out


def regularity_constant(tree: FiltrationTree) -> float:
    """Least C with mass(parent) <= C * mass(cell) over all non-root cells."""
    worst = 0.0
    for n in range(1, tree.depth + 1):
        child = tree.level_mass(n)
        if np.any(child <= 0):
            raise ValueError("regularity constant undefined: zero-mass cell at level %d" % n)
        parent = np.repeat(tree.level_mass(n - 1), tree.branching[n - 1])
        worst = max(worst, float((parent / child).max()))
    return worst


def _m_values(tree: FiltrationTree, level: int) -> np.ndarray:
    """m(I) = mass(I_-) mass(I_+) / mass(I) for the internal cells of a level."""
    left = tree.level_mass(level + 1)[0::2]
    right = tree.level_mass(level + 1)[1::2]
    return left * right / tree.level_mass(level)


def _check_binary_positive(tree: FiltrationTree) -> None:
    if any(p != 2 for p in tree.branching):
        raise ValueError("m-constants require a binary tree")
    for n in range(tree.depth):
        if np.any(tree.level_mass(n) <= 0):
            raise ValueError(f"zero-mass cell at level {n}")


def m_increasing_constant(tree: FiltrationTree) -> float:
    """Max of m(I)/m(parent(I)) over internal non-root cells I."""
    _check_binary_positive(tree)
    if tree.depth < 2:
        return 0.0
    worst = 0.0
    for n in range(1, tree.depth):
        m_child = _m_values(tree, n)
        m_parent = np.repeat(_m_values(tree, n - 1), 2)
        if np.any(m_parent <= 0):
            raise ValueError(f"zero m-value among level-{n - 1} cells")
        worst = max(worst, float((m_child / m_parent).max()))
    return worst


def m_decreasing_constant(tree: FiltrationTree) -> float:
    """Max of m(parent(I))/m(I) over internal non-root cells I."""
    _check_binary_positive(tree)
    if tree.depth < 2:
        return 0.0
    worst = 0.0
    for n in range(1, tree.depth):
        m_child = _m_values(tree, n)
        if np.any(m_child <= 0):
            raise ValueError(f"zero m-value among level-{n} cells")
        m_parent = np.repeat(_m_values(tree, n - 1), 2)
        worst = max(worst, float((m_parent / m_child).max()))
    return worst


# -- serialisation -------------------------------------------------------------


def tree_to_json(tree: FiltrationTree) -> dict:
    """Tree description document: branching, measure, depth, exact endpoints."""
    mass = tree.leaf_mass
    uniform = np.allclose(mass, 1.0 / tree.n_leaves, rtol=0, atol=1e-15)
    measure: str | dict
    if uniform:
        measure = "uniform"
    else:
        measure = {"leaf_masses": mass.tolist()}
    bounds = tree.leaf_boundaries()
    return {
        "branching": list(tree.branching),
        "measure": measure,
        "depth": tree.depth,
        "endpoints": [[b.numerator, b.denominator] for b in bounds],
    }


def tree_from_json(doc: dict) -> FiltrationTree:
    measure = doc.get("measure", "uniform")
    branching = doc.get("branching")
    depth = doc.get("depth")
    if measure == "nondoubling":
        if depth is None:
            raise ValueError("nondoubling measure needs a depth field")
        tree = build_nondoubling_measure(int(depth))
    elif measure == "uniform":
        tree = build_pk_filtration(branching, "uniform")
    elif isinstance(measure, dict) and "leaf_masses" in measure:
        tree = build_pk_filtration(branching, measure["leaf_masses"])
    else:
        raise ValueError(f"unrecognised measure spec {measure!r}")
    if depth is not None and tree.depth != int(depth):
        raise ValueError(f"depth field {depth} does not match branching (depth {tree.depth})")
    endpoints = doc.get("endpoints")
    if endpoints is not None:
        expect = tree.leaf_boundaries()
        got = [Fraction(int(n), int(d)) for n, d in endpoints]
        if got != expect:
            raise ValueError("endpoint list does not match the reconstructed tree")
    return tree


def save_tree(tree: FiltrationTree, path: str | Path) -> None:
    Path(path).write_text(json.dumps(tree_to_json(tree), indent=1))


def load_tree(path: str | Path) -> FiltrationTree:
    return tree_from_json(json.loads(Path(path).read_text()))
