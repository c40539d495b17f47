"""Bilinear product decomposition, Davis splitting, and atoms.

The product of two martingales splits pointwise at every level as
f_n g_n = Pi1_n + Pi2_n + L_n, where the paraproducts collect the
off-diagonal difference interactions and L is the bounded-variation
diagonal.  The Davis split sends large predictable-relative jumps to an
h_1^d part; the stopping-time construction turns any h_1 martingale into
a sum of localized atoms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .filtration import CellRef, FiltrationTree
from .martingale import (
    Martingale,
    StepFunction,
    cond_square_function,
    doob_maximal,
    lp_norm,
    partial_cond_square,
    square_function,
)


class BVProcess:
    """Adapted sequence measured by its variation sum_n ||h_n - h_{n-1}||_1."""

    def __init__(self, tree: FiltrationTree, levels: np.ndarray):
        levels = np.asarray(levels, dtype=float)
        if levels.shape != (tree.depth + 1, tree.n_leaves):
            raise ValueError("levels must have shape (depth+1, n_leaves)")
        self.tree = tree
        self.levels = levels

    @property
    def terminal(self) -> StepFunction:
        return StepFunction(self.tree, self.levels[-1])

    def differences(self) -> np.ndarray:
        d = np.empty_like(self.levels)
        d[0] = self.levels[0]
        d[1:] = np.diff(self.levels, axis=0)
        return d

    def variation_norm(self) -> float:
        d = np.abs(self.differences())
        return float(sum(self.tree.integrate(d[n]) for n in range(d.shape[0])))


@dataclass
class ProductDecomposition:
    pi1: Martingale
    pi2: Martingale
    l: BVProcess

    @property
    def g_part(self) -> Martingale:
        """The martingale part Pi1 + Pi2."""
        return self.pi1 + self.pi2

    def identity_error(self, f: Martingale, g: Martingale) -> float:
        """Max over levels/leaves of |f_n g_n - (Pi1+Pi2+L)_n| / (1 + |f_n g_n|)."""
        prod = f.levels * g.levels
        recon = self.pi1.levels + self.pi2.levels + self.l.levels
        return float((np.abs(prod - recon) / (1.0 + np.abs(prod))).max())


def product_decompose(f: Martingale, g: Martingale) -> ProductDecomposition:
    """Split the semimartingale (f_n g_n) into two paraproducts and a BV part.

    d_n Pi1 = f_{n-1} d_n g, d_n Pi2 = g_{n-1} d_n f, L_n = sum_{k<=n} d_k f d_k g.
    """
    if f.tree is not g.tree:
        raise ValueError("martingales live on different trees")
    df, dg = f.differences(), g.differences()
    d_pi1 = np.zeros_like(df)
    d_pi2 = np.zeros_like(df)
    d_pi1[1:] = f.levels[:-1] * dg[1:]
    d_pi2[1:] = g.levels[:-1] * df[1:]
    pi1 = Martingale(f.tree, np.cumsum(d_pi1, axis=0))
    pi2 = Martingale(f.tree, np.cumsum(d_pi2, axis=0))
    l = BVProcess(f.tree, np.cumsum(df * dg, axis=0))
    return ProductDecomposition(pi1, pi2, l)


def diagonal_l1_sum(f: Martingale, g: Martingale) -> float:
    """sum_k E|d_k f * d_k g|, the variation norm of the diagonal part."""
    df, dg = f.differences(), g.differences()
    return float(sum(f.tree.integrate(np.abs(df[k] * dg[k])) for k in range(f.depth + 1)))


def davis_decompose(f: Martingale) -> tuple[Martingale, Martingale]:
    """Split f = f1 + fd with f1 h_1-eligible (f1_0 = 0) and fd of summable jumps.

    The big-jump part takes d_n f on {|d_n f| > 2 max_{k<n} |d_k f|},
    recentred by its predictable compensator; the level-0 difference goes to
    fd wholesale so that f1 starts at zero.
    """
    tree = f.tree
    d = f.differences()
    d_fd = np.zeros_like(d)
    d_fd[0] = d[0]
    lam = np.abs(d[0])  # running max of |d_k f|, k <= n-1
    for n in range(1, f.depth + 1):
        big = d[n] * (np.abs(d[n]) > 2.0 * lam)
        d_fd[n] = big - tree.cond_exp(big, n - 1)
        lam = np.maximum(lam, np.abs(d[n]))
    fd = Martingale.from_differences(tree, d_fd)
    f1 = Martingale.from_differences(tree, d - d_fd)
    return f1, fd


@dataclass
class AtomCertificate:
    """Witness that ``values`` is an atom of the given kind.

    kind is one of "simple-s-inf", "simple-inf", "b-atom", "jump"; ``cells``
    lists the level-``level`` cell indices making up the supporting set A.
    ``coefficient`` carries the weight when the atom arises from a
    decomposition (1.0 for standalone atoms).
    """

    kind: str
    level: int
    cells: tuple[int, ...]
    values: np.ndarray
    coefficient: float = 1.0
    flags: tuple[str, ...] = ()

    def support_mass(self, tree: FiltrationTree) -> float:
        return float(sum(tree.level_mass(self.level)[list(self.cells)]))

    def support_leaf_mask(self, tree: FiltrationTree) -> np.ndarray:
        mask = np.zeros(tree.n_leaves, dtype=bool)
        for j in self.cells:
            lo, hi = tree.leaf_range(CellRef(self.level, j))
            mask[lo:hi] = True
        return mask

    def step_function(self, tree: FiltrationTree) -> StepFunction:
        return StepFunction(tree, self.values)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "level": self.level,
            "cells": list(self.cells),
            "coefficient": self.coefficient,
            "values": np.asarray(self.values, dtype=float).tolist(),
            "flags": list(self.flags),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "AtomCertificate":
        return cls(
            kind=doc["kind"],
            level=int(doc["level"]),
            cells=tuple(int(j) for j in doc["cells"]),
            values=np.asarray(doc["values"], dtype=float),
            coefficient=float(doc.get("coefficient", 1.0)),
            flags=tuple(doc.get("flags", ())),
        )


def atomic_decompose(f: Martingale) -> list[AtomCertificate]:
    """Stopping-time decomposition of an h_1 martingale into localized atoms.

    Stopping times tau_k = inf{n : s_{n+1}(f) > 2^k} cut f into dyadic-scale
    pieces; each piece restricted to one cell of {tau_k = n} is a simple
    (s,inf)-atom with coefficient 2^(k+1) P(cell).  The weighted sum of the
    emitted atoms reconstructs f exactly at finite depth.
    """
    tree = f.tree
    if np.abs(f.levels[0]).max() > 1e-14 * (1.0 + np.abs(f.levels).max()):
        raise ValueError("atomic decomposition needs f_0 = 0")
    N = tree.depth
    s_partial = partial_cond_square(f)  # s_m for m = 0..N; tau uses s_{n+1}, n <= N-1
    s_next = s_partial[1:]  # row n holds s_{n+1}, F_n-measurable
    # the bottom scale must undercut every positive s_m value, so that the
    # lowest stopped martingale vanishes identically
    positive = s_next[:, tree.positive_mask]
    positive = positive[positive > 0]
    if positive.size == 0:
        return []
    k_min = math.floor(math.log2(positive.min())) - 1
    k_max = math.ceil(math.log2(positive.max() * (1 + 1e-12)))
    d = f.differences()

    def stopped(tau: np.ndarray) -> np.ndarray:
        """Terminal value of f stopped at tau (tau = N means 'never')."""
        out = np.zeros(tree.n_leaves)
        for m in range(N + 1):
            out += d[m] * (m <= tau)
        return out

    def tau_for(threshold: float) -> np.ndarray:
        exceeded = s_next > threshold  # row n: {tau <= n}, F_n-measurable
        first = np.argmax(exceeded, axis=0)
        never = ~exceeded.max(axis=0)
        first[never] = N  # sentinel: never stopped before the end
        return first

    atoms: list[AtomCertificate] = []
    prev_tau = tau_for(2.0**k_min)
    prev_stop = stopped(prev_tau)
    for k in range(k_min, k_max + 1):
        next_tau = tau_for(2.0 ** (k + 1))
        next_stop = stopped(next_tau)
        piece = next_stop - prev_stop
        if np.abs(piece).max() > 0:
            scale = 2.0 ** (k + 1)
            for n in range(N):  # {tau_k = n} is a union of level-n cells
                on_level = prev_tau == n
                if not on_level.any():
                    continue
                stride = tree.stride(n)
                cell_hit = on_level.reshape(-1, stride).any(axis=1)
                for j in np.nonzero(cell_hit)[0]:
                    lo, hi = j * stride, (j + 1) * stride
                    mass = float(tree.level_mass(n)[j])
                    if mass <= 0 or np.abs(piece[lo:hi]).max() == 0:
                        continue
                    mu = scale * mass
                    values = np.zeros(tree.n_leaves)
                    values[lo:hi] = piece[lo:hi] / mu
                    atoms.append(
                        AtomCertificate("simple-s-inf", n, (int(j),), values, coefficient=mu)
                    )
        prev_tau, prev_stop = next_tau, next_stop
    return atoms


def reconstruct(tree: FiltrationTree, atoms: list[AtomCertificate]) -> StepFunction:
    total = np.zeros(tree.n_leaves)
    for a in atoms:
        total += a.coefficient * a.values
    return StepFunction(tree, total)


@dataclass
class AtomCheck:
    ok: bool
    reasons: list[str] = field(default_factory=list)
    metrics: dict = field(default_factory=dict)


def verify_atom(
    tree: FiltrationTree,
    cert: AtomCertificate,
    b: StepFunction | None = None,
    *,
    rel_tol: float = 1e-9,
) -> AtomCheck:
    """Check the defining properties of the certificate, and for sup-normalised
    atoms the support/maximal/square-function consequences at p in {1, 3/2, 2}."""
    check = AtomCheck(ok=True)
    a = StepFunction(tree, cert.values)
    scale = 1.0 + float(np.abs(a.values).max())
    mask = cert.support_leaf_mask(tree)

    def fail(reason: str) -> None:
        check.ok = False
        check.reasons.append(reason)

    if cert.kind == "jump":
        level_fit = np.abs(tree.cond_exp(a.values, cert.level) - a.values).max()
        if level_fit > rel_tol * scale:
            fail("not measurable at its level")
        prev = tree.cond_exp(a.values, cert.level - 1) if cert.level >= 1 else np.zeros(1)
        if np.abs(prev).max() > rel_tol * scale:
            fail("nonzero conditional mean at the previous level")
        check.metrics["l1"] = lp_norm(a, 1)
        return check

    if np.abs(a.values[~mask]).max(initial=0.0) > 0:
        fail("support leaks outside the declared cells")
    mean_n = tree.cond_exp(a.values, cert.level)
    if np.abs(mean_n).max() > rel_tol * scale:
        fail("nonzero conditional mean")
    if cert.kind == "b-atom":
        if b is None:
            fail("b-atom check needs the function b")
        else:
            mixed = tree.cond_exp(a.values * b.values, cert.level)
            if np.abs(mixed).max() > rel_tol * scale * (1.0 + np.abs(b.values).max()):
                fail("nonzero conditional mean against b")

    mart = Martingale.from_terminal(a)
    m_of_a = doob_maximal(mart)
    s_big = square_function(mart)
    s_small = cond_square_function(mart)
    p_a = cert.support_mass(tree)
    if p_a <= 0:
        fail("supporting set has zero mass")
        return check
    bound = 1.0 / p_a
    sup_tol = 1.0 + rel_tol
    if cert.kind == "simple-s-inf":
        sup_val = lp_norm(s_small, math.inf)
        check.metrics["sup_s"] = sup_val
        if sup_val > bound * sup_tol:
            fail("conditional square function exceeds 1/P(A)")
    else:
        sup_val = lp_norm(a, math.inf)
        check.metrics["sup"] = sup_val
        if sup_val > bound * sup_tol:
            fail("sup norm exceeds 1/P(A)")

    for op_name, g in (("M", m_of_a), ("S", s_big), ("s", s_small)):
        if np.abs(g.values[~mask]).max(initial=0.0) > rel_tol * scale:
            fail(f"support of {op_name}(a) leaks outside the declared cells")
    for p in (1.0, 1.5, 2.0):
        cap = p_a ** (1.0 / p - 1.0)
        ratios = {
            "M": lp_norm(m_of_a, p) / (2.0 * cap),
            "S": lp_norm(s_big, p) / cap,
            "s": lp_norm(s_small, p) / cap,
            "a": lp_norm(a, p) / cap,
        }
        check.metrics[f"p={p}"] = ratios
        for name, r in ratios.items():
            if r > sup_tol:
                fail(f"bound for {name} at p={p} exceeded (ratio {r:.6f})")
    return check


def _project_out(values: np.ndarray, mass: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    """Remove the mass-weighted span of ``basis`` from ``values`` (Gram-Schmidt)."""
    out = values.copy()
    ortho: list[np.ndarray] = []
    for u in basis:
        u = u.astype(float).copy()
        for v in ortho:
            u -= (mass * u * v).sum() * v
        norm2 = float((mass * u * u).sum())
        if norm2 <= 1e-24:
            continue
        ortho.append(u / math.sqrt(norm2))
    for v in ortho:
        out -= (mass * out * v).sum() * v
    return out


def random_atom(
    tree: FiltrationTree,
    level: int,
    cells: int | tuple[int, ...],
    kind: str,
    rng: np.random.Generator,
    b: StepFunction | None = None,
    resolution: int | None = None,
) -> AtomCertificate:
    """Draw a random atom of the requested kind on a union of level cells.

    Values are sampled i.i.d. on the support, projected cellwise onto the
    constraint space (zero conditional mean; for b-atoms also zero mean
    against b), then rescaled so the defining sup bound is met with equality.
    ``resolution`` coarsens the draw to that level's cells, giving atoms
    whose scale content does not depend on the tree depth.
    """
    if kind not in {"simple-s-inf", "simple-inf", "b-atom", "jump"}:
        raise ValueError(f"unknown atom kind {kind!r}")
    if isinstance(cells, int):
        cells = (cells,)
    cells = tuple(int(j) for j in cells)
    for j in cells:
        tree.validate_cell(CellRef(level, j))
    flags: list[str] = []

    if kind == "jump":
        if level == 0:
            values = np.full(tree.n_leaves, float(rng.standard_normal()))
        else:
            raw = tree.expand(rng.standard_normal(tree.n_cells[level]), level)
            values = raw - tree.cond_exp(raw, level - 1)
        l1 = float(tree.integrate(np.abs(values)))
        if l1 > 0:
            values = values / l1
        return AtomCertificate("jump", level, cells, values)

    if resolution is None:
        resolution = tree.depth
    resolution = max(min(resolution, tree.depth), level + 1)

    values = np.zeros(tree.n_leaves)
    for j in cells:
        lo, hi = tree.leaf_range(CellRef(level, j))
        mass = tree.leaf_mass[lo:hi]
        if mass.sum() <= 0:
            continue
        draw = tree.expand(rng.standard_normal(tree.n_cells[resolution]), resolution)[lo:hi]
        basis = [np.ones(hi - lo)]
        if kind == "b-atom":
            if b is None:
                raise ValueError("b-atom generation needs b")
            seg = b.values[lo:hi]
            centred = _project_out(seg, mass, [np.ones(hi - lo)])
            if float((mass * centred * centred).sum()) <= 1e-20 * (1.0 + float(np.abs(seg).max())) ** 2:
                flags.append(f"b constant on cell {j}: fell back to mean-zero only")
            else:
                basis.append(seg)
        proj = _project_out(draw, mass, basis)
        proj[mass == 0] = 0.0
        values[lo:hi] = proj

    cert = AtomCertificate(kind, level, cells, values, flags=tuple(flags))
    p_a = cert.support_mass(tree)
    if p_a <= 0:
        raise ValueError("supporting cells carry no mass")
    if kind == "simple-s-inf":
        current = lp_norm(cond_square_function(Martingale.from_terminal(StepFunction(tree, values))), math.inf)
    else:
        current = float(np.abs(values[tree.positive_mask]).max())
    if current <= 0:  # degenerate draw (e.g. single-leaf support); use a flat fallback
        raise ValueError("degenerate atom draw: projection annihilated the sample")
    cert.values = values * (1.0 / (p_a * current))
    return cert
