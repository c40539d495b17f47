"""Random corpora: martingales, BMO generators, atoms, and standard trees."""

from __future__ import annotations

import numpy as np

from ..decomp import AtomCertificate, random_atom
from ..filtration import CellRef, FiltrationTree, build_nondoubling_measure, build_pk_filtration, dyadic_lebesgue
from ..martingale import Martingale, StepFunction, as_martingale, bmo_norm

_TREE_CACHE: dict = {}


def standard_tree(kind: str, depth: int = 0, shape: tuple[int, ...] = ()) -> FiltrationTree:
    """Memoised builders for the trees the suites sweep over."""
    key = (kind, depth, shape)
    if key not in _TREE_CACHE:
        if kind == "dyadic":
            _TREE_CACHE[key] = dyadic_lebesgue(depth)
        elif kind == "nondoubling":
            _TREE_CACHE[key] = build_nondoubling_measure(depth)
        elif kind == "pk":
            _TREE_CACHE[key] = build_pk_filtration(shape, "uniform")
        else:
            raise ValueError(f"unknown tree kind {kind!r}")
    return _TREE_CACHE[key]


def random_terminal(tree: FiltrationTree, rng: np.random.Generator, *, heavy: bool = False) -> StepFunction:
    """I.i.d. leaf draws; the heavy variant mixes in t-distributed spikes."""
    v = rng.standard_normal(tree.n_leaves)
    if heavy:
        v = v + rng.standard_t(2, tree.n_leaves) * (rng.random(tree.n_leaves) < 0.2)
    return StepFunction(tree, v)


def random_martingale(tree: FiltrationTree, rng: np.random.Generator, *, heavy: bool = False) -> Martingale:
    return Martingale.from_terminal(random_terminal(tree, rng, heavy=heavy))


def random_terminal_batch(
    tree: FiltrationTree, rng: np.random.Generator, count: int, *, heavy: bool = False
) -> np.ndarray:
    v = rng.standard_normal((count, tree.n_leaves))
    if heavy:
        v = v + rng.standard_t(2, (count, tree.n_leaves)) * (rng.random((count, tree.n_leaves)) < 0.2)
    return v


def _difference_mix(tree: FiltrationTree, rng: np.random.Generator) -> np.ndarray:
    """Random bounded martingale-difference stack (the Haar-mix profile)."""
    out = np.zeros(tree.n_leaves)
    active = rng.random(tree.depth) < 0.8
    if not active.any():
        active[rng.integers(tree.depth)] = True
    for n in range(1, tree.depth + 1):
        if not active[n - 1]:
            continue
        raw = tree.expand(rng.uniform(-1.0, 1.0, tree.n_cells[n]), n)
        out += raw - tree.cond_exp(raw, n - 1)
    return out


def _log_spike(tree: FiltrationTree, rng: np.random.Generator) -> np.ndarray:
    """Indicator stack along one nested cell chain: sup grows linearly with
    depth while the oscillation per scale stays O(1)."""
    out = np.zeros(tree.n_leaves)
    j = 0
    for n in range(1, tree.depth + 1):
        p = tree.branching[n - 1]
        j = j * p + int(rng.integers(p))
        lo = j * tree.stride(n)
        hi = lo + tree.stride(n)
        out[lo:hi] += 1.0
    return out


def generate_bmo(
    tree: FiltrationTree,
    profile: str,
    seed: int | np.random.Generator,
    *,
    rescale: bool = True,
    max_level: int | None = None,
) -> StepFunction:
    """Random BMO test function; rescaled to unit BMO_2 norm by default.

    ``max_level`` coarsens the draw to an earlier sigma-algebra, which keeps
    the grouped sublinear-commutator evaluation cheap on deep trees.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if profile == "haar-mix":
        v = _difference_mix(tree, rng)
    elif profile == "log-spike":
        v = _log_spike(tree, rng)
    elif profile == "bounded-random":
        v = rng.uniform(-1.0, 1.0, tree.n_leaves)
    else:
        raise ValueError(f"unknown BMO profile {profile!r}")
    if max_level is not None and max_level < tree.depth:
        v = tree.cond_exp(v, max_level)
    sf = StepFunction(tree, v)
    if rescale:
        nb = bmo_norm(as_martingale(sf))
        if nb > 0:
            sf = StepFunction(tree, v / nb)
    return sf


MASS_FLOOR = 2.0**-36  # below this, sup-normalised atom bounds drown in roundoff


def atom_cell_ok(tree: FiltrationTree, n: int, j: int, mass_floor: float = MASS_FLOOR) -> bool:
    """Whether double precision can verify a sup-normalised atom on this cell.

    Two failure modes are excluded: cells so light that 1/mass-sized values
    make every conditional average ill-conditioned, and cells whose internal
    mass imbalance makes the mean-zero projection cancel catastrophically
    (the heavy leaf's true value sits below the eps-level projection noise,
    which the normalisation then amplifies by 1/sqrt(mass * min-leaf)).
    """
    cell_mass = float(tree.level_mass(n)[j])
    if cell_mass < mass_floor:
        return False
    lo, hi = tree.leaf_range(CellRef(n, j))
    leaves = tree.leaf_mass[lo:hi]
    positive = leaves[leaves > 0]
    if positive.size == 0:
        return False
    return float(positive.min()) >= cell_mass * mass_floor


def random_level_cell(
    tree: FiltrationTree,
    rng: np.random.Generator,
    *,
    max_level: int | None = None,
    mass_floor: float = MASS_FLOOR,
) -> tuple[int, int]:
    """Uniformly pick an internal level and a cell where atoms are verifiable."""
    top = tree.depth - 1 if max_level is None else min(max_level, tree.depth - 1)
    for _ in range(256):
        n = int(rng.integers(0, top + 1))
        j = int(rng.integers(0, tree.n_cells[n]))
        if atom_cell_ok(tree, n, j, mass_floor):
            return n, j
    raise ValueError("could not find a cell above the mass floor")


def random_atoms(
    tree: FiltrationTree,
    rng: np.random.Generator,
    count: int,
    kinds: tuple[str, ...] = ("simple-s-inf",),
    *,
    b: StepFunction | None = None,
    max_level: int | None = None,
) -> list[AtomCertificate]:
    out = []
    for i in range(count):
        n, j = random_level_cell(tree, rng, max_level=max_level)
        out.append(random_atom(tree, n, j, kinds[i % len(kinds)], rng, b=b))
    return out


def random_jumps(
    tree: FiltrationTree, rng: np.random.Generator, count: int
) -> list[AtomCertificate]:
    out = []
    for _ in range(count):
        n = int(rng.integers(0, tree.depth + 1))
        out.append(random_atom(tree, n, tuple(range(tree.n_cells[n])), "jump", rng))
    return out


def bmo_suite_functions(
    tree: FiltrationTree,
    profiles: tuple[str, ...],
    rng: np.random.Generator,
    count: int,
    *,
    max_level: int | None = None,
) -> list[StepFunction]:
    return [
        generate_bmo(tree, profiles[i % len(profiles)], rng, max_level=max_level)
        for i in range(count)
    ]
