"""Empirical two-sided norm comparisons on regular trees."""

import numpy as np

from martharm.commutator import build_operator, operator_U
from martharm.decomp import random_atom
from martharm.filtration import dyadic_lebesgue
from martharm.harness.corpus import generate_bmo, random_martingale
from martharm.martingale import (
    Martingale,
    StepFunction,
    as_martingale,
    bmo_norm,
    doob_maximal,
    h1_cond_norm,
    h1_norm,
    lp_norm,
    weak_lq_norm,
)
from martharm.operators.walsh import WalshContext, cesaro_maximal

TREE = dyadic_lebesgue(7)


def test_doob_vs_square_two_sided():
    # the maximal and square-function H1 norms stay mutually bounded
    rng = np.random.default_rng(0)
    ratios = []
    for _ in range(200):
        f = random_martingale(TREE, rng, heavy=True)
        h1 = h1_norm(f)
        if h1 > 0:
            ratios.append(lp_norm(doob_maximal(f), 1) / h1)
    ratios = np.asarray(ratios)
    assert 0.05 < ratios.min() and ratios.max() < 20.0


def test_h1_vs_h1_cond_two_sided_on_regular_tree():
    rng = np.random.default_rng(1)
    ratios = []
    for _ in range(200):
        f = random_martingale(TREE, rng)
        centred = Martingale(TREE, f.levels - f.levels[0])
        h1 = h1_norm(centred)
        if h1 > 0:
            ratios.append(h1_cond_norm(centred) / h1)
    ratios = np.asarray(ratios)
    # pointwise s <= sqrt(C_reg) S fails, but the norms stay comparable
    assert 0.1 < ratios.min() and ratios.max() < 10.0


def test_cesaro_weak_and_strong_ratios():
    ctx = WalshContext(7)
    rng = np.random.default_rng(2)
    weak, lower, upper = [], [], []
    for _ in range(100):
        sf = StepFunction(ctx.tree, rng.standard_normal(ctx.size))
        sigma = cesaro_maximal(ctx, sf)
        l1 = lp_norm(sf, 1)
        h1 = h1_norm(as_martingale(sf))
        if l1 > 0:
            weak.append(weak_lq_norm(sigma, 1) / l1)
        if h1 > 0:
            s1 = lp_norm(sigma, 1)
            lower.append(s1 / h1)
            upper.append(h1 / s1)
    assert np.isfinite(weak).all() and max(weak) < 50
    assert max(lower) < 20 and max(upper) < 20


def test_u_operator_atom_bound():
    rng = np.random.default_rng(3)
    for T in (build_operator("M", TREE), build_operator("S", TREE), build_operator("Teps", TREE, seed=1)):
        worst = 0.0
        for _ in range(50):
            n = int(rng.integers(0, TREE.depth - 1))
            j = int(rng.integers(0, TREE.n_cells[n]))
            atom = random_atom(TREE, n, j, "simple-s-inf", rng)
            b = generate_bmo(TREE, "haar-mix", rng)
            u = operator_U(T, atom.step_function(TREE), b)
            worst = max(worst, lp_norm(u, T.q) / bmo_norm(as_martingale(b)))
        assert np.isfinite(worst) and worst < 100
