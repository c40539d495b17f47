import math

import numpy as np
import pytest

from martharm.decomp import random_atom
from martharm.filtration import FiltrationTree, build_nondoubling_measure, build_pk_filtration, dyadic_lebesgue
from martharm.martingale import StepFunction, as_martingale, h1_norm, lp_norm
from martharm.operators.haar import (
    HaarSystem,
    dyadic_hilbert,
    dyadic_hilbert_adjoint,
    dyadic_hilbert_adjoint_values,
    dyadic_hilbert_values,
    hilbert_on_jump,
    operator_l2_norm,
)


@pytest.fixture(scope="module", params=["dyadic", "nondoubling"])
def system(request):
    tree = dyadic_lebesgue(6) if request.param == "dyadic" else build_nondoubling_measure(6)
    return HaarSystem(tree)


def test_haar_requires_binary_positive():
    with pytest.raises(ValueError):
        HaarSystem(build_pk_filtration((2, 3)))
    with pytest.raises(ValueError):
        HaarSystem(FiltrationTree((2,), [1.0, 0.0]))


def test_haar_orthonormal_and_mean_zero(system):
    tree = system.tree
    rows = []
    for n in range(tree.depth):
        for j in range(tree.n_cells[n]):
            h = system.haar_values(n, j)
            rows.append(h)
            assert np.abs(tree.cond_exp(h, n)).max() <= 1e-12 * (1 + np.abs(h).max())
            assert tree.integrate(np.abs(h)) == pytest.approx(2 * math.sqrt(system.m_value(n, j)), rel=1e-12)
    H = np.asarray(rows)
    gram = (H * tree.leaf_mass) @ H.T
    assert np.abs(gram - np.eye(len(rows))).max() <= 1e-12


def test_hilbert_kills_constants(system):
    ones = np.ones(system.tree.n_leaves)
    assert np.abs(dyadic_hilbert_values(system, ones)).max() == 0.0


def test_hilbert_single_term_expansion():
    tree = dyadic_lebesgue(4)
    sys = HaarSystem(tree)
    out = dyadic_hilbert(sys, StepFunction(tree, sys.haar_values(0, 0)))
    expect = sys.haar_values(1, 0) - sys.haar_values(1, 1)
    assert np.abs(out.values - expect).max() <= 1e-13


def test_hilbert_adjointness(system):
    tree = system.tree
    rng = np.random.default_rng(0)
    for _ in range(30):
        u = rng.standard_normal(tree.n_leaves)
        v = rng.standard_normal(tree.n_leaves)
        a = tree.integrate(dyadic_hilbert_values(system, u) * v)
        b = tree.integrate(u * dyadic_hilbert_adjoint_values(system, v))
        assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


def test_hilbert_operator_norm(system):
    est = operator_l2_norm(system, dyadic_hilbert_values, dyadic_hilbert_adjoint_values)
    assert est <= 2.0 + 1e-9
    assert est == pytest.approx(math.sqrt(2.0), abs=1e-6)


def test_hilbert_atom_support_containment(system):
    tree = system.tree
    rng = np.random.default_rng(1)
    for _ in range(20):
        n = int(rng.integers(0, tree.depth - 1))
        j = int(rng.integers(0, tree.n_cells[n]))
        atom = random_atom(tree, n, j, "simple-s-inf", rng)
        out = dyadic_hilbert(sys=system, f=atom.step_function(tree))
        mask = atom.support_leaf_mask(tree)
        scale = np.abs(out.values).max()
        assert np.abs(out.values[~mask]).max(initial=0.0) <= 1e-12 * (1 + scale)
        p_q = atom.support_mass(tree)
        for p in (1.0, 2.0):
            assert lp_norm(out, p) <= 2.0 * p_q ** (1 / p - 1) * (1 + 1e-9)


def test_hilbert_jump_single_level(system):
    tree = system.tree
    rng = np.random.default_rng(2)
    for _ in range(50):
        n = int(rng.integers(0, tree.depth + 1))
        w = random_atom(tree, n, tuple(range(tree.n_cells[n])), "jump", rng)
        full = dyadic_hilbert(system, w.step_function(tree)).values
        single = hilbert_on_jump(system, w).values
        unit = max(np.abs(w.values).max(), 1e-300)
        assert np.abs(full - single).max() / unit <= 1e-12 * (1 + np.abs(full).max() / unit)
    with pytest.raises(ValueError):
        hilbert_on_jump(system, random_atom(tree, 1, 0, "simple-inf", rng))


def test_hilbert_commutes_with_earlier_functions(system):
    tree = system.tree
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(1, tree.depth + 1))
        w = random_atom(tree, n, tuple(range(tree.n_cells[n])), "jump", rng)
        unit = w.values / max(np.abs(w.values).max(), 1e-300)
        g = tree.cond_exp(rng.standard_normal(tree.n_leaves), n - 1)
        lhs = dyadic_hilbert_values(system, g * unit)
        rhs = g * dyadic_hilbert_values(system, unit)
        assert np.abs(lhs - rhs).max() <= 1e-12 * (1 + np.abs(rhs).max())


def test_hilbert_h1_to_l1_ratio_finite():
    tree = build_nondoubling_measure(8)
    sys = HaarSystem(tree)
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(50):
        f = StepFunction(tree, rng.standard_normal(tree.n_leaves))
        h1 = h1_norm(as_martingale(f))
        if h1 > 0:
            worst = max(worst, tree.integrate(np.abs(dyadic_hilbert_values(sys, f.values))) / h1)
    assert np.isfinite(worst)


def test_adjoint_swaps_back():
    tree = build_nondoubling_measure(5)
    sys = HaarSystem(tree)
    # H* maps h_I back to delta(I) h_parent: check on one child pair
    h = sys.haar_values(1, 0)
    out = dyadic_hilbert_adjoint(sys, StepFunction(tree, h)).values
    assert np.abs(out - sys.haar_values(0, 0)).max() <= 1e-12
