import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from martharm.filtration import (
    CellRef,
    FiltrationTree,
    build_nondoubling_measure,
    build_pk_filtration,
    conditional_expectation,
    dyadic_lebesgue,
    load_tree,
    m_decreasing_constant,
    m_increasing_constant,
    regularity_constant,
    save_tree,
    tree_from_json,
    tree_to_json,
)
from martharm.martingale import StepFunction


def test_pk_uniform_masses():
    tree = build_pk_filtration((2, 2), "uniform")
    assert tree.n_leaves == 4
    assert np.allclose(tree.leaf_mass, 0.25)
    tree = build_pk_filtration((2, 3), "uniform")
    assert tree.n_cells[2] == 6
    assert np.allclose(tree.level_mass(2), 1 / 6)


def test_pk_validation_errors():
    with pytest.raises(ValueError):
        build_pk_filtration(())
    with pytest.raises(ValueError):
        build_pk_filtration((1, 2))
    with pytest.raises(ValueError):
        build_pk_filtration((2, 2), [0.5, 0.5, 0.5, -0.5])
    with pytest.raises(ValueError):
        build_pk_filtration((2, 2), [0.5, 0.5, 0.2, 0.2])
    with pytest.raises(ValueError):
        build_pk_filtration((2,) * 20)


def test_cell_geometry():
    tree = build_pk_filtration((2, 3), "uniform")
    cell = CellRef(1, 1)
    a, b = tree.cell_interval(cell)
    assert (a.numerator, a.denominator) == (1, 2)
    assert (b.numerator, b.denominator) == (1, 1)
    assert tree.parent(CellRef(2, 4)) == CellRef(1, 1)
    assert tree.children(CellRef(1, 0)) == [CellRef(2, 0), CellRef(2, 1), CellRef(2, 2)]
    assert tree.leaf_range(CellRef(1, 1)) == (3, 6)
    with pytest.raises(ValueError):
        tree.validate_cell(CellRef(3, 0))
    with pytest.raises(ValueError):
        tree.parent(CellRef(0, 0))


def test_nondoubling_masses():
    tree = build_nondoubling_measure(1)
    assert np.allclose(tree.leaf_mass, [0.5, 0.5])
    tree = build_nondoubling_measure(2)
    assert tree.leaf_mass[0] == pytest.approx(15 / 32, abs=1e-15)
    assert tree.cell_mass_exact(CellRef(2, 0)) == 15 * 2**-5
    # brother of I_1 carries half the mass, Lebesgue-spread
    assert tree.leaf_mass[2] == pytest.approx(0.25, abs=1e-15)
    assert tree.leaf_mass[3] == pytest.approx(0.25, abs=1e-15)


def test_mass_conservation():
    tree = build_nondoubling_measure(8)
    for n in range(tree.depth):
        parent = tree.level_mass(n)
        child = tree.cell_sums(tree.leaf_mass, n + 1).reshape(-1, 2).sum(axis=1)
        assert np.abs(parent - child).max() <= 1e-12 * (1 + parent.max())


def test_conditional_expectation_basics():
    tree = dyadic_lebesgue(2)
    f = StepFunction(tree, np.array([1.0, 0.0, 0.0, 0.0]))
    e1 = conditional_expectation(tree, f, 1)
    assert np.allclose(e1.values, [0.5, 0.5, 0.0, 0.0])
    const = StepFunction(tree, np.full(4, 3.25))
    for n in range(3):
        assert np.allclose(conditional_expectation(tree, const, n).values, 3.25)
    with pytest.raises(ValueError):
        tree.cond_exp(f.values, 5)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 10_000))
def test_tower_property(m, n, seed):
    tree = build_pk_filtration((2, 3, 2), "uniform")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(tree.n_leaves)
    lhs = tree.cond_exp(tree.cond_exp(v, n), m)
    rhs = tree.cond_exp(v, min(m, n))
    assert np.abs(lhs - rhs).max() <= 1e-12 * (1 + np.abs(v).max())


def test_cond_exp_contraction_and_positivity():
    tree = build_nondoubling_measure(6)
    rng = np.random.default_rng(7)
    v = np.abs(rng.standard_normal(tree.n_leaves))
    for n in range(tree.depth + 1):
        en = tree.cond_exp(v, n)
        assert en.min() >= 0
        assert tree.integrate(np.abs(en)) <= tree.integrate(np.abs(v)) + 1e-12


def test_regularity_constants():
    assert regularity_constant(dyadic_lebesgue(5)) == pytest.approx(2.0)
    assert regularity_constant(build_pk_filtration((2, 3, 4))) == pytest.approx(4.0)
    assert regularity_constant(build_nondoubling_measure(3)) == pytest.approx(512.0, rel=1e-12)
    zero_mass = FiltrationTree((2,), [1.0, 0.0])
    with pytest.raises(ValueError):
        regularity_constant(zero_mass)


def test_regularity_matches_brute_force():
    tree = build_pk_filtration((3, 2, 4), "uniform")
    brute = 0.0
    for n in range(1, tree.depth + 1):
        for j in range(tree.n_cells[n]):
            parent = tree.cell_mass(tree.parent(CellRef(n, j)))
            brute = max(brute, parent / tree.cell_mass(CellRef(n, j)))
    assert regularity_constant(tree) == pytest.approx(brute)
    assert brute == pytest.approx(max(tree.branching))


def test_m_constants():
    tree = dyadic_lebesgue(6)
    assert m_increasing_constant(tree) == pytest.approx(0.5)
    assert m_decreasing_constant(tree) == pytest.approx(2.0)
    nd = build_nondoubling_measure(10)
    c = m_increasing_constant(nd)
    assert np.isfinite(c)
    # exhaustive scan agrees by construction; check the algebraic bound
    for n in range(nd.depth):
        left = nd.level_mass(n + 1)[0::2]
        right = nd.level_mass(n + 1)[1::2]
        m = left * right / nd.level_mass(n)
        assert (m <= np.minimum(left, right) + 1e-15).all()
    with pytest.raises(ValueError):
        m_increasing_constant(build_pk_filtration((2, 3)))


def test_tree_serialization_roundtrip(tmp_path):
    for tree in (build_pk_filtration((2, 3), "uniform"), build_nondoubling_measure(4)):
        doc = tree_to_json(tree)
        back = tree_from_json(doc)
        assert back.branching == tree.branching
        assert np.array_equal(back.leaf_mass, tree.leaf_mass)
        assert doc["endpoints"][0] == [0, 1]
        path = tmp_path / "tree.json"
        save_tree(tree, path)
        assert np.array_equal(load_tree(path).leaf_mass, tree.leaf_mass)


def test_tree_json_nondoubling_tag():
    doc = {"branching": [2, 2], "measure": "nondoubling", "depth": 2}
    tree = tree_from_json(doc)
    assert tree.leaf_mass[0] == pytest.approx(15 / 32)
    with pytest.raises(ValueError):
        tree_from_json({"branching": [2], "measure": "bogus", "depth": 1})


def test_tree_json_endpoint_mismatch():
    doc = tree_to_json(dyadic_lebesgue(2))
    doc["endpoints"][1] = [1, 3]
    with pytest.raises(ValueError):
        tree_from_json(doc)
