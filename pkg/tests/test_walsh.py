import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from martharm.martingale import StepFunction, lp_norm
from martharm.operators.walsh import (
    WalshContext,
    cesaro_maximal,
    cesaro_mean,
    convolve,
    dirichlet_kernel,
    fejer_kernel,
    fejer_spectrum,
    fwht,
    ifwht,
    walsh_partial_sum,
    walsh_values,
)

CTX = WalshContext(6)


def rand_f(seed):
    return StepFunction(CTX.tree, np.random.default_rng(seed).standard_normal(CTX.size))


def test_basic_walsh_functions():
    assert np.allclose(walsh_values(CTX, 0), 1.0)
    w1 = walsh_values(CTX, 1)
    assert np.allclose(w1[: CTX.size // 2], 1.0)
    assert np.allclose(w1[CTX.size // 2 :], -1.0)
    with pytest.raises(ValueError):
        walsh_values(CTX, CTX.size)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 63), st.integers(0, 63))
def test_character_property(j, k):
    assert np.array_equal(walsh_values(CTX, j) * walsh_values(CTX, k), walsh_values(CTX, j ^ k))


def test_fwht_against_dense_oracle():
    W = np.asarray([walsh_values(CTX, k) for k in range(CTX.size)])
    rng = np.random.default_rng(0)
    for _ in range(10):
        f = rng.standard_normal(CTX.size)
        assert np.abs(fwht(CTX, f) - W @ f / CTX.size).max() <= 1e-12
        assert np.abs(ifwht(CTX, fwht(CTX, f)) - f).max() <= 1e-12


def test_parseval():
    for seed in range(5):
        f = rand_f(seed)
        coeffs = fwht(CTX, f)
        assert (coeffs**2).sum() == pytest.approx(lp_norm(f, 2) ** 2, rel=1e-10)


def test_fwht_batched():
    rng = np.random.default_rng(1)
    batch = rng.standard_normal((5, CTX.size))
    together = fwht(CTX, batch)
    for i in range(5):
        assert np.array_equal(together[i], fwht(CTX, batch[i]))


def test_dirichlet_block_closed_form():
    for m in range(CTX.depth + 1):
        D = dirichlet_kernel(CTX, 1 << m).values
        expect = np.zeros(CTX.size)
        expect[: CTX.size >> m] = 1 << m
        assert np.abs(D - expect).max() <= 1e-12 * (1 << m)
    with pytest.raises(ValueError):
        dirichlet_kernel(CTX, 0)
    with pytest.raises(ValueError):
        dirichlet_kernel(CTX, CTX.size + 1)


def test_d1_and_k1_are_one():
    assert np.allclose(dirichlet_kernel(CTX, 1).values, 1.0)
    assert np.allclose(fejer_kernel(CTX, 1).values, 1.0)


def test_fejer_spectrum_formula():
    for n in (1, 3, 5, 17, CTX.size):
        K = fejer_kernel(CTX, n)
        k = np.arange(CTX.size)
        assert np.abs(fwht(CTX, K) - np.maximum(n - k, 0) / n).max() <= 1e-12
        assert np.array_equal(fejer_spectrum(CTX, n), np.maximum(n - k, 0) / n)


def test_partial_sums_are_conditionings():
    for seed in range(5):
        f = rand_f(seed)
        for m in range(CTX.depth + 1):
            sums = walsh_partial_sum(CTX, 1 << m, f).values
            cond = CTX.tree.cond_exp(f.values, m)
            assert np.abs(sums - cond).max() <= 1e-12 * (1 + np.abs(cond).max())
        # beyond the resolution the sum saturates at f
        assert np.allclose(walsh_partial_sum(CTX, 4 * CTX.size, f).values, f.values)


def test_cesaro_one_is_the_mean():
    f = rand_f(7)
    assert np.allclose(cesaro_mean(CTX, 1, f).values, f.integral())


def test_cesaro_spectral_equals_convolution():
    f = rand_f(8)
    xor = np.arange(CTX.size)[:, None] ^ np.arange(CTX.size)[None, :]
    for n in (1, 2, 5, 31, CTX.size):
        K = fejer_kernel(CTX, n).values
        direct = (K[xor] @ f.values) / CTX.size
        assert np.abs(direct - cesaro_mean(CTX, n, f).values).max() <= 1e-10
        assert np.abs(convolve(CTX, f, fejer_kernel(CTX, n)).values - direct).max() <= 1e-10


def test_cesaro_maximal_closed_form():
    for seed in range(4):
        f = rand_f(seed + 20)
        star = cesaro_maximal(CTX, f).values
        brute = np.abs(f.values).copy()
        for n in range(1, CTX.size + 1):
            brute = np.maximum(brute, np.abs(cesaro_mean(CTX, n, f).values))
        assert np.abs(star - brute).max() <= 1e-10
        for n in (CTX.size + 1, 3 * CTX.size, 50 * CTX.size):
            assert (np.abs(cesaro_mean(CTX, n, f).values) <= star + 1e-10).all()


def test_translation_is_permutation():
    f = rand_f(30)
    for t in (0, 1, 17, CTX.size - 1):
        shifted = CTX.translate(f.values, t)
        assert sorted(shifted) == sorted(f.values)
        assert CTX.tree.integrate(shifted) == pytest.approx(f.integral(), abs=1e-12)
    assert CTX.xor_leaves(5, 12) == 5 ^ 12


def test_walsh_coefficients_roundtrip_json():
    import json

    f = rand_f(31)
    coeffs = fwht(CTX, f)
    back = np.asarray(json.loads(json.dumps(coeffs.tolist())))
    assert np.array_equal(back, coeffs)
