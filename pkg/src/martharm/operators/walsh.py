"""Walsh system on the uniform dyadic tree: transform, kernels, Cesaro means.

Leaf j of a depth-N tree is the interval [j 2^-N, (j+1) 2^-N); the binary
digits of a point are the bits of j from the most significant end, so the
k-th Rademacher function is r_k(j) = (-1)^(bit N-1-k of j) and dyadic
addition of two leaves is XOR of their indices.
"""

from __future__ import annotations

import numpy as np

from ..filtration import FiltrationTree, dyadic_lebesgue
from ..martingale import StepFunction


class WalshContext:
    """Uniform Lebesgue binary tree of depth N with index range 0 <= k < 2^N."""

    def __init__(self, depth: int):
        if depth < 1:
            raise ValueError("depth must be >= 1")
        self.depth = depth
        self.size = 1 << depth
        self.tree: FiltrationTree = dyadic_lebesgue(depth)
        idx = np.arange(self.size)
        rev = np.zeros(self.size, dtype=np.int64)
        for b in range(depth):
            rev |= ((idx >> b) & 1) << (depth - 1 - b)
        self.bit_reverse = rev
        # rademacher[k][j] = (-1)^(k-th binary digit of the point in leaf j)
        self.rademacher = np.array(
            [1.0 - 2.0 * ((idx >> (depth - 1 - k)) & 1) for k in range(depth)]
        )

    def check_index(self, n: int) -> int:
        n = int(n)
        if not 0 <= n < self.size:
            raise ValueError(f"Walsh index {n} outside 0..{self.size - 1}")
        return n

    def xor_leaves(self, i: int, j: int) -> int:
        """Index of the leaf containing x + y (dyadic addition) for x, y in leaves i, j."""
        return (i ^ j) & (self.size - 1)

    def translate(self, values: np.ndarray, t_leaf: int) -> np.ndarray:
        """Leaf values of x -> f(x + t), a permutation of the input (measure-preserving)."""
        idx = np.arange(self.size) ^ int(t_leaf)
        return np.asarray(values, dtype=float)[idx]


def walsh_values(ctx: WalshContext, n: int) -> np.ndarray:
    n = ctx.check_index(n)
    out = np.ones(ctx.size)
    for k in range(ctx.depth):
        if (n >> k) & 1:
            out = out * ctx.rademacher[k]
    return out


def walsh_function(ctx: WalshContext, n: int) -> StepFunction:
    """w_n = product of r_k over the set bits of n (Paley ordering)."""
    return StepFunction(ctx.tree, walsh_values(ctx, n))


def _hadamard(values: np.ndarray) -> np.ndarray:
    """In-natural-order fast Walsh-Hadamard butterfly along the last axis."""
    v = np.array(values, dtype=float, copy=True)
    n = v.shape[-1]
    h = 1
    while h < n:
        v = v.reshape(v.shape[:-1] + (n // (2 * h), 2, h))
        a = v[..., 0, :] + v[..., 1, :]
        b = v[..., 0, :] - v[..., 1, :]
        v = np.stack([a, b], axis=-2).reshape(v.shape[:-3] + (n,))
        h *= 2
    return v


def fwht(ctx: WalshContext, f: StepFunction | np.ndarray) -> np.ndarray:
    """Walsh-Fourier coefficients (integral of f * w_k) for k = 0..2^N-1.

    O(N 2^N) butterfly; the bit reversal aligns the butterfly's bit-k sign
    pattern with the point digits that r_k reads.  Batched over leading axes.
    """
    values = f.values if isinstance(f, StepFunction) else np.asarray(f, dtype=float)
    return _hadamard(values[..., ctx.bit_reverse]) / ctx.size


def ifwht(ctx: WalshContext, coeffs: np.ndarray) -> np.ndarray:
    """Leaf values of sum_k coeffs[k] w_k (exact inverse of fwht)."""
    return _hadamard(np.asarray(coeffs, dtype=float))[..., ctx.bit_reverse]


def ifwht_function(ctx: WalshContext, coeffs: np.ndarray) -> StepFunction:
    return StepFunction(ctx.tree, ifwht(ctx, coeffs))


def dirichlet_kernel(ctx: WalshContext, n: int) -> StepFunction:
    """D_n = sum_{k<n} w_k, for 1 <= n <= 2^N."""
    if not 1 <= n <= ctx.size:
        raise ValueError(f"Dirichlet index {n} outside 1..{ctx.size}")
    coeffs = np.zeros(ctx.size)
    coeffs[:n] = 1.0
    return ifwht_function(ctx, coeffs)


def fejer_kernel(ctx: WalshContext, n: int) -> StepFunction:
    """K_n = (1/n) sum_{j=1}^n D_j; its spectrum is (n-k)+ / n."""
    if not 1 <= n <= ctx.size:
        raise ValueError(f"Fejer index {n} outside 1..{ctx.size}")
    return ifwht_function(ctx, fejer_spectrum(ctx, n))


def fejer_spectrum(ctx: WalshContext, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(ctx.size)
    return np.maximum(n - k, 0) / n


def walsh_partial_sum(ctx: WalshContext, n: int, f: StepFunction) -> StepFunction:
    """S_n f = sum_{k<n} fhat(k) w_k; for n >= 2^N this is f itself."""
    if n < 1:
        raise ValueError("n must be >= 1")
    coeffs = fwht(ctx, f)
    cut = np.where(np.arange(ctx.size) < n, coeffs, 0.0)
    return ifwht_function(ctx, cut)


def cesaro_mean(ctx: WalshContext, n: int, f: StepFunction) -> StepFunction:
    """sigma_n f = sum_k (1 - k/n)+ fhat(k) w_k (the Fejer-kernel average)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    coeffs = fwht(ctx, f)
    k = np.arange(ctx.size)
    weights = np.maximum(1.0 - k / n, 0.0)
    return ifwht_function(ctx, coeffs * weights)


def cesaro_maximal_values(ctx: WalshContext, values: np.ndarray) -> np.ndarray:
    """sup over every n >= 1 of |sigma_n f|, batched over leading axes.

    For n <= 2^N the means are accumulated directly; beyond the resolution,
    sigma_n = f - (1/n) sum_k k fhat(k) w_k moves monotonically toward f at
    each leaf, so the tail sup is max(|sigma_{2^N}|, |f|).
    """
    values = np.asarray(values, dtype=float)
    coeffs = fwht(ctx, values)
    size = ctx.size
    partial = np.zeros_like(values)  # sum_{k<n} fhat(k) w_k
    weighted = np.zeros_like(values)  # sum_{k<n} k fhat(k) w_k
    best = np.zeros_like(values)
    w = np.ones(size)
    prev = 0
    for k in range(size):
        flips = prev ^ k  # gray-style update keeps the sweep at O(4^N) total
        b = 0
        while flips:
            if flips & 1:
                w = w * ctx.rademacher[b]
            flips >>= 1
            b += 1
        prev = k
        term = coeffs[..., k : k + 1] * w
        partial = partial + term
        weighted = weighted + k * term
        np.maximum(best, np.abs(partial - weighted / (k + 1)), out=best)
    np.maximum(best, np.abs(values), out=best)
    return best


def cesaro_maximal(ctx: WalshContext, f: StepFunction) -> StepFunction:
    return StepFunction(ctx.tree, cesaro_maximal_values(ctx, f.values))


def convolve(ctx: WalshContext, f: StepFunction, kernel: StepFunction) -> StepFunction:
    """Dyadic convolution int f(t) kernel(x + t) dt via the spectral product."""
    return ifwht_function(ctx, fwht(ctx, f) * fwht(ctx, kernel))
