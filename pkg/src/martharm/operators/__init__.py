"""Concrete operators: transforms, fractional integrals, Haar shift, Walsh analysis."""

from .haar import (
    HaarSystem,
    dyadic_hilbert,
    dyadic_hilbert_adjoint,
    hilbert_on_jump,
    operator_l2_norm,
)
from .transforms import (
    TransformSymbol,
    fractional_integral,
    level_mass_function,
    martingale_transform,
    maximal_transform,
)
from .walsh import (
    WalshContext,
    cesaro_maximal,
    cesaro_mean,
    convolve,
    dirichlet_kernel,
    fejer_kernel,
    fejer_spectrum,
    fwht,
    ifwht,
    ifwht_function,
    walsh_function,
    walsh_partial_sum,
)

__all__ = [
    "HaarSystem",
    "TransformSymbol",
    "WalshContext",
    "cesaro_maximal",
    "cesaro_mean",
    "convolve",
    "dirichlet_kernel",
    "dyadic_hilbert",
    "dyadic_hilbert_adjoint",
    "fejer_kernel",
    "fejer_spectrum",
    "fractional_integral",
    "fwht",
    "hilbert_on_jump",
    "ifwht",
    "ifwht_function",
    "level_mass_function",
    "martingale_transform",
    "maximal_transform",
    "operator_l2_norm",
    "walsh_function",
    "walsh_partial_sum",
]
