"""Martingale harmonic analysis on finite atom-generated filtrations.

Core objects: FiltrationTree (measure + sigma-algebras), StepFunction and
Martingale, the product decomposition into two paraproducts and a bounded-
variation diagonal, Hardy/BMO-type norms, concrete operators (transforms,
fractional integrals, the dyadic Hilbert transform, Walsh-Cesaro means),
commutators with their endpoint machinery, and a verification harness.
"""

from .commutator import (
    KqCertificate,
    SublinearOp,
    build_operator,
    commutator_apply,
    endpoint_report,
    h1b_norm,
    kq_certify,
    operator_U,
)
from .decomp import (
    AtomCertificate,
    BVProcess,
    ProductDecomposition,
    atomic_decompose,
    davis_decompose,
    product_decompose,
    random_atom,
    reconstruct,
    verify_atom,
)
from .filtration import (
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
)
from .martingale import (
    Martingale,
    StepFunction,
    as_martingale,
    bmo_diff_norm,
    bmo_log_norm,
    bmo_norm,
    bmo_small_norm,
    cond_square_function,
    doob_maximal,
    explog_norm,
    h1_cond_norm,
    h1_diff_norm,
    h1_norm,
    hlog_cond_norm,
    hlog_max_norm,
    hlog_norm,
    llog_norm,
    lp_norm,
    norm,
    osc_norm,
    square_function,
    weak_lq_norm,
)

__version__ = "0.1.0"
