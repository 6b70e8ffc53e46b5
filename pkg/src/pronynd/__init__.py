"""
Multivariate Prony reconstruction of exponential sums with polynomial
coefficients, together with the Hankel, Vandermonde and shift-invariance
machinery behind it.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .errors import PronyError
from .hankel import (
    DEFAULT_TOL,
    RankScan,
    StructuredMatrix,
    Tolerances,
    family_set,
    hankel_matrix,
    numeric_rank,
    rank_scan,
    toeplitz_matrix,
    toeplitz_mirror_rank,
)
from .indexsets import (
    IndexSet,
    box,
    compare_grlex,
    grlex_key,
    hyperbolic_cross,
    reflect,
    set_sum,
    simplex,
)
from .polynomial import Polynomial
from .pronysolve import (
    DEFAULT_SEED,
    KernelIdealData,
    Reconstruction,
    VarietyPoint,
    admissible_set,
    annihilator_check,
    commutation_residual,
    frequencies_from_points,
    joint_eigen,
    kernel_basis,
    multiplication_matrices,
    random_combination,
    reconstruct,
    recover_coefficients,
)
from .signalmodel import (
    ExponentialSumModel,
    LatticeSignal,
    convolve,
    correlate,
    evaluate_model,
    match_models,
    models_match,
    random_model,
    sample,
    shift_hull,
    sis_dimension,
)
from .structure import (
    FactorizationResult,
    D_to_shift_invariant,
    L_apply,
    L_inverse,
    canonical_basis,
    factorize,
    falling_factorial,
    hermite_vandermonde,
    is_D_invariant,
    is_shift_invariant,
    multiplicity_basis,
    shift_to_D_invariant,
    vandermonde,
)
