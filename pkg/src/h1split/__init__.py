"""Splitting Z^1 into coboundaries and a mu-harmonic complement.

Pipeline: a finitely generated group acting on a finite-dimensional lp
space, a finitely supported measure, the associated Markov operator with a
certified norm bracket, and (under a spectral gap) the projection onto
coboundaries built from Banach fixed points, whose kernel realizes reduced
degree-1 cohomology.
"""

__version__ = "0.1.0"

from .cocycles import (
    BasisError,
    Cocycle,
    Z1Basis,
    d_pi,
    from_params,
    gamma_act,
    membership_residual,
    z1_basis,
    zero_cocycle,
)
from .decomp import (
    Certificate,
    ContractionError,
    DecompositionReport,
    EquivarianceResult,
    FixedPointResult,
    HypothesisViolatedError,
    PNormEstimate,
    coboundary_basis,
    complement_basis,
    continuity_bound,
    convolution_power_trajectory,
    decompose,
    equivariance_defect,
    fixed_point_b,
    l_apply,
    lemma_residuals,
    p_matrix,
    p_norm_estimate,
    project_p,
    snorm_bound_factor,
)
from .exact import ExactDims, exact_dims
from .groups import (
    FreeGroup,
    GroupMismatchError,
    PermGroup,
    enumerate_elements,
    reduce_word,
)
from .measures import (
    AdmissiblePair,
    FinMeasure,
    check_admissible,
    conjugate,
    convolve,
    delta,
    lazy_pair,
    lazy_uniform,
    power,
)
from .repspace import (
    KappaEstimate,
    MarkovOp,
    NormBracket,
    NormedSpace,
    Representation,
    kappa_estimate,
    markov,
    op_norm,
)
from .scenario import Scenario, ScenarioError, load_scenario, parse_scenario
