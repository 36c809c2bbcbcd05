"""Finite-sample laboratory for complete Pick kernels and GKZ-type functionals."""
__version__ = "0.1.0"

from ._accel import backend
from .coeff import (
    CoeffFunction,
    CoeffFunctional,
    SpaceWeights,
    apply_functional,
    check_sequence_properties,
    gkz_weight,
    isometry_check_mz2,
    multiplicativity_defect,
    multiply,
    mz_unbounded_witness,
    space_norm,
)
from .gkz import Finding, gkz_dichotomy_search, hardy_cyclic, point_eval_witness
from .kernels import (
    HermitianMatrix,
    KernelSpec,
    PointSet,
    eval_kernel,
    gram,
    is_psd,
    kernel_matrix,
    min_eigenvalue,
)
from .pick import (
    CnpVerdict,
    FeatureMap,
    base_point_invariance,
    cnp_defect,
    complete_pick_verdict,
    feature_map,
    geometric_reconstruction,
    multiplier_norm_lower_bound,
    normalize,
    pick_feasible,
)
