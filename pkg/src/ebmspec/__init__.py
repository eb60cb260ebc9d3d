"""ebmspec: clustered eigenvalue structure of extended Burgers relaxation.

Forward path: per-mode characteristic polynomials, their N interlaced real
roots plus the extra root pair, the k -> infinity limit spectrum, and
convergence/identity diagnostics with an explicit mode-threshold
certificate.  Inverse path: recovery of the relaxation parameters
(r_i, b_i, D) from two observed root clusters.
"""

from . import errors
from .analysis import (
    BoundCheck,
    BoundReport,
    ConvergenceReport,
    K0Certificate,
    PairRow,
    RealRootRow,
    coefficient_identity_gap,
    convergence_table,
    explicit_k0,
    first_complex_k,
    rep_d_value,
    trace_gap,
    verify_bounds,
)
from .charpoly import (
    ModeIndex,
    PolynomialCoeffs,
    as_mode,
    eval_char_poly,
    eval_derivative,
    eval_limit_poly,
    eval_secular,
    expand_coefficients,
)
from .inverse import (
    ClusterObservation,
    PerturbationStudy,
    RecoveredModel,
    TrialResult,
    perturbation_study,
    poly_from_roots,
    recover_model,
)
from .model import (
    PronyModel,
    Regime,
    RegimeLabel,
    StretchedExponential,
    classify_regime,
    equal_contribution_weights,
    fit_prony,
    fit_residual,
    load_model,
    model_from_document,
    model_to_document,
    relaxation_value,
    save_model,
)
from .presets import get_preset, preset_names
from .roots import (
    ComplexPair,
    LimitSpectrum,
    RealPair,
    SpectralCluster,
    cluster_roots,
    compute_clusters,
    eigen_residual,
    eigen_residuals,
    eigen_vector,
    limit_roots,
    matching_distance,
    oracle_roots,
    reduced_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "BoundCheck",
    "BoundReport",
    "ClusterObservation",
    "ComplexPair",
    "ConvergenceReport",
    "K0Certificate",
    "LimitSpectrum",
    "ModeIndex",
    "PairRow",
    "PerturbationStudy",
    "PolynomialCoeffs",
    "PronyModel",
    "RealPair",
    "RealRootRow",
    "RecoveredModel",
    "Regime",
    "RegimeLabel",
    "SpectralCluster",
    "StretchedExponential",
    "TrialResult",
    "as_mode",
    "classify_regime",
    "cluster_roots",
    "coefficient_identity_gap",
    "compute_clusters",
    "convergence_table",
    "eigen_residual",
    "eigen_residuals",
    "eigen_vector",
    "equal_contribution_weights",
    "errors",
    "eval_char_poly",
    "eval_derivative",
    "eval_limit_poly",
    "eval_secular",
    "expand_coefficients",
    "explicit_k0",
    "first_complex_k",
    "fit_prony",
    "fit_residual",
    "get_preset",
    "limit_roots",
    "load_model",
    "matching_distance",
    "model_from_document",
    "model_to_document",
    "oracle_roots",
    "perturbation_study",
    "poly_from_roots",
    "preset_names",
    "recover_model",
    "reduced_matrix",
    "relaxation_value",
    "rep_d_value",
    "save_model",
    "trace_gap",
    "verify_bounds",
    "__version__",
]
