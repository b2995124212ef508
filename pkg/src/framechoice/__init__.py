"""Revealed-preference analysis of choice data under framing.

Frames highlight a subset of the alternatives (displays, endorsements,
labels) without restricting what can be chosen.  This package tests whether
deterministic or aggregate stochastic choice data is consistent with utility
maximization in which framing only boosts an alternative's value, recovers
the underlying mixture of decision types when it is, and fits and identifies
the parametric (Luce-style) special case.
"""

from .core import (
    DataError,
    DeterministicChoiceData,
    FLOAT64,
    NumericPolicy,
    RATIONAL,
    StochasticChoiceData,
    Universe,
    ValidationReport,
    members,
    parse_deterministic,
    parse_stochastic,
    validate,
)
from .detfum import (
    AxiomReport,
    ChoiceType,
    FUMRepresentation,
    IIFAViolationError,
    build_fum_representation,
    check_iifa,
    check_rep_equivalence,
    enumerate_types,
    evaluate_fum,
    evaluate_type,
    representation_for_type,
    type_count,
)
from .fluce import (
    FLuceParams,
    FLuceReport,
    FLuceTestResult,
    FitRejectionError,
    check_axioms,
    check_scaling,
    embed_check,
    fit_fluce,
    forward_fluce,
    preset,
    test_fluce,
    v_from_anchor,
)
from .frum import (
    BMViolation,
    FeasibilityResult,
    FrumRejectionError,
    FrumVerdict,
    TypeDistribution,
    branch_weight,
    check_prop2,
    feasible_completion,
    forward_frum,
    interim_violations,
    recover_branch_independent,
    recover_constructive,
    test_frum,
)
from .plotdata import SimplexPlotData, plot_simplex, projected_points, region_contains
from .polys import (
    BMTable,
    HasseGraph,
    compute_bm,
    export_hasse,
    flow_residuals,
    interim_q,
    interim_y,
    naive_bm,
)
from .sim import SimConfig, default_universe, oracle_forward, perturb, sample_fluce, sample_mu

__version__ = "0.1.0"

__all__ = [
    "AxiomReport",
    "BMTable",
    "BMViolation",
    "ChoiceType",
    "DataError",
    "DeterministicChoiceData",
    "FLOAT64",
    "FLuceParams",
    "FLuceReport",
    "FLuceTestResult",
    "FUMRepresentation",
    "FeasibilityResult",
    "FitRejectionError",
    "FrumRejectionError",
    "FrumVerdict",
    "HasseGraph",
    "IIFAViolationError",
    "NumericPolicy",
    "RATIONAL",
    "SimConfig",
    "SimplexPlotData",
    "StochasticChoiceData",
    "TypeDistribution",
    "Universe",
    "ValidationReport",
    "branch_weight",
    "build_fum_representation",
    "check_axioms",
    "check_iifa",
    "check_prop2",
    "check_rep_equivalence",
    "check_scaling",
    "compute_bm",
    "default_universe",
    "embed_check",
    "enumerate_types",
    "evaluate_fum",
    "evaluate_type",
    "export_hasse",
    "feasible_completion",
    "fit_fluce",
    "flow_residuals",
    "forward_fluce",
    "forward_frum",
    "interim_q",
    "interim_violations",
    "interim_y",
    "members",
    "naive_bm",
    "oracle_forward",
    "parse_deterministic",
    "parse_stochastic",
    "perturb",
    "plot_simplex",
    "preset",
    "projected_points",
    "recover_branch_independent",
    "recover_constructive",
    "region_contains",
    "representation_for_type",
    "sample_fluce",
    "sample_mu",
    "test_fluce",
    "test_frum",
    "type_count",
    "v_from_anchor",
    "validate",
]
