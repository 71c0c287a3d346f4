"""Outlier-robust matching between two noisy point clouds.

The library recovers the pairing between two sets of d-dimensional feature
vectors when an unknown number of points on both sides has no counterpart.
For any size k the best matching is the one minimizing the sum of squared
distances over all injective size-k maps; it is computed exactly by an
incremental minimum-cost-flow solve that yields the whole optimal-cost curve
in one run.  Two calibrated rules then pick the matching size from the
curve's increments, with or without knowledge of the noise level.
"""

from .core import (
    CostMatrix,
    FeatureSet,
    GroundTruth,
    PartialMatching,
    squared_distance_matrix,
    validate_matching,
)
from .errors import (
    CostOverflowError,
    CsvParseError,
    DimensionMismatchError,
    DuplicateLeftIndexError,
    DuplicateRightIndexError,
    EmptyInputError,
    IndexRangeError,
    LssMatchError,
    MatchingValidationError,
    NonFiniteDataError,
    NonNumericCellError,
    ParameterError,
    RaggedRowError,
    SolverInvariantError,
)
from .flow import FlowNetwork, LssCurve, build_network, default_scale, solve_incremental
from .matching import brute_force_lss, greedy_match, lss_curve, lss_match
from .selection import (
    SelectionOutcome,
    StepDiagnostic,
    noise_estimate,
    select_k_known_noise,
    select_k_unknown_noise,
    separation_rate,
)
from .synth import (
    ExperimentTable,
    SynthConfig,
    TableRow,
    generate_instance,
    kappa_bar_all,
    precision,
    run_precision_sweep,
    run_selection_sweep,
    subset_recovery_ok,
)

__all__ = [
    "CostMatrix",
    "FeatureSet",
    "GroundTruth",
    "PartialMatching",
    "squared_distance_matrix",
    "validate_matching",
    "FlowNetwork",
    "LssCurve",
    "build_network",
    "default_scale",
    "solve_incremental",
    "brute_force_lss",
    "greedy_match",
    "lss_curve",
    "lss_match",
    "SelectionOutcome",
    "StepDiagnostic",
    "noise_estimate",
    "select_k_known_noise",
    "select_k_unknown_noise",
    "separation_rate",
    "ExperimentTable",
    "SynthConfig",
    "TableRow",
    "generate_instance",
    "kappa_bar_all",
    "precision",
    "run_precision_sweep",
    "run_selection_sweep",
    "subset_recovery_ok",
    "LssMatchError",
    "ParameterError",
    "DimensionMismatchError",
    "NonFiniteDataError",
    "MatchingValidationError",
    "DuplicateLeftIndexError",
    "DuplicateRightIndexError",
    "IndexRangeError",
    "CostOverflowError",
    "SolverInvariantError",
    "CsvParseError",
    "RaggedRowError",
    "NonNumericCellError",
    "EmptyInputError",
]

__version__ = "0.1.0"
