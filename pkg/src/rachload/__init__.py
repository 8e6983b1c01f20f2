"""Load estimation for two-priority random-access channels.

Models a slotted random-access channel where high- and low-priority UEs pick
resource blocks independently, computes exact probabilities of the patterns
a base station observes, and estimates the hidden per-class UE counts by
maximum likelihood (full or reduced-complexity) from one or more slots.
Includes a brute-force verification oracle, a reproducible simulator and a
Monte Carlo experiment harness.
"""

from .engine import (
    CollisionComposition,
    RenormalizationState,
    collision_compositions,
    collision_factor,
    empty_factor,
    enumerate_collision_totals,
    enumerate_high_splits,
    high_factor,
    initial_state,
    low_factor,
    pattern_probability,
    reduced_pattern_probability,
    renormalize_after_removal,
    sequence_log_likelihood,
)
from .estimators import (
    HypothesisGrid,
    LikelihoodSurface,
    NoFeasibleHypothesisError,
    likelihood_surface,
    ml_estimate,
    rcml_estimate,
)
from .harness import (
    ExperimentConfig,
    ExperimentRecord,
    ExperimentResult,
    compute_mae,
    preset_config,
    preset_profile,
    read_records_csv,
    run_experiment,
    write_mae_csv,
    write_records_csv,
)
from .logprob import LogProb
from .model import (
    AccessPattern,
    LoadHypothesis,
    ObservationSet,
    PatternFormatError,
    PatternIndexSets,
    RbEvent,
    SelectionProfile,
    classify_occupancy,
    derive_index_sets,
    feasibility_check,
    format_pattern,
    parse_pattern,
)
from .oracle import (
    EnumerationBudgetError,
    PatternDistribution,
    enumerated_pattern_probability,
    exhaustive_pattern_distribution,
)
from .simulate import SimulationSeed, sample_observations, sample_pattern
from .surface import collision_factor_grid, pattern_log_likelihood_grid

__version__ = "0.1.0"

__all__ = [
    "AccessPattern",
    "CollisionComposition",
    "EnumerationBudgetError",
    "ExperimentConfig",
    "ExperimentRecord",
    "ExperimentResult",
    "HypothesisGrid",
    "LikelihoodSurface",
    "LoadHypothesis",
    "LogProb",
    "NoFeasibleHypothesisError",
    "ObservationSet",
    "PatternDistribution",
    "PatternFormatError",
    "PatternIndexSets",
    "RbEvent",
    "RenormalizationState",
    "SelectionProfile",
    "SimulationSeed",
    "classify_occupancy",
    "collision_compositions",
    "collision_factor",
    "collision_factor_grid",
    "compute_mae",
    "derive_index_sets",
    "empty_factor",
    "enumerate_collision_totals",
    "enumerate_high_splits",
    "enumerated_pattern_probability",
    "exhaustive_pattern_distribution",
    "feasibility_check",
    "format_pattern",
    "high_factor",
    "initial_state",
    "likelihood_surface",
    "low_factor",
    "ml_estimate",
    "parse_pattern",
    "pattern_log_likelihood_grid",
    "pattern_probability",
    "preset_config",
    "preset_profile",
    "rcml_estimate",
    "read_records_csv",
    "reduced_pattern_probability",
    "renormalize_after_removal",
    "run_experiment",
    "sample_observations",
    "sample_pattern",
    "sequence_log_likelihood",
    "write_mae_csv",
    "write_records_csv",
]
