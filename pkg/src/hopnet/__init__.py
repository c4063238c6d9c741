"""Discrete Hopfield networks: learning-rule catalog and recall benchmarks."""

from .core import (
    EvolutionOutcome,
    NetworkParams,
    StabilityReport,
    activate,
    as_pattern,
    as_pattern_batch,
    distort,
    energy,
    evolve,
    hamming_distance,
    net_input,
    overlap,
    stability_margins,
)
from .harness import (
    CurveResult,
    ExperimentConfig,
    GridResult,
    TrialRecord,
    curve_area,
    derive_trial_seed,
    desk_config,
    extract_curve,
    paper_scale_config,
    run_grid,
    run_trial,
    sample_patterns,
)
from .optim import DivergenceError, HessianInverse
from .rules import (
    RULE_KINDS,
    DegenerateInputError,
    RuleSpec,
    TrainReport,
    default_spec,
    init_params,
    normalize_rule_name,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "EvolutionOutcome",
    "NetworkParams",
    "StabilityReport",
    "activate",
    "as_pattern",
    "as_pattern_batch",
    "distort",
    "energy",
    "evolve",
    "hamming_distance",
    "net_input",
    "overlap",
    "stability_margins",
    "CurveResult",
    "ExperimentConfig",
    "GridResult",
    "TrialRecord",
    "curve_area",
    "derive_trial_seed",
    "desk_config",
    "extract_curve",
    "paper_scale_config",
    "run_grid",
    "run_trial",
    "sample_patterns",
    "DivergenceError",
    "HessianInverse",
    "RULE_KINDS",
    "DegenerateInputError",
    "RuleSpec",
    "TrainReport",
    "default_spec",
    "init_params",
    "normalize_rule_name",
    "train",
    "__version__",
]
