"""Tail-greedy unbalanced Haar segmentation for copy-number-ratio data."""

__version__ = "0.1.0"

from .errors import ContractError, InputError
from .evaluation import (
    EvalReport,
    MatchResult,
    RocResult,
    match_change_points,
    mse,
    roc_curve,
    run_scenario,
    short_segment_tpr,
)
from .reconstruction import (
    Segmentation,
    extract_change_points,
    fit_segments,
    segment,
    segment_tree,
)
from .simulate import (
    NoiseModel,
    PiecewiseSignal,
    Replicate,
    SimulationScenario,
    builtin_signal,
    generate_replicate,
    load_scenario,
    sample_noise,
    save_scenario,
    with_sigma,
)
from .thresholding import (
    SurvivorSet,
    ThresholdConfig,
    connected_threshold,
    default_lambda,
    estimate_sigma,
    threshold,
    unconnected_threshold,
)
from .transform import (
    DetailCoefficient,
    MergeTree,
    Series,
    detail_value,
    detail_weights,
    forward_transform,
    local_average,
    merge_pass,
)

__all__ = [
    "ContractError",
    "DetailCoefficient",
    "EvalReport",
    "InputError",
    "MatchResult",
    "MergeTree",
    "NoiseModel",
    "PiecewiseSignal",
    "Replicate",
    "RocResult",
    "Segmentation",
    "Series",
    "SimulationScenario",
    "SurvivorSet",
    "ThresholdConfig",
    "builtin_signal",
    "connected_threshold",
    "default_lambda",
    "detail_value",
    "detail_weights",
    "estimate_sigma",
    "extract_change_points",
    "fit_segments",
    "forward_transform",
    "generate_replicate",
    "load_scenario",
    "local_average",
    "match_change_points",
    "merge_pass",
    "mse",
    "roc_curve",
    "run_scenario",
    "sample_noise",
    "save_scenario",
    "segment",
    "segment_tree",
    "short_segment_tpr",
    "threshold",
    "unconnected_threshold",
    "with_sigma",
]
