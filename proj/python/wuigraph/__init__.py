"""Wildfire contagion graph, dual-specialist damage models and diagnostics."""

from ._core import (
    ComputationError,
    ValidationError,
    build_graph,
    centrality,
    classification_metrics,
    default_config,
    eval_all,
    fit_stacker,
    flame_angle,
    incident_flux,
    metrics_from_counts,
    roc_auc,
    run_cli,
    stack_predict,
    synth,
    total_probability,
    triage,
    wind_correlation,
)

__all__ = [
    "ComputationError",
    "ValidationError",
    "build_graph",
    "centrality",
    "classification_metrics",
    "default_config",
    "eval_all",
    "fit_stacker",
    "flame_angle",
    "incident_flux",
    "metrics_from_counts",
    "roc_auc",
    "run_cli",
    "stack_predict",
    "synth",
    "total_probability",
    "triage",
    "wind_correlation",
]
