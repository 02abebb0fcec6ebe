"""Cognitive hierarchy navigation engine (Python bindings)."""

from ._core import (
    ValidationError,
    canonical_scenario_text,
    check_text,
    heatmap_csv,
    learn_csv,
    plan,
    sweep,
    validate,
)

__all__ = [
    "ValidationError",
    "canonical_scenario_text",
    "check_text",
    "heatmap_csv",
    "learn_csv",
    "plan",
    "sweep",
    "validate",
]
