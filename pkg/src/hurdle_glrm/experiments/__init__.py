from .registry import (
    EXPERIMENT_REGISTRY,
    Experiment,
    get_all_experiment_names,
    validate_experiment,
)

__all__ = [
    "EXPERIMENT_REGISTRY",
    "Experiment",
    "get_all_experiment_names",
    "validate_experiment",
]
