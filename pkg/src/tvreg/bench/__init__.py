"""Reference solutions and benchmark experiments."""

from .reference import (
    REFERENCE_FACTOR,
    Reference,
    ReferenceNotConvergedError,
    compute_reference,
    load_reference,
    reference_key,
    save_reference,
)
from .runner import ExperimentResult, cell_stem, run_cell, run_experiment, solver_config_for

__all__ = [
    "REFERENCE_FACTOR",
    "ExperimentResult",
    "Reference",
    "ReferenceNotConvergedError",
    "cell_stem",
    "compute_reference",
    "load_reference",
    "reference_key",
    "run_cell",
    "run_experiment",
    "save_reference",
    "solver_config_for",
]
