"""
Experiment runs, their records and their validation against exact solutions
"""

from dualcharge.experiment.result import ExperimentResult, StageRecord
from dualcharge.experiment.runner import (
    OutputExistsError,
    default_output_dir,
    prepare_output,
    run_experiment,
)
from dualcharge.experiment.validation import (
    Oracle,
    OracleManager,
    Tolerances,
    ValidationReport,
    register_oracle,
    validate,
)

__all__ = [
    "ExperimentResult",
    "Oracle",
    "OracleManager",
    "OutputExistsError",
    "StageRecord",
    "Tolerances",
    "ValidationReport",
    "default_output_dir",
    "prepare_output",
    "register_oracle",
    "run_experiment",
    "validate",
]
