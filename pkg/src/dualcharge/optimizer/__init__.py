"""
Maximization of the discretized dual problem
"""

from dualcharge.optimizer.free_energy import (
    DegenerateWeightsError,
    FreeEnergyEstimate,
    fixed_point_potential,
    free_energy_estimate,
    gauge_shift,
    objective_estimate,
)
from dualcharge.optimizer.nag import (
    GradientEstimate,
    IterationRecord,
    OptimizerConfig,
    OptimizerDivergenceError,
    OptimizerState,
    default_step_size,
    gradient,
    nag_run,
)
from dualcharge.optimizer.projection import project_delta_b

__all__ = [
    "DegenerateWeightsError",
    "FreeEnergyEstimate",
    "GradientEstimate",
    "IterationRecord",
    "OptimizerConfig",
    "OptimizerDivergenceError",
    "OptimizerState",
    "default_step_size",
    "fixed_point_potential",
    "free_energy_estimate",
    "gauge_shift",
    "gradient",
    "nag_run",
    "objective_estimate",
    "project_delta_b",
]
