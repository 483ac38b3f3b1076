"""
Exact solutions used as references
"""

from dualcharge.oracles.comb import (
    Comb1D,
    ProfileDensity1D,
    breakpoints,
    comb_potential,
    cyclic_map,
    exact_1d_energy,
)
from dualcharge.oracles.droplet import (
    DROPLET_REFERENCE_ENERGIES,
    exact_2e_charge,
    exact_2e_energy,
    exact_2e_enclosed_charge,
    exact_2e_gradient,
    exact_2e_potential,
    exact_2e_shell_charge,
    reference_energy,
    seidl_map_2e,
)

__all__ = [
    "DROPLET_REFERENCE_ENERGIES",
    "Comb1D",
    "ProfileDensity1D",
    "breakpoints",
    "comb_potential",
    "cyclic_map",
    "exact_1d_energy",
    "exact_2e_charge",
    "exact_2e_energy",
    "exact_2e_enclosed_charge",
    "exact_2e_gradient",
    "exact_2e_potential",
    "exact_2e_shell_charge",
    "reference_energy",
    "seidl_map_2e",
]
