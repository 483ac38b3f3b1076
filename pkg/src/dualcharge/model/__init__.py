"""
Densities, basis sets, dual charges and Coulomb energies
"""

from dualcharge.model.basis import (
    BasisElement,
    BasisSet,
    Segment,
    Shell,
    basis_force,
    basis_potential,
)
from dualcharge.model.charge import (
    DualCharge,
    ExternalPotential,
    ShiftedPotential,
    charge_mass,
    external_term,
    potential,
    potential_gradient,
)
from dualcharge.model.density import Ball, Density, Interval
from dualcharge.model.energy import (
    QuadratureError,
    coulomb_energy,
    interaction_matrix,
    reference_moments,
)

__all__ = [
    "Ball",
    "BasisElement",
    "BasisSet",
    "Density",
    "DualCharge",
    "ExternalPotential",
    "Interval",
    "QuadratureError",
    "Segment",
    "Shell",
    "ShiftedPotential",
    "basis_force",
    "basis_potential",
    "charge_mass",
    "coulomb_energy",
    "external_term",
    "interaction_matrix",
    "potential",
    "potential_gradient",
    "reference_moments",
]
