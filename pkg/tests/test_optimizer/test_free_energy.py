"""
Test the importance sampling free energy estimates
"""

import math

import numpy as np
import pytest

from dualcharge.model import BasisSet, Density, DualCharge
from dualcharge.model.charge import ShiftedPotential
from dualcharge.optimizer import (
    DegenerateWeightsError,
    fixed_point_potential,
    free_energy_estimate,
    gauge_shift,
    gradient,
    objective_estimate,
)
from dualcharge.sampler import SamplerConfig

# Weights of the finite difference comparisons
_RANDOM_WEIGHTS = np.random.default_rng(17).uniform(-0.3, 0.5, size=5)


@pytest.fixture(name="pair_density")
def _pair_density():
    """
    Two electrons uniform on [-1, 1]
    """
    return Density.interval(-1.0, 1.0, 2)


@pytest.fixture(name="free_charge")
def _free_charge():
    """
    The zero charge on [-1, 1]
    """
    return DualCharge.zeros(BasisSet.segments(-1.0, 1.0, 4))


def test_free_pair(pair_density: Density, free_charge: DualCharge):
    """
    Test two free particles on a line against the exact free energy
    """
    # E[exp(|x - y|)] for x, y uniform on [-1, 1]
    exact = -math.log(math.exp(2.0) / 2.0 - 1.5)

    estimate = free_energy_estimate(free_charge, pair_density, 1.0, 200_000, 0)

    assert estimate.ess > 1000
    assert estimate.std_error > 0
    assert estimate.value == pytest.approx(exact, abs=5 * estimate.std_error + 1e-4)


def test_constant_shift(pair_density: Density, free_charge: DualCharge):
    """
    Test a constant potential shifts the free energy by N times the constant
    """
    base = free_energy_estimate(free_charge, pair_density, 2.0, 5000, 4)
    shifted = free_energy_estimate(
        ShiftedPotential(free_charge, 0.75), pair_density, 2.0, 5000, 4
    )

    assert shifted.value == pytest.approx(base.value - 1.5, abs=1e-12)


def test_objective_is_gauge_invariant(pair_density: Density, free_charge: DualCharge):
    """
    Test the dual objective ignores constant shifts of the potential
    """
    base = objective_estimate(free_charge, pair_density, 2.0, 5000, 4)
    shifted = objective_estimate(
        ShiftedPotential(free_charge, -0.3), pair_density, 2.0, 5000, 4
    )

    assert shifted.value == pytest.approx(base.value, abs=1e-12)


def test_gauge_shift(pair_density: Density, free_charge: DualCharge):
    """
    Test the gauge shift normalizes the partition function to N
    """
    shift = gauge_shift(free_charge, pair_density, 1.5, 5000, 9)
    shifted = free_energy_estimate(
        ShiftedPotential(free_charge, shift), pair_density, 1.5, 5000, 9
    )

    assert -1.5 * shifted.value == pytest.approx(math.log(2.0), abs=1e-10)


def test_degenerate_weights(pair_density: Density, free_charge: DualCharge):
    """
    Test a very cold estimate is refused
    """
    with pytest.raises(DegenerateWeightsError) as info:
        free_energy_estimate(free_charge, pair_density, 1e4, 100, 0)

    assert info.value.ess < 10


def test_invalid_arguments(pair_density: Density, free_charge: DualCharge):
    """
    Test non-positive temperatures and tiny sample counts
    """
    with pytest.raises(ValueError):
        free_energy_estimate(free_charge, pair_density, 0.0, 100, 0)

    with pytest.raises(ValueError):
        free_energy_estimate(free_charge, pair_density, 1.0, 1, 0)


def test_fixed_point_potential(pair_density: Density, free_charge: DualCharge):
    """
    Test the hot limit of the self-consistent potential is the mean repulsion
    """
    values = fixed_point_potential(
        free_charge, pair_density, 0.01, [[0.0], [1.0]], 20_000, 2
    )

    assert values.shape == (2,)
    # -E|x - y| with y uniform on [-1, 1]
    assert values == pytest.approx(np.array([-0.5, -1.0]), abs=0.03)


@pytest.mark.parametrize("weight", _RANDOM_WEIGHTS.tolist())
def test_gradient_matches_finite_difference(pair_density: Density, weight: float):
    """
    Test the sampled gradient against central differences of the objective
    """
    basis = BasisSet.segments(-1.0, 1.0, 1)
    eps = 0.05
    cfg = SamplerConfig(beta=1.0, n_chains=16, burn_in=2000, n_steps=16_000, thin=16)

    estimate = gradient(DualCharge(basis, [weight]), pair_density, cfg)
    upper = objective_estimate(
        DualCharge(basis, [weight + eps]), pair_density, 1.0, 100_000, 11
    )
    lower = objective_estimate(
        DualCharge(basis, [weight - eps]), pair_density, 1.0, 100_000, 11
    )
    difference = (upper.value - lower.value) / (2 * eps)

    fd_error = (upper.std_error + lower.std_error) / (2 * eps)
    tolerance = 3.0 * math.hypot(estimate.std_errors[0], fd_error)
    assert estimate.values[0] == pytest.approx(difference, abs=tolerance)
