"""
Test the projection onto admissible dual charges
"""

import numpy as np
import pytest
from scipy import optimize

from dualcharge.optimizer import project_delta_b


def test_feasible_points():
    """
    Test feasible points only lose their negative entries
    """
    masses = np.array([1.0, 2.0, 1.0])

    assert project_delta_b([0.2, 0.1, 0.3], masses, 3.0) == pytest.approx(
        [0.2, 0.1, 0.3]
    )
    assert project_delta_b([-0.5, 0.1, 0.3], masses, 3.0) == pytest.approx(
        [0.0, 0.1, 0.3]
    )


def test_mass_bound():
    """
    Test heavy charges are pulled back onto the mass bound
    """
    masses = np.array([0.5, 1.0, 2.0, 0.25])
    weights = np.array([4.0, -1.0, 3.0, 8.0])

    projected = project_delta_b(weights, masses, 3.0)

    assert np.all(projected >= 0)
    assert projected @ masses == pytest.approx(3.0, abs=1e-10)

    # The optimality condition: a common multiplier on the support
    support = projected > 0
    ratios = (weights - projected)[support] / masses[support]
    assert ratios == pytest.approx(np.full(support.sum(), ratios[0]), abs=1e-9)
    assert np.all(weights[~support] <= ratios[0] * masses[~support] + 1e-12)


def test_idempotent():
    """
    Test projecting twice changes nothing
    """
    masses = np.linspace(0.1, 1.0, 6)
    weights = np.array([3.0, -2.0, 1.5, 0.5, 4.0, -0.1])

    once = project_delta_b(weights, masses, 1.0)
    twice = project_delta_b(once, masses, 1.0)

    assert twice == pytest.approx(once, abs=1e-12)


def test_zero_mass_bound():
    """
    Test a zero bound only admits the zero charge
    """
    projected = project_delta_b([1.0, 2.0], [1.0, 1.0], 0.0)

    assert projected == pytest.approx([0.0, 0.0], abs=1e-12)


def test_invalid_arguments():
    """
    Test non-positive masses and negative bounds
    """
    with pytest.raises(ValueError):
        project_delta_b([1.0, 1.0], [1.0, 0.0], 1.0)

    with pytest.raises(ValueError):
        project_delta_b([1.0, 1.0], [1.0, 1.0], -1.0)


@pytest.mark.parametrize("seed", range(4))
def test_matches_quadratic_program(seed: int):
    """
    Test small projections against a generic constrained solver
    """
    rng = np.random.default_rng(seed)
    masses = rng.uniform(0.2, 2.0, size=5)
    weights = rng.normal(0.5, 1.5, size=5)

    result = optimize.minimize(
        lambda x: 0.5 * np.sum((x - weights) ** 2),
        np.zeros(5),
        jac=lambda x: x - weights,
        method="SLSQP",
        bounds=[(0.0, None)] * 5,
        constraints=[{"type": "ineq", "fun": lambda x: 2.0 - x @ masses}],
        options={"ftol": 1e-14, "maxiter": 500},
    )

    assert result.success
    assert project_delta_b(weights, masses, 2.0) == pytest.approx(result.x, abs=1e-6)
