"""
Test the exact two electron droplet
"""

import math

import numpy as np
import pytest

from dualcharge.oracles import (
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
from dualcharge.oracles.droplet import partner_radius


def test_map_is_involution():
    """
    Test the map sends points to their antipodal partner shell and back
    """
    points = np.array([[0.3, 0.0, 0.0], [0.1, -0.4, 0.2], [0.0, 0.0, 1.0]])

    image = seidl_map_2e(points)

    assert np.linalg.norm(image, axis=-1) == pytest.approx(
        partner_radius(np.linalg.norm(points, axis=-1))
    )
    assert np.all(np.einsum("kd,kd->k", image[:2], points[:2]) < 0)
    assert seidl_map_2e(image[:2]) == pytest.approx(points[:2])


def test_map_domain():
    """
    Test the map is undefined at the center and outside the ball
    """
    with pytest.raises(ValueError):
        seidl_map_2e([0.0, 0.0, 0.0])

    with pytest.raises(ValueError):
        seidl_map_2e([1.5, 0.0, 0.0])


def test_gradient():
    """
    Test the force magnitude and direction
    """
    grad = exact_2e_gradient([[0.5, 0.0, 0.0]])

    assert grad[0] == pytest.approx([-0.4714108, 0.0, 0.0], abs=1e-6)


def test_potential():
    """
    Test the potential vanishes at the anchor and its slope matches the gradient
    """
    radii = np.array([0.4, 0.6, 1.0])
    points = np.column_stack([radii, np.zeros(3), np.zeros(3)])
    values = exact_2e_potential(points)

    assert values[-1] == pytest.approx(0.0, abs=1e-12)
    assert values[0] > values[1] > values[2]

    h = 1e-5
    slope = (
        exact_2e_potential([[0.5 + h, 0.0, 0.0]])
        - exact_2e_potential([[0.5 - h, 0.0, 0.0]])
    ) / (2 * h)
    assert slope[0] == pytest.approx(-0.4714108, abs=1e-5)

    shifted = exact_2e_potential(points, anchor=0.5)
    assert shifted - values == pytest.approx(np.full(3, shifted[-1]))


def test_charge():
    """
    Test the pointwise charge density
    """
    assert exact_2e_charge([[0.5, 0.0, 0.0]])[0] == pytest.approx(0.1126188, rel=1e-6)
    assert exact_2e_charge([[0.0, 0.3, 0.4]])[0] == pytest.approx(
        exact_2e_charge([[0.5, 0.0, 0.0]])[0]
    )


def test_enclosed_charge():
    """
    Test the charge of the unit ball is one and shells add up
    """
    assert exact_2e_enclosed_charge(0.0, 1.0) == pytest.approx(1.0, abs=1e-6)

    edges = np.linspace(0.0, 1.0, 8)
    parts = [exact_2e_enclosed_charge(a, b) for a, b in zip(edges[:-1], edges[1:])]
    assert sum(parts) == pytest.approx(1.0, abs=1e-6)
    assert all(part > 0 for part in parts)

    with pytest.raises(ValueError):
        exact_2e_enclosed_charge(0.6, 0.4)


def test_shell_charge():
    """
    Test the shell average against the pointwise charge of a thin shell
    """
    average = exact_2e_shell_charge(0.49, 0.51)

    assert average == pytest.approx(0.1126188, rel=1e-3)
    assert exact_2e_shell_charge(0.0, 1.0) == pytest.approx(3.0 / (4.0 * math.pi))


def test_energy():
    """
    Test the optimal energy of two electrons in the unit ball
    """
    assert exact_2e_energy() == pytest.approx(0.670008374914, abs=1e-9)


def test_reference_energies():
    """
    Test the reference table lookup
    """
    assert reference_energy(2) == pytest.approx(0.670008374914, abs=1e-9)
    assert reference_energy(3) == DROPLET_REFERENCE_ENERGIES[3] == 2.327
    assert reference_energy(5) == 8.626

    with pytest.raises(KeyError):
        reference_energy(7)
