"""
Test the Coulomb kernels and the N-body cost
"""

import numpy as np
import pytest

from dualcharge.kernels import (
    Dimension,
    SingularityError,
    cost,
    cost_gradient,
    kernel,
    pair_energy,
    truncated_cost,
    truncated_cost_gradient,
)


def _central_difference(func, config, step=1e-6):
    grad = np.zeros_like(config)
    for index in np.ndindex(config.shape):
        shifted = config.copy()
        shifted[index] += step
        upper = func(shifted)
        shifted[index] -= 2 * step
        lower = func(shifted)
        grad[index] = (upper - lower) / (2 * step)
    return grad


def test_dimension_selection():
    """
    Test that only one and three dimensions exist
    """
    assert Dimension(1) is Dimension.LINE
    assert Dimension(3) is Dimension.SPACE

    with pytest.raises(ValueError):
        Dimension(2)


def test_kernel_values():
    """
    Test the kernel in both dimensions
    """
    assert kernel(1, 0.5, -1.5) == pytest.approx(-2.0)
    assert kernel(3, [0.0, 0.0, 0.0], [0.0, 3.0, 4.0]) == pytest.approx(0.2)


def test_kernel_singularity():
    """
    Test coincident points in three dimensions
    """
    with pytest.raises(SingularityError):
        kernel(3, [1.0, 0.0, 0.0], [1.0, 0.0, 0.0])

    assert kernel(1, 0.3, 0.3) == 0.0


def test_cost_sums_pairs():
    """
    Test the cost of small configurations
    """
    config = np.array([[-1.0], [0.0], [2.0]])
    assert cost(1, config) == pytest.approx(-(1.0 + 3.0 + 2.0))

    config = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 2.0, 0.0]])
    expected = 1.0 + 0.5 + 1.0 / np.sqrt(5.0)
    assert cost(3, config) == pytest.approx(expected)


def test_flat_line_configurations():
    """
    Test one dimensional configurations given without a trailing axis
    """
    assert cost(1, (-2.0, -1.0, 0.0, 1.0)) == pytest.approx(-10.0)
    assert cost(1, [[-1.0, 1.0], [0.0, 0.5]]) == pytest.approx([-2.0, -0.5])

    grad = cost_gradient(1, (-2.0, -1.0, 0.0, 1.0))
    assert grad.shape == (4, 1)
    assert grad[:, 0] == pytest.approx([3.0, 1.0, -1.0, -3.0])

    with pytest.raises(ValueError):
        cost(3, (0.0, 0.0, 1.0))

    with pytest.raises(ValueError):
        cost_gradient(3, [[0.0, 1.0], [1.0, 0.0]])


def test_cost_singularity_reports_pair():
    """
    Test the coincident pair is reported
    """
    config = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    with pytest.raises(SingularityError) as info:
        cost(3, config)

    assert info.value.pair == (1, 2)


def test_cost_invariances():
    """
    Test translation and permutation invariance of the cost
    """
    rng = np.random.default_rng(3)
    config = rng.normal(size=(5, 3))
    shift = rng.normal(size=3)

    assert cost(3, config + shift) == pytest.approx(cost(3, config))
    assert cost(3, config[::-1]) == pytest.approx(cost(3, config))

    line = rng.normal(size=(6, 1))
    assert cost(1, line + 0.7) == pytest.approx(cost(1, line))
    assert cost(1, line[rng.permutation(6)]) == pytest.approx(cost(1, line))


def test_cost_broadcasts():
    """
    Test batches of configurations
    """
    rng = np.random.default_rng(4)
    batch = rng.normal(size=(2, 3, 4, 3))

    values = cost(3, batch)

    assert values.shape == (2, 3)
    assert values[1, 2] == pytest.approx(cost(3, batch[1, 2]))


def test_cost_gradient_matches_finite_differences():
    """
    Test the analytic gradients in both dimensions
    """
    rng = np.random.default_rng(5)
    config = rng.normal(size=(4, 3))
    numeric = _central_difference(lambda c: cost(3, c), config)
    assert cost_gradient(3, config) == pytest.approx(numeric, rel=1e-5, abs=1e-7)

    line = np.array([[-1.3], [0.2], [0.9], [2.4]])
    numeric = _central_difference(lambda c: cost(1, c), line)
    assert cost_gradient(1, line) == pytest.approx(numeric, abs=1e-7)


def test_truncated_cost():
    """
    Test the cap on close pairs and the smooth branch beyond alpha
    """
    config = np.array([[0.0, 0.0, 0.0], [0.1, 0.0, 0.0], [2.0, 0.0, 0.0]])
    alpha = 0.5

    expected = 1.0 / alpha + 1.0 / 2.0 + 1.0 / 1.9
    assert truncated_cost(config, alpha) == pytest.approx(expected)

    coincident = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    assert truncated_cost(coincident, alpha) == pytest.approx(2.0)

    far = np.array([[0.0, 0.0, 0.0], [3.0, 0.0, 0.0]])
    assert truncated_cost(far, alpha) == pytest.approx(cost(3, far))


def test_truncated_cost_gradient():
    """
    Test the gradient vanishes inside alpha and follows the cost outside
    """
    alpha = 0.5
    close = np.array([[0.0, 0.0, 0.0], [0.2, 0.0, 0.0]])
    assert np.all(truncated_cost_gradient(close, alpha) == 0.0)

    rng = np.random.default_rng(6)
    config = 3.0 * rng.normal(size=(4, 3))
    numeric = _central_difference(lambda c: truncated_cost(c, alpha), config)
    assert truncated_cost_gradient(config, alpha) == pytest.approx(
        numeric, rel=1e-5, abs=1e-7
    )


def test_truncation_arguments():
    """
    Test invalid truncation requests
    """
    config = np.zeros((2, 3))
    with pytest.raises(ValueError):
        truncated_cost(config, 0.0)

    with pytest.raises(ValueError):
        truncated_cost(np.zeros((2, 1)), 0.5)


def test_pair_energy_selection():
    """
    Test the truncation is only applied in three dimensions
    """
    config = np.array([[0.0, 0.0, 0.0], [0.1, 0.0, 0.0]])
    assert pair_energy(3, config, 0.5) == pytest.approx(2.0)
    assert pair_energy(3, config, None) == pytest.approx(10.0)

    line = np.array([[0.0], [0.1]])
    assert pair_energy(1, line, 0.5) == pytest.approx(-0.1)
