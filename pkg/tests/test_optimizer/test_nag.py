"""
Test the accelerated gradient ascent
"""

import numpy as np
import pytest

from dualcharge.model import BasisSet, Density, DualCharge
from dualcharge.model.energy import interaction_matrix
from dualcharge.optimizer import (
    GradientEstimate,
    OptimizerConfig,
    OptimizerDivergenceError,
    OptimizerState,
    default_step_size,
    gradient,
    nag_run,
)
from dualcharge.optimizer.nag import iteration_seed
from dualcharge.sampler import SamplerConfig

_SAMPLER = SamplerConfig(beta=1.0, n_chains=2, burn_in=10, n_steps=40, thin=4)


@pytest.fixture(name="pair_density")
def _pair_density():
    """
    Two electrons uniform on [-2, 2]
    """
    return Density.interval(-2.0, 2.0, 2)


@pytest.fixture(name="basis")
def _basis():
    """
    Four segments tiling [-2, 2], each of mass one
    """
    return BasisSet.segments(-2.0, 2.0, 4)


def _quadratic(target):
    """
    The exact gradient of `-|nu - target|^2 / 2`
    """

    def evaluate(charge: DualCharge) -> GradientEstimate:
        values = np.asarray(target) - charge.weights
        return GradientEstimate(values, np.zeros_like(values))

    return evaluate


def test_config_validation():
    """
    Test invalid optimizer settings
    """
    with pytest.raises(ValueError):
        OptimizerConfig(_SAMPLER, step_size=0.0)

    with pytest.raises(ValueError):
        OptimizerConfig(_SAMPLER, momentum=1.0)

    with pytest.raises(ValueError):
        OptimizerConfig(_SAMPLER, max_iters=0)

    with pytest.raises(ValueError):
        OptimizerConfig(_SAMPLER, grad_tol=-1.0)


def test_default_step_size(basis: BasisSet):
    """
    Test the default step from the interaction matrix row sums
    """
    rows = np.abs(interaction_matrix(basis)).sum(axis=1)

    assert default_step_size(basis) == pytest.approx(0.5 / rows.max())
    assert default_step_size(basis) > 0


def test_iteration_seeds():
    """
    Test every iteration samples with a fresh seed
    """
    seeds = {iteration_seed(5, k) for k in range(20)}

    assert len(seeds) == 20
    assert iteration_seed(5, 3) == iteration_seed(5, 3)


def test_converges_on_quadratic(pair_density: Density, basis: BasisSet):
    """
    Test the ascent finds the maximizer of a concave quadratic
    """
    target = np.array([0.2, -0.1, 0.4, 0.3])
    cfg = OptimizerConfig(_SAMPLER, step_size=0.1, max_iters=2000, grad_tol=1e-8)

    evaluate = _quadratic(target)
    state = nag_run(np.zeros(4), pair_density, basis, cfg, gradient_fn=evaluate)

    assert state.converged
    assert state.iteration < 2000
    assert state.nu == pytest.approx(target, abs=1e-6)
    assert state.history[-1].grad_norm <= 1e-8
    assert state.charge.mass == pytest.approx(target.sum(), abs=1e-5)


def test_lookahead(pair_density: Density, basis: BasisSet):
    """
    Test the gradient is evaluated ahead along the momentum
    """
    seen = []

    def constant(charge: DualCharge) -> GradientEstimate:
        seen.append(charge.weights.copy())
        return GradientEstimate(np.ones(4), np.zeros(4))

    cfg = OptimizerConfig(_SAMPLER, step_size=0.1, momentum=0.5, max_iters=2)
    state = nag_run(np.zeros(4), pair_density, basis, cfg, gradient_fn=constant)

    assert seen[0] == pytest.approx(np.zeros(4))
    assert seen[1] == pytest.approx(np.full(4, 0.15))
    assert state.nu == pytest.approx(np.full(4, 0.25))
    assert state.velocity == pytest.approx(np.full(4, 0.15))


def test_budget(pair_density: Density, basis: BasisSet):
    """
    Test the run stops when the iteration budget is spent
    """
    cfg = OptimizerConfig(_SAMPLER, step_size=0.01, max_iters=3)
    calls = []

    state = nag_run(
        np.zeros(4),
        pair_density,
        basis,
        cfg,
        gradient_fn=_quadratic(np.ones(4)),
        callback=lambda current: calls.append(current.iteration),
    )

    assert not state.converged
    assert state.iteration == 3
    assert [record.iteration for record in state.history] == [1, 2, 3]
    assert calls == [1, 2, 3]


def test_noise_floor(pair_density: Density, basis: BasisSet):
    """
    Test the run stops once the gradient is lost in the sampling noise
    """

    def noisy(charge: DualCharge) -> GradientEstimate:  # pylint: disable=W0613
        return GradientEstimate(np.full(4, 0.01), np.full(4, 0.01))

    cfg = OptimizerConfig(_SAMPLER, step_size=0.1, max_iters=50)
    state = nag_run(np.ones(4), pair_density, basis, cfg, gradient_fn=noisy)

    assert state.converged
    assert state.iteration == 1
    assert state.nu == pytest.approx(np.ones(4))


def test_projection_keeps_iterates_admissible(pair_density: Density, basis: BasisSet):
    """
    Test every projected iterate is non-negative with mass at most N - 1
    """
    target = np.array([2.0, -1.0, 3.0, 0.5])
    cfg = OptimizerConfig(_SAMPLER, step_size=0.2, max_iters=100, project_delta_b=True)

    def check(state: OptimizerState) -> None:
        assert np.all(state.nu >= 0)
        assert state.nu @ basis.masses <= 1.0 + 1e-10

    state = nag_run(
        [1.0, 1.0, 1.0, 1.0],
        pair_density,
        basis,
        cfg,
        gradient_fn=_quadratic(target),
        callback=check,
    )

    assert state.history[-1].mass == pytest.approx(1.0, abs=1e-6)
    assert state.nu[1] == pytest.approx(0.0, abs=1e-10)


def test_divergence(pair_density: Density, basis: BasisSet):
    """
    Test runaway weights are reported
    """

    def uphill(charge: DualCharge) -> GradientEstimate:  # pylint: disable=W0613
        return GradientEstimate(np.full(4, 1e3), np.zeros(4))

    cfg = OptimizerConfig(_SAMPLER, step_size=1.0, max_norm=10.0)

    with pytest.raises(OptimizerDivergenceError) as info:
        nag_run(np.zeros(4), pair_density, basis, cfg, gradient_fn=uphill)

    assert info.value.iteration == 1
    assert info.value.norm > 10.0


def test_initial_shape(pair_density: Density, basis: BasisSet):
    """
    Test mismatched initial weights are rejected
    """
    cfg = OptimizerConfig(_SAMPLER)

    with pytest.raises(ValueError):
        nag_run(np.zeros(3), pair_density, basis, cfg)


def test_sampled_gradient(pair_density: Density, basis: BasisSet):
    """
    Test the sampled gradient and a short sampled ascent
    """
    estimate = gradient(DualCharge.zeros(basis), pair_density, _SAMPLER)

    assert estimate.values.shape == (4,)
    assert np.all(np.isfinite(estimate.values))
    assert np.all(estimate.std_errors >= 0)

    cfg = OptimizerConfig(_SAMPLER, max_iters=3)
    state = nag_run(np.zeros(4), pair_density, basis, cfg)

    assert 1 <= state.iteration <= 3
    assert np.all(np.isfinite(state.nu))
    assert state.last_gradient is not None
