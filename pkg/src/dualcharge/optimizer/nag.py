"""
Stochastic gradient ascent on the dual charge weights with Nesterov
momentum.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from dualcharge.kernels import FloatArray
from dualcharge.model.charge import DualCharge
from dualcharge.model.energy import interaction_matrix, reference_moments
from dualcharge.optimizer.projection import project_delta_b
from dualcharge.sampler.moments import estimate_moments

if TYPE_CHECKING:
    import numpy.typing as npt

    from dualcharge.model.basis import BasisSet
    from dualcharge.model.density import Density
    from dualcharge.sampler.langevin import SamplerConfig

logger = logging.getLogger(__name__)


class OptimizerDivergenceError(RuntimeError):
    """
    Raised when the weights run off to infinity
    """

    def __init__(self, msg: str, iteration: int, norm: float) -> None:
        super().__init__(msg)
        self.iteration = iteration
        """The iteration at which the bound was exceeded"""
        self.norm = norm
        """The norm of the weights"""


class GradientEstimate(NamedTuple):
    """
    A Monte-Carlo estimate of the dual objective gradient
    """

    values: FloatArray
    """`D(rho_i, rho) - D(rho_i, rho[nu])`"""
    std_errors: FloatArray
    """Standard errors of the values"""


class IterationRecord(NamedTuple):
    """
    Diagnostics of one iteration
    """

    iteration: int
    grad_norm: float
    std_error_norm: float
    mass: float
    """Charge mass after the update"""


type GradientFn = Callable[[DualCharge], GradientEstimate]


@dataclass(frozen=True, slots=True)
class OptimizerConfig:
    """
    Settings of the accelerated gradient ascent
    """

    sampler: SamplerConfig
    """Sampler settings of every gradient evaluation"""
    step_size: float | None = None
    """Fixed step size, defaults to `default_step_size`"""
    momentum: float = 0.9
    """Nesterov momentum in `[0, 1)`"""
    max_iters: int = 500
    """Iteration budget"""
    grad_tol: float = 0.0
    """Absolute gradient norm tolerance"""
    project_delta_b: bool = False
    """Project onto non-negative charges of mass at most `N - 1`"""
    max_norm: float = 1e6
    """Weight norm above which the run is considered divergent"""

    def __post_init__(self) -> None:
        if self.step_size is not None and self.step_size <= 0:
            msg = f"step_size must be positive, got {self.step_size}"
            raise ValueError(msg)
        if not 0 <= self.momentum < 1:
            msg = f"momentum must lie in [0, 1), got {self.momentum}"
            raise ValueError(msg)
        if self.max_iters < 1:
            msg = f"max_iters must be at least 1, got {self.max_iters}"
            raise ValueError(msg)
        if self.grad_tol < 0:
            msg = f"grad_tol must be non-negative, got {self.grad_tol}"
            raise ValueError(msg)


@dataclass(slots=True)
class OptimizerState:
    """
    Iterate of the accelerated ascent
    """

    basis: BasisSet
    nu: FloatArray
    """Current weights"""
    velocity: FloatArray
    """Momentum buffer"""
    iteration: int = 0
    history: list[IterationRecord] = field(default_factory=list)
    converged: bool = False
    """Whether the stopping tolerance was met before the budget ran out"""
    last_gradient: GradientEstimate | None = None

    @property
    def charge(self) -> DualCharge:
        """The dual charge of the current weights"""
        return DualCharge(self.basis, self.nu)


def default_step_size(basis: BasisSet) -> float:
    """
    `0.5 / max_i sum_j |D(rho_i, rho_j)|`
    """
    return 0.5 / float(np.abs(interaction_matrix(basis)).sum(axis=1).max())


def iteration_seed(seed: int, iteration: int) -> int:
    """
    Independent sampler seed of one iteration
    """
    sequence = np.random.SeedSequence(seed, spawn_key=(iteration,))
    return int(sequence.generate_state(1)[0])


def gradient(charge: DualCharge, rho: Density, cfg: SamplerConfig) -> GradientEstimate:
    """
    Estimate `dG/dnu_i = D(rho_i, rho) - D(rho_i, rho[nu])`

    :param charge: The dual charge
    :param rho: The target density
    :param cfg: The sampler settings
    :return: The gradient with the sampler standard errors
    """
    moments = estimate_moments(charge, rho, cfg)
    values = reference_moments(charge.basis, rho) - moments.values
    return GradientEstimate(values, moments.std_errors)


def nag_run(
    initial_nu: npt.ArrayLike,
    rho: Density,
    basis: BasisSet,
    cfg: OptimizerConfig,
    *,
    gradient_fn: GradientFn | None = None,
    callback: Callable[[OptimizerState], None] | None = None,
) -> OptimizerState:
    """
    Maximize the dual objective by accelerated stochastic gradient ascent.

    Every iteration evaluates the gradient at the lookahead point
    `nu + momentum * velocity`. The run stops once
    `|g| <= max(grad_tol, 3 |std_errors|)` or after `max_iters` iterations.

    :param initial_nu: The starting weights
    :param rho: The target density
    :param basis: The basis set
    :param cfg: The optimizer settings
    :param gradient_fn: Replaces the sampled gradient, defaults to `gradient`
    with a fresh sampler seed every iteration
    :param callback: Called with the state after every iteration
    :raises OptimizerDivergenceError: When `|nu|` exceeds `max_norm`
    :return: The final state
    """
    step = cfg.step_size if cfg.step_size is not None else default_step_size(basis)
    max_mass = float(rho.n_electrons - 1)

    nu = np.array(initial_nu, dtype=np.float64)
    if nu.shape != (len(basis),):
        msg = f"Expected {len(basis)} initial weights, got shape {nu.shape}"
        raise ValueError(msg)
    if cfg.project_delta_b:
        nu = project_delta_b(nu, basis.masses, max_mass)

    state = OptimizerState(basis, nu, np.zeros_like(nu))

    def sampled_gradient(charge: DualCharge) -> GradientEstimate:
        seed = iteration_seed(cfg.sampler.seed, state.iteration)
        return gradient(charge, rho, replace(cfg.sampler, seed=seed))

    evaluate = gradient_fn if gradient_fn is not None else sampled_gradient
    logger.debug("Starting NAG with step %.4g and momentum %.3g", step, cfg.momentum)

    while state.iteration < cfg.max_iters:
        lookahead = state.nu + cfg.momentum * state.velocity
        grad = evaluate(DualCharge(basis, lookahead))
        grad_norm = float(np.linalg.norm(grad.values))
        se_norm = float(np.linalg.norm(grad.std_errors))
        state.last_gradient = grad

        done = grad_norm <= max(cfg.grad_tol, 3.0 * se_norm)
        if not done:
            velocity = cfg.momentum * state.velocity + step * grad.values
            updated = state.nu + velocity
            if cfg.project_delta_b:
                updated = project_delta_b(updated, basis.masses, max_mass)
                velocity = updated - state.nu
            state.nu, state.velocity = updated, velocity

        state.iteration += 1
        mass = float(state.nu @ basis.masses)
        state.history.append(IterationRecord(state.iteration, grad_norm, se_norm, mass))
        logger.debug(
            "Iteration %d: |g| = %.4g, |se| = %.4g, mass = %.6g",
            state.iteration,
            grad_norm,
            se_norm,
            mass,
        )

        norm = float(np.linalg.norm(state.nu))
        if not norm <= cfg.max_norm:
            msg = (
                f"Dual charge weights diverged at iteration {state.iteration} "
                f"(|nu| = {norm})"
            )
            raise OptimizerDivergenceError(msg, state.iteration, norm)

        if callback is not None:
            callback(state)

        if done:
            state.converged = True
            break
    else:
        logger.warning(
            "Stopped after %d iterations without meeting the gradient tolerance",
            cfg.max_iters,
        )

    return state
