"""
Zero temperature evaluation: the lowest energy of N particles in an
external potential, constrained to the support, and the resulting lower
bound on the strictly correlated energy.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import StrEnum
from functools import partial
from typing import TYPE_CHECKING

import numpy as np

from dualcharge import ctx
from dualcharge.kernels import Dimension, FloatArray, pair_energy, pair_energy_gradient
from dualcharge.model.charge import external_term
from dualcharge.sampler.langevin import DEFAULT_ALPHA_SCALE, chain_rng
from dualcharge.utils.asyncio import partition, run_jobs

if TYPE_CHECKING:
    from dualcharge.model.charge import ExternalPotential
    from dualcharge.model.density import Density

logger = logging.getLogger(__name__)

STARTS_PER_PARTICLE = 64
MAX_BACKTRACKS = 60


class InitMode(StrEnum):
    """
    Placement of the starting configurations
    """

    UNIFORM = "uniform"
    """Independent uniform particles on the support"""
    SHELLS = "shells"
    """Particles on the quantiles of the radial (or linear) density, with
    random directions in three dimensions"""


@dataclass(frozen=True, slots=True)
class MultistartConfig:
    """
    Settings of the multistart projected gradient descent
    """

    n_starts: int | None = None
    """Number of starts, defaults to `64 N`"""
    max_descent_iters: int = 2000
    """Iteration budget of every descent"""
    initial_step: float = 1e-2
    """First trial step, relative to the support diameter"""
    shrink: float = 0.5
    """Backtracking factor"""
    grow: float = 2.0
    """Step growth after an accepted step"""
    armijo: float = 1e-4
    """Sufficient decrease constant"""
    xtol: float = 1e-10
    """Moves below `xtol * diam` count as converged"""
    alpha: float | None = None
    """Truncation distance of the three dimensional cost, defaults to
    `1e-3 * diam`"""
    seed: int = 0
    init: InitMode = InitMode.UNIFORM
    fail_fraction: float = 0.2
    """Share of unconverged starts above which the result is flagged"""

    def __post_init__(self) -> None:
        if self.n_starts is not None and self.n_starts < 1:
            msg = f"n_starts must be at least 1, got {self.n_starts}"
            raise ValueError(msg)
        if self.max_descent_iters < 1:
            msg = f"max_descent_iters must be at least 1, got {self.max_descent_iters}"
            raise ValueError(msg)
        if not 0 < self.shrink < 1 or self.grow < 1 or not 0 < self.armijo < 1:
            msg = "Backtracking needs 0 < shrink < 1, grow >= 1 and 0 < armijo < 1"
            raise ValueError(msg)
        if self.initial_step <= 0 or self.xtol <= 0:
            msg = "initial_step and xtol must be positive"
            raise ValueError(msg)
        if self.alpha is not None and self.alpha <= 0:
            msg = f"alpha must be positive, got {self.alpha}"
            raise ValueError(msg)
        if self.seed < 0:
            msg = f"seed must be non-negative, got {self.seed}"
            raise ValueError(msg)


@dataclass(frozen=True, slots=True, eq=False)
class ZeroTempResult:
    """
    Outcome of the multistart minimization
    """

    value: float
    """The lowest energy found"""
    configuration: FloatArray
    """A configuration reaching it, shape `(N, d)`"""
    values: FloatArray
    """Final energy of every start"""
    converged: FloatArray
    """Convergence flag of every start"""

    @property
    def n_failed(self) -> int:
        """Starts that ran out of iterations"""
        return int(np.count_nonzero(~self.converged.astype(bool)))

    def flagged(self, fail_fraction: float) -> bool:
        """Whether more than `fail_fraction` of the starts failed"""
        return self.n_failed > fail_fraction * self.values.size


class _Landscape:
    """
    The energy `c_alpha - sum v(r_i)` of batches of configurations
    """

    def __init__(self, charge: ExternalPotential, rho: Density, alpha: float | None):
        self.charge = charge
        self.rho = rho
        self.alpha = alpha if rho.d is Dimension.SPACE else None

    def energy(self, configs: FloatArray) -> FloatArray:
        external = self.charge.potential(configs).sum(axis=-1)
        return pair_energy(self.rho.d, configs, self.alpha) - external

    def gradient(self, configs: FloatArray) -> FloatArray:
        pair = pair_energy_gradient(self.rho.d, configs, self.alpha)
        return pair - self.charge.potential_gradient(configs)


def _initial_configuration(
    rho: Density,
    rng: np.random.Generator,
    mode: InitMode,
) -> FloatArray:
    n = rho.n_electrons
    if mode is InitMode.UNIFORM:
        return rho.sample_uniform(rng, n)

    quantiles = (np.arange(n) + 0.5) / n
    if rho.d is Dimension.LINE:
        lower, upper = rho.support
        cell = (upper - lower) / n
        jitter = rng.uniform(-0.25 * cell, 0.25 * cell, size=n)
        return (lower + quantiles * (upper - lower) + jitter)[:, np.newaxis]

    direction = rng.standard_normal((n, 3))
    direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
    return direction * (rho.support.radius * np.cbrt(quantiles))[:, np.newaxis]


def _descend(
    starts: range,
    landscape: _Landscape,
    cfg: MultistartConfig,
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """
    Batched projected gradient descent with per-start Armijo backtracking

    :return: Final energies `(G,)`, configurations `(G, N, d)` and
    convergence flags `(G,)`
    """
    rho = landscape.rho
    configs = np.stack(
        [_initial_configuration(rho, chain_rng(cfg.seed, k), cfg.init) for k in starts]
    )
    values = landscape.energy(configs)
    steps = np.full(len(starts), cfg.initial_step * rho.diameter)
    max_step = 10.0 * rho.diameter
    min_step = 1e-14 * rho.diameter
    active = np.ones(len(starts), dtype=bool)
    converged = np.zeros(len(starts), dtype=bool)

    for _ in range(cfg.max_descent_iters):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break

        x, fx, tau = configs[idx], values[idx], steps[idx]
        grad = landscape.gradient(x)
        x_new, f_new = x.copy(), fx.copy()
        accepted = np.zeros(idx.size, dtype=bool)
        pending = np.ones(idx.size, dtype=bool)

        for _ in range(MAX_BACKTRACKS):
            p = np.flatnonzero(pending)
            if p.size == 0:
                break
            trial = rho.project(x[p] - tau[p, np.newaxis, np.newaxis] * grad[p])
            f_trial = landscape.energy(trial)
            move = ((trial - x[p]) ** 2).sum(axis=(-2, -1))
            ok = f_trial <= fx[p] - cfg.armijo / tau[p] * move
            x_new[p[ok]] = trial[ok]
            f_new[p[ok]] = f_trial[ok]
            accepted[p[ok]] = True
            pending[p[ok]] = False
            tau[p[~ok]] *= cfg.shrink
            pending &= tau >= min_step

        moved = np.abs(x_new - x).max(axis=(-2, -1))
        done = ~accepted | (moved <= cfg.xtol * rho.diameter)
        tau[accepted] = np.minimum(tau[accepted] * cfg.grow, max_step)

        configs[idx], values[idx], steps[idx] = x_new, f_new, tau
        converged[idx[done]] = True
        active[idx[done]] = False

    logger.debug("Starts %s: %d of %d converged", starts, converged.sum(), len(starts))
    return values, configs, converged


def e_n_omega(
    charge: ExternalPotential,
    rho: Density,
    cfg: MultistartConfig,
) -> ZeroTempResult:
    """
    The minimum over configurations in the support of
    `c_alpha(r_1, ..., r_N) - sum v(r_i)`, by multistart projected gradient
    descent.

    Every start owns the random stream keyed by its index, so adding starts
    never raises the returned value and the worker count does not change it.

    :param charge: The external potential
    :param rho: The target density
    :param cfg: The multistart settings
    :return: The best value and configuration with per-start diagnostics
    """
    n_starts = cfg.n_starts or STARTS_PER_PARTICLE * rho.n_electrons
    alpha = cfg.alpha if cfg.alpha is not None else DEFAULT_ALPHA_SCALE * rho.diameter
    landscape = _Landscape(charge, rho, alpha)

    groups = partition(n_starts, ctx.get_workers())
    jobs = [partial(_descend, group, landscape, cfg) for group in groups]
    parts = run_jobs(jobs)
    values = np.concatenate([part[0] for part in parts])
    configs = np.concatenate([part[1] for part in parts])
    converged = np.concatenate([part[2] for part in parts])

    best = int(np.argmin(values))
    result = ZeroTempResult(float(values[best]), configs[best], values, converged)
    if result.flagged(cfg.fail_fraction):
        logger.warning(
            "%d of %d descents did not converge within %d iterations",
            result.n_failed,
            n_starts,
            cfg.max_descent_iters,
        )
    return result


def f_sce(charge: ExternalPotential, rho: Density, cfg: MultistartConfig) -> float:
    """
    The dual energy `E_N(v) + int v rho`, a lower bound on the strictly
    correlated energy of `rho`

    :param charge: The external potential
    :param rho: The target density
    :param cfg: The multistart settings
    :return: The dual energy
    """
    return e_n_omega(charge, rho, cfg).value + external_term(charge, rho)
