"""
Unadjusted Langevin dynamics for the canonical ensemble of N particles in
an external potential, confined to the support of the target density by
mirror reflection.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, replace
from enum import StrEnum, auto
from typing import TYPE_CHECKING, Self

import numpy as np

from dualcharge.kernels import FloatArray, pair_energy_gradient

if TYPE_CHECKING:
    from dualcharge.model.charge import ExternalPotential
    from dualcharge.model.density import Density

logger = logging.getLogger(__name__)

DEFAULT_ETA_SCALE = 1e-3
"""Default step size relative to the squared support diameter"""
DEFAULT_ALPHA_SCALE = 1e-3
"""Default truncation distance relative to the support diameter"""
MAX_NOISE_FRACTION = 0.05
"""Largest default noise amplitude per step relative to the support half width"""


class Boundary(StrEnum):
    """
    Boundary treatment of the support
    """

    REFLECT = auto()
    """Mirror reflection at the support boundary"""


class SamplerDivergenceError(RuntimeError):
    """
    Raised when a Langevin step produces non-finite positions
    """

    def __init__(self, msg: str, step: int, chains: tuple[int, ...]) -> None:
        super().__init__(msg)
        self.step = step
        """The step counter at which the chains diverged"""
        self.chains = chains
        """Indices of the diverged chains"""


@dataclass(frozen=True, slots=True)
class SamplerConfig:
    """
    Settings of the Langevin sampler
    """

    beta: float
    """Inverse temperature"""
    eta: float | None = None
    """Step size, defaults to `1e-3 * diam^2`, lowered so that one step of noise
    `sqrt(2 eta / beta)` stays below a twentieth of the support half width"""
    n_chains: int = 8
    """Number of independent chains"""
    burn_in: int = 10_000
    """Discarded steps per chain"""
    n_steps: int = 100_000
    """Retained steps per chain, before thinning"""
    thin: int = 10
    """Keep one state every `thin` steps"""
    seed: int = 0
    """Root seed of the per-chain random streams"""
    boundary: Boundary = Boundary.REFLECT
    """Boundary treatment"""
    alpha: float | None = None
    """Truncation distance of the pair force in three dimensions,
    defaults to `1e-3 * diam`"""
    interaction: bool = True
    """Include the pair interaction, disable for free particles"""
    noise: bool = True
    """Include the Brownian term, disable for deterministic gradient flow"""

    def __post_init__(self) -> None:
        checks = (
            (self.beta > 0, f"beta must be positive, got {self.beta}"),
            (self.eta is None or self.eta > 0, f"eta must be positive, got {self.eta}"),
            (self.n_chains >= 1, f"n_chains must be at least 1, got {self.n_chains}"),
            (self.burn_in >= 0, f"burn_in must be non-negative, got {self.burn_in}"),
            (self.n_steps >= 1, f"n_steps must be at least 1, got {self.n_steps}"),
            (self.thin >= 1, f"thin must be at least 1, got {self.thin}"),
            (self.seed >= 0, f"seed must be non-negative, got {self.seed}"),
            (
                self.alpha is None or self.alpha > 0,
                f"alpha must be positive, got {self.alpha}",
            ),
        )
        for valid, msg in checks:
            if not valid:
                raise ValueError(msg)

    @property
    def n_kept(self) -> int:
        """Retained states per chain"""
        return self.n_steps // self.thin

    def resolve(self, rho: Density) -> Self:
        """
        Fill the support dependent defaults

        :param rho: The target density
        :return: A config with `eta` and `alpha` set
        """
        eta = self.eta
        if eta is None:
            eta = DEFAULT_ETA_SCALE * rho.diameter**2
            if self.noise:
                half_width = rho.diameter / 2.0
                eta = min(eta, 0.5 * self.beta * (MAX_NOISE_FRACTION * half_width) ** 2)
        alpha = self.alpha
        if alpha is None:
            alpha = DEFAULT_ALPHA_SCALE * rho.diameter
        return replace(self, eta=eta, alpha=alpha)


def chain_rng(seed: int, index: int) -> np.random.Generator:
    """
    The counter based random stream of one chain

    :param seed: The root seed
    :param index: The chain (or start) index
    :return: A Philox generator keyed by `(seed, index)`
    """
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,)))
    )


@dataclass(frozen=True, slots=True, eq=False)
class ParticleSystem:
    """
    The state of a batch of Langevin chains.

    The generators advance in place as noise is drawn.
    """

    positions: FloatArray
    """Particle positions, shape `(C, N, d)`"""
    density: Density
    """The target density, its support confines the particles"""
    rngs: tuple[np.random.Generator, ...]
    """One random stream per chain"""
    step: int = 0
    """Number of steps taken"""

    @classmethod
    def initialize(cls, rho: Density, seed: int, chains: Sequence[int]) -> Self:
        """
        Independent uniform initial configurations

        :param rho: The target density
        :param seed: The root seed
        :param chains: The global indices of the chains in this batch
        :return: The initial state
        """
        rngs = tuple(chain_rng(seed, index) for index in chains)
        positions = np.stack([rho.sample_uniform(rng, rho.n_electrons) for rng in rngs])
        return cls(positions, rho, rngs)

    @property
    def n_chains(self) -> int:
        """Number of chains in the batch"""
        return len(self.rngs)

    def draw_noise(self, steps: int) -> FloatArray:
        """
        Standard Gaussian increments for the next `steps` steps

        :return: Array of shape `(steps, C, N, d)`
        """
        shape = (steps, *self.positions.shape[1:])
        return np.stack([rng.standard_normal(shape) for rng in self.rngs], axis=1)


def drift(
    positions: FloatArray,
    charge: ExternalPotential,
    cfg: SamplerConfig,
) -> FloatArray:
    """
    The force `-grad c_alpha + grad v` on every particle
    """
    force = charge.potential_gradient(positions)
    if cfg.interaction:
        force = force - pair_energy_gradient(charge.d, positions, cfg.alpha)
    return force


def langevin_step(
    state: ParticleSystem,
    charge: ExternalPotential,
    cfg: SamplerConfig,
    noise: FloatArray | None = None,
) -> ParticleSystem:
    """
    One reflected Langevin step of every chain

    :param state: The current state
    :param charge: The external potential
    :param cfg: The resolved sampler settings
    :param noise: Standard Gaussian increments of shape `(C, N, d)`, drawn
    from the chain streams when omitted
    :raises SamplerDivergenceError: When a chain leaves the finite range
    :return: The next state
    """
    if cfg.eta is None:
        msg = "The sampler settings must be resolved before stepping"
        raise ValueError(msg)

    moved = state.positions + cfg.eta * drift(state.positions, charge, cfg)
    if cfg.noise:
        if noise is None:
            noise = state.draw_noise(1)[0]
        moved += math.sqrt(2.0 * cfg.eta / cfg.beta) * noise

    finite = np.isfinite(moved).all(axis=(-2, -1))
    if not finite.all():
        chains = tuple(int(i) for i in np.flatnonzero(~finite))
        msg = (
            f"Langevin step {state.step + 1} produced non-finite positions in chains "
            f"{chains}, the step size {cfg.eta} is too large"
        )
        raise SamplerDivergenceError(msg, state.step + 1, chains)

    return replace(
        state,
        positions=state.density.reflect(moved),
        step=state.step + 1,
    )
