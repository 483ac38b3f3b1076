"""
Monte-Carlo averages over the Langevin chains: the moments
`D(rho_i, rho[nu])` and particle density histograms.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from functools import partial
from typing import TYPE_CHECKING

import numpy as np

from dualcharge import ctx
from dualcharge.kernels import Dimension, FloatArray
from dualcharge.sampler.langevin import ParticleSystem, SamplerConfig, langevin_step
from dualcharge.utils.asyncio import partition, run_jobs

if TYPE_CHECKING:
    from dualcharge.model.basis import BasisSet
    from dualcharge.model.charge import ExternalPotential
    from dualcharge.model.density import Density

logger = logging.getLogger(__name__)

N_BATCHES = 10
"""Batches per chain used for single chain error estimates"""
NOISE_BLOCK = 1024
"""Steps of noise drawn at once"""

type Observable = Callable[[FloatArray], FloatArray]
"""Maps positions `(C, N, d)` to per-chain observations `(C, K)`"""


@dataclass(frozen=True, slots=True, eq=False)
class ChainAverages:
    """
    Batch averages of an observable along every chain
    """

    batch_means: FloatArray
    """Shape `(C, B, K)`"""
    batch_sizes: FloatArray
    """Retained states per batch, shape `(B,)`"""

    @property
    def n_samples(self) -> int:
        """Total number of retained states"""
        return int(self.batch_sizes.sum()) * self.batch_means.shape[0]

    @property
    def chain_means(self) -> FloatArray:
        """Per-chain averages, shape `(C, K)`"""
        weights = self.batch_sizes / self.batch_sizes.sum()
        return np.einsum("cbk,b->ck", self.batch_means, weights)

    @property
    def mean(self) -> FloatArray:
        """Grand average, shape `(K,)`"""
        return self.chain_means.mean(axis=0)

    @property
    def std_errors(self) -> FloatArray:
        """
        Standard error of the grand average, from the spread between chains,
        or between batches when there is a single chain
        """
        chain_means = self.chain_means
        if chain_means.shape[0] > 1:
            groups = chain_means
        else:
            groups = self.batch_means[0, self.batch_sizes > 0]

        if groups.shape[0] < 2:  # noqa: PLR2004
            return np.zeros(chain_means.shape[1])
        return groups.std(axis=0, ddof=1) / math.sqrt(groups.shape[0])


def _batch_of(n_kept: int, n_batches: int) -> np.ndarray:
    return np.arange(n_kept) * n_batches // n_kept


def _run_chain_group(
    chains: range,
    charge: ExternalPotential,
    rho: Density,
    cfg: SamplerConfig,
    observable: Observable,
) -> FloatArray:
    """
    Run a contiguous group of chains and return their batch sums `(G, B, K)`
    """
    state = ParticleSystem.initialize(rho, cfg.seed, chains)
    n_kept = cfg.n_kept
    n_batches = min(N_BATCHES, n_kept)
    batch_of = _batch_of(n_kept, n_batches)
    sums: FloatArray | None = None
    kept = 0

    total = cfg.burn_in + cfg.n_steps
    done = 0
    while done < total:
        block = min(NOISE_BLOCK, total - done)
        noise = state.draw_noise(block) if cfg.noise else None
        for k in range(block):
            step_noise = None if noise is None else noise[k]
            state = langevin_step(state, charge, cfg, step_noise)
            sampled = done + k + 1 - cfg.burn_in
            if sampled <= 0 or sampled % cfg.thin != 0 or kept >= n_kept:
                continue

            value = observable(state.positions)
            if sums is None:
                sums = np.zeros((state.n_chains, n_batches, value.shape[-1]))
            sums[:, batch_of[kept]] += value
            kept += 1
        done += block

    logger.debug("Chains %s finished %d steps", chains, state.step)
    if sums is None:
        msg = "No state was retained, n_steps must be at least thin"
        raise ValueError(msg)
    return sums


def run_chains(
    charge: ExternalPotential,
    rho: Density,
    cfg: SamplerConfig,
    observable: Observable,
) -> ChainAverages:
    """
    Run all chains, split over the configured workers, and average an
    observable over the retained states.

    Each chain owns the random stream keyed by its global index, so the
    result does not depend on the worker count.

    :param charge: The external potential
    :param rho: The target density
    :param cfg: The sampler settings
    :param observable: The per-state observation
    :return: The batch averages
    """
    cfg = cfg.resolve(rho)
    groups = partition(cfg.n_chains, ctx.get_workers())
    jobs = [
        partial(_run_chain_group, group, charge, rho, cfg, observable)
        for group in groups
    ]
    sums = np.concatenate(run_jobs(jobs), axis=0)

    n_batches = sums.shape[1]
    batch_sizes = np.bincount(_batch_of(cfg.n_kept, n_batches), minlength=n_batches)
    batch_sizes = batch_sizes.astype(np.float64)
    return ChainAverages(sums / batch_sizes[np.newaxis, :, np.newaxis], batch_sizes)


@dataclass(frozen=True, slots=True, eq=False)
class MomentEstimate:
    """
    Monte-Carlo estimates of `D(rho_i, rho[nu])`
    """

    values: FloatArray
    """The estimates, shape `(M,)`"""
    std_errors: FloatArray
    """Their standard errors, shape `(M,)`"""
    n_samples: int
    """Number of retained states over all chains"""


def moment_observable(basis: BasisSet) -> Observable:
    """
    The observable `sum_j rho_i * k (r_j)` for every basis element
    """

    def observe(positions: FloatArray) -> FloatArray:
        return basis.potentials(positions).sum(axis=-2)

    return observe


def estimate_moments(
    charge: ExternalPotential,
    rho: Density,
    cfg: SamplerConfig,
    basis: BasisSet | None = None,
) -> MomentEstimate:
    """
    Estimate `D(rho_i, rho[nu])` as canonical averages of
    `sum_j (rho_i * k)(r_j)`.

    :param charge: The dual charge, or another external potential
    :param rho: The target density
    :param cfg: The sampler settings
    :param basis: The basis to measure, defaults to the basis of the charge
    :return: The estimates with between-chain standard errors
    """
    if basis is None:
        basis = charge.basis  # type: ignore[attr-defined]

    averages = run_chains(charge, rho, cfg, moment_observable(basis))
    return MomentEstimate(averages.mean, averages.std_errors, averages.n_samples)


@dataclass(frozen=True, slots=True, eq=False)
class DensityHistogram:
    """
    Histogram of the one-particle density, normalized to integrate to N
    """

    edges: FloatArray
    """Bin edges, coordinates in one dimension and radii in three"""
    values: FloatArray
    """Density value in every bin"""
    std_errors: FloatArray
    """Standard errors of the values"""
    measures: FloatArray
    """Length (1D) or shell volume (3D) of every bin"""

    @property
    def centers(self) -> FloatArray:
        """Bin midpoints"""
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def total(self) -> float:
        """Integral of the histogram"""
        return float(self.values @ self.measures)


def density_histogram(
    charge: ExternalPotential,
    rho: Density,
    cfg: SamplerConfig,
    bins: int,
) -> DensityHistogram:
    """
    Linear (1D) or radial (3D) histogram of the particle positions under
    the canonical ensemble

    :param charge: The external potential
    :param rho: The target density
    :param cfg: The sampler settings
    :param bins: The number of bins
    :return: The histogram, integrating to N
    """
    if bins < 1:
        msg = f"bins must be at least 1, got {bins}"
        raise ValueError(msg)

    if rho.d is Dimension.LINE:
        lower, upper = rho.support
        edges = np.linspace(lower, upper, bins + 1)
        measures = np.diff(edges)
    else:
        edges = np.linspace(0.0, rho.support.radius, bins + 1)
        measures = 4.0 * math.pi / 3.0 * np.diff(edges**3)

    def observe(positions: FloatArray) -> FloatArray:
        if rho.d is Dimension.LINE:
            coord = positions[..., 0]
        else:
            coord = np.linalg.norm(positions, axis=-1)
        index = np.clip(np.searchsorted(edges, coord, side="right") - 1, 0, bins - 1)
        counts = np.zeros((positions.shape[0], bins))
        np.add.at(counts, (np.arange(positions.shape[0])[:, np.newaxis], index), 1.0)
        return counts

    averages = run_chains(charge, rho, cfg, observe)
    return DensityHistogram(
        edges,
        averages.mean / measures,
        averages.std_errors / measures,
        measures,
    )
