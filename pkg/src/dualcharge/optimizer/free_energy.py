"""
Importance sampling estimates of the canonical free energy
`F_beta(v) = -ln z_beta(v) / beta` from uniform product samples.

Only practical for small `beta * N`, these estimators serve as
diagnostics and as finite difference references for the gradient.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, NamedTuple

import numpy as np
from scipy import special

from dualcharge.kernels import Dimension, FloatArray, pair_energy
from dualcharge.model.charge import external_term
from dualcharge.sampler.langevin import DEFAULT_ALPHA_SCALE, chain_rng

if TYPE_CHECKING:
    import numpy.typing as npt

    from dualcharge.model.charge import ExternalPotential
    from dualcharge.model.density import Density

logger = logging.getLogger(__name__)

MIN_ESS = 10.0
"""Smallest accepted effective sample size"""
CHUNK = 65_536
"""Configurations evaluated at once"""


class DegenerateWeightsError(RuntimeError):
    """
    Raised when the importance weights collapse onto too few samples
    """

    def __init__(self, msg: str, ess: float) -> None:
        super().__init__(msg)
        self.ess = ess
        """The effective sample size"""


class FreeEnergyEstimate(NamedTuple):
    """
    A Monte-Carlo estimate with its standard error
    """

    value: float
    std_error: float
    ess: float
    """Effective sample size of the importance weights"""


def _resolve_alpha(rho: Density, alpha: float | None) -> float | None:
    if rho.d is Dimension.LINE:
        return None
    return alpha if alpha is not None else DEFAULT_ALPHA_SCALE * rho.diameter


def _log_mean_exp(log_weights: FloatArray, beta: float) -> FreeEnergyEstimate:
    """
    `-ln mean exp(log_weights) / beta` with a delta method error
    """
    n = log_weights.size
    log_mean = float(special.logsumexp(log_weights)) - math.log(n)

    weights = np.exp(log_weights - log_weights.max())
    ess = float(weights.sum() ** 2 / (weights**2).sum())
    if ess < MIN_ESS:
        msg = (
            f"Importance weights are degenerate (effective sample size {ess:.2f} "
            f"of {n}), lower beta or raise n_samples"
        )
        raise DegenerateWeightsError(msg, ess)

    rel_error = weights.std(ddof=1) / (math.sqrt(n) * weights.mean())
    return FreeEnergyEstimate(-log_mean / beta, rel_error / beta, ess)


def _uniform_configurations(
    rho: Density,
    rng: np.random.Generator,
    count: int,
    n_particles: int,
) -> FloatArray:
    points = rho.sample_uniform(rng, count * n_particles)
    return points.reshape(count, n_particles, int(rho.d))


def free_energy_estimate(
    charge: ExternalPotential,
    rho: Density,
    beta: float,
    n_samples: int,
    seed: int,
    alpha: float | None = None,
) -> FreeEnergyEstimate:
    """
    Estimate `F_beta(v) = -ln E[exp(-beta (c_alpha - sum v(r_i)))] / beta`
    under independent uniform particles on the support.

    :param charge: The external potential `v`
    :param rho: The target density
    :param beta: The inverse temperature
    :param n_samples: The number of product samples
    :param seed: The seed of the sample stream
    :param alpha: The truncation distance in three dimensions, defaults to
    `1e-3 * diam`
    :raises DegenerateWeightsError: When the effective sample size is below 10
    :return: The estimate, its standard error and the effective sample size
    """
    if beta <= 0 or n_samples < 2:  # noqa: PLR2004
        msg = "beta must be positive and n_samples at least 2"
        raise ValueError(msg)

    alpha = _resolve_alpha(rho, alpha)
    rng = chain_rng(seed, 0)
    chunks = []
    for start in range(0, n_samples, CHUNK):
        count = min(CHUNK, n_samples - start)
        configs = _uniform_configurations(rho, rng, count, rho.n_electrons)
        energy = pair_energy(rho.d, configs, alpha) - charge.potential(configs).sum(-1)
        chunks.append(-beta * energy)

    return _log_mean_exp(np.concatenate(chunks), beta)


def objective_estimate(
    charge: ExternalPotential,
    rho: Density,
    beta: float,
    n_samples: int,
    seed: int,
    alpha: float | None = None,
) -> FreeEnergyEstimate:
    """
    The dual objective `G = F_beta(v) + int v rho`, with the standard error of
    the free energy part

    :return: The estimate
    """
    estimate = free_energy_estimate(charge, rho, beta, n_samples, seed, alpha)
    return estimate._replace(value=estimate.value + external_term(charge, rho))


def gauge_shift(
    charge: ExternalPotential,
    rho: Density,
    beta: float,
    n_samples: int,
    seed: int,
    alpha: float | None = None,
) -> float:
    """
    The constant `s` with `z_beta(v + s) = N`

    :return: The shift
    """
    estimate = free_energy_estimate(charge, rho, beta, n_samples, seed, alpha)
    n = rho.n_electrons
    return (math.log(n) + beta * estimate.value) / (beta * n)


def fixed_point_potential(
    charge: ExternalPotential,
    rho: Density,
    beta: float,
    points: npt.ArrayLike,
    n_samples: int,
    seed: int,
    alpha: float | None = None,
) -> FloatArray:
    """
    Evaluate the right hand side of the self-consistency equation of the
    optimal potential,
    `-ln E[exp(-beta (c(r, r_2, ..., r_N) - sum_{i >= 2} v(r_i)))] / beta`,
    with the remaining particles uniform on the support.

    At the optimum this reproduces `v` up to an additive constant. The same
    samples are used at every point.

    :param charge: The external potential `v`
    :param rho: The target density
    :param beta: The inverse temperature
    :param points: Evaluation points, shape `(K, d)`
    :param n_samples: Samples of the remaining `N - 1` particles
    :param seed: The seed of the sample stream
    :param alpha: The truncation distance in three dimensions
    :return: Array of shape `(K,)`
    """
    alpha = _resolve_alpha(rho, alpha)
    pts = np.asarray(points, dtype=np.float64).reshape(-1, int(rho.d))
    rng = chain_rng(seed, 1)
    others = _uniform_configurations(rho, rng, n_samples, rho.n_electrons - 1)
    external = charge.potential(others).sum(-1)

    values = np.empty(pts.shape[0])
    for k, point in enumerate(pts):
        configs = np.concatenate(
            [np.broadcast_to(point, (n_samples, 1, pts.shape[1])), others], axis=1
        )
        energy = pair_energy(rho.d, configs, alpha) - external
        values[k] = _log_mean_exp(-beta * energy, beta).value

    logger.debug("Evaluated the fixed point potential at %d points", pts.shape[0])
    return values
