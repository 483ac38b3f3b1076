"""
The exact one dimensional dual charge: unit point charges at the unit mass
quantiles of the density.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Self

import numpy as np
from scipy import optimize

from dualcharge.kernels import Dimension, FloatArray, as_points, cost
from dualcharge.model.basis import segment_potential
from dualcharge.model.density import Density, Interval
from dualcharge.model.energy import QUAD_RTOL, quad

if TYPE_CHECKING:
    import numpy.typing as npt

QUANTILE_XTOL = 1e-10


@dataclass(frozen=True, slots=True)
class ProfileDensity1D:
    """
    A one dimensional density given by an arbitrary profile, used as an
    oracle input only
    """

    shape: Callable[[float], float]
    """The density profile on `[lower, upper]`"""
    lower: float
    upper: float
    n_electrons: int
    """Total integral of the profile"""
    breaks: tuple[float, ...] = ()
    """Points where the profile is not smooth"""
    d: Dimension = field(default=Dimension.LINE, init=False)

    def __post_init__(self) -> None:
        if not self.upper > self.lower:
            msg = f"Empty interval [{self.lower}, {self.upper}]"
            raise ValueError(msg)

    @classmethod
    def scaled(
        cls,
        shape: Callable[[float], float],
        lower: float,
        upper: float,
        n_electrons: int,
        breaks: tuple[float, ...] = (),
    ) -> Self:
        """
        Rescale a non-negative profile to integrate to `n_electrons`
        """
        total = quad(shape, lower, upper, points=list(breaks))
        if not total > 0:
            msg = "The profile must have positive mass"
            raise ValueError(msg)
        factor = n_electrons / total
        return cls(lambda x: factor * shape(x), lower, upper, n_electrons, breaks)

    @property
    def bounds(self) -> tuple[float, float]:
        """The support interval"""
        return self.lower, self.upper

    def profile(self, x: float) -> float:
        """The density at `x`, zero off the support"""
        if x < self.lower or x > self.upper:
            return 0.0
        return float(self.shape(x))

    def cdf(self, x: float) -> float:
        """Mass to the left of `x`"""
        upper = min(max(x, self.lower), self.upper)
        if upper == self.lower:
            return 0.0
        return quad(self.shape, self.lower, upper, points=list(self.breaks))


type Density1D = Density | ProfileDensity1D


def _bounds(rho: Density1D) -> tuple[float, float]:
    if isinstance(rho, ProfileDensity1D):
        return rho.bounds
    if not isinstance(rho.support, Interval):
        msg = "The comb solution needs a one dimensional density"
        raise ValueError(msg)  # noqa: TRY004
    return rho.support.lower, rho.support.upper


@dataclass(frozen=True, slots=True)
class Comb1D:
    """
    Unit point charges at the breakpoints `l_1 < ... < l_{N-1}`
    """

    breakpoints: tuple[float, ...]
    d: Dimension = field(default=Dimension.LINE, init=False)

    def __post_init__(self) -> None:
        if not self.breakpoints:
            msg = "A comb needs at least one breakpoint"
            raise ValueError(msg)
        if any(b <= a for a, b in itertools.pairwise(self.breakpoints)):
            msg = f"Breakpoints must be strictly increasing, got {self.breakpoints}"
            raise ValueError(msg)

    @property
    def mass(self) -> float:
        """One unit per breakpoint, `N - 1`"""
        return float(len(self.breakpoints))

    def potential(self, points: npt.ArrayLike) -> FloatArray:
        """
        `-sum |r - l_i|`

        :param points: Array of shape `(..., 1)` or scalars
        """
        x = as_points(points, self.d)
        return -np.abs(x - np.asarray(self.breakpoints)).sum(axis=-1)

    def potential_gradient(self, points: npt.ArrayLike) -> FloatArray:
        """
        `-sum sgn(r - l_i)`, shape `(..., 1)`
        """
        x = as_points(points, self.d)
        slope = -np.sign(x - np.asarray(self.breakpoints)).sum(axis=-1)
        return slope[..., np.newaxis]

    def integrate_against(self, rho: Density1D) -> float:
        """`int v rho`, in closed form for uniform densities"""
        lower, upper = _bounds(rho)
        ells = np.asarray(self.breakpoints)
        if isinstance(rho, Density):
            values = segment_potential(np.float64(lower), np.float64(upper), ells)
            return float(rho.height * values.sum())

        return quad(
            lambda x: rho.profile(x) * float(self.potential(x)),
            lower,
            upper,
            points=[*self.breakpoints, *rho.breaks],
        )


def breakpoints(rho: Density1D) -> Comb1D:
    """
    The unit mass quantiles of a one dimensional density

    :param rho: The density, integrating to N
    :raises ValueError: When the density does not integrate to N
    :return: The comb of N - 1 breakpoints
    """
    lower, upper = _bounds(rho)
    total = rho.cdf(upper)
    if not math.isclose(total, rho.n_electrons, rel_tol=QUAD_RTOL):
        msg = f"The density integrates to {total}, expected {rho.n_electrons}"
        raise ValueError(msg)

    ells = []
    left = lower
    for k in range(1, rho.n_electrons):
        ell = optimize.brentq(
            lambda x, k=k: rho.cdf(x) - k,
            left,
            upper,
            xtol=QUANTILE_XTOL,
        )
        ells.append(float(ell))
        left = ell
    return Comb1D(tuple(ells))


def comb_potential(comb: Comb1D, points: npt.ArrayLike) -> FloatArray:
    """
    `v(r) = -sum |r - l_i|`
    """
    return comb.potential(points)


def cyclic_map(rho: Density) -> Callable[[FloatArray], FloatArray]:
    """
    The optimal transport map of a uniform one dimensional density: a shift
    by one unit of mass, wrapped cyclically around the support

    :param rho: A uniform one dimensional density
    :return: The map, acting elementwise on coordinates
    """
    lower, upper = _bounds(rho)
    width = upper - lower
    cell = width / rho.n_electrons

    def transport(x: FloatArray) -> FloatArray:
        return lower + np.mod(np.asarray(x) - lower + cell, width)

    return transport


def exact_1d_energy(rho: Density) -> float:
    """
    The optimal Coulomb energy of a uniform one dimensional density,
    integrated along the cyclic transport plan

    :param rho: A uniform one dimensional density
    :return: `int c(x, t(x), ..., t^{N-1}(x)) rho(x) / N dx`
    """
    lower, upper = _bounds(rho)
    transport = cyclic_map(rho)
    n = rho.n_electrons

    def plan_cost(x: float) -> float:
        orbit = [x]
        for _ in range(n - 1):
            orbit.append(float(transport(orbit[-1])))
        return float(cost(Dimension.LINE, np.asarray(orbit)[:, np.newaxis]))

    edges = list(np.linspace(lower, upper, n + 1)[1:-1])
    return rho.height / n * quad(plan_cost, lower, upper, points=edges)
