"""
Dual charges `rho_ext[nu] = sum nu_i rho_i` and the external potentials
they generate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Protocol, Self, runtime_checkable

import numpy as np

from dualcharge.kernels import Dimension, FloatArray
from dualcharge.model.energy import reference_moments

if TYPE_CHECKING:
    import numpy.typing as npt

    from dualcharge.model.basis import BasisElement, BasisSet
    from dualcharge.model.density import Density


@runtime_checkable
class ExternalPotential(Protocol):
    """
    An external one-body potential seen by every particle
    """

    @property
    def d(self) -> Dimension:
        """The space dimension"""
        ...

    def potential(self, points: npt.ArrayLike) -> FloatArray:
        """Potential values, shape `(...)` for points of shape `(..., d)`"""
        ...

    def potential_gradient(self, points: npt.ArrayLike) -> FloatArray:
        """Potential gradients, shape `(..., d)`"""
        ...

    def integrate_against(self, rho: Density) -> float:
        """`int v rho`"""
        ...


@dataclass(frozen=True, slots=True, eq=False)
class DualCharge:
    """
    A dual charge discretized on a basis set
    """

    basis: BasisSet
    """The basis elements `rho_i`"""
    weights: FloatArray
    """The multipliers `nu_i`, stored read-only"""

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=np.float64)
        if weights.shape != (len(self.basis),):
            msg = f"Expected {len(self.basis)} weights, got shape {weights.shape}"
            raise ValueError(msg)
        if not np.all(np.isfinite(weights)):
            msg = "Dual charge weights must be finite"
            raise ValueError(msg)

        weights.flags.writeable = False
        object.__setattr__(self, "weights", weights)

    @classmethod
    def zeros(cls, basis: BasisSet) -> Self:
        """The vanishing charge on `basis`"""
        return cls(basis, np.zeros(len(basis)))

    def with_weights(self, weights: npt.ArrayLike) -> Self:
        """
        The same basis with new weights
        """
        return type(self)(self.basis, np.asarray(weights, dtype=np.float64))

    @property
    def d(self) -> Dimension:
        """The space dimension"""
        return self.basis.d

    @property
    def mass(self) -> float:
        """`sum nu_i m_i`"""
        return float(self.weights @ self.basis.masses)

    def potential(self, points: npt.ArrayLike) -> FloatArray:
        """
        `v[nu]` at the given points

        :param points: Array of shape `(..., d)`
        :return: Array of shape `(...)`
        """
        return self.basis.weighted_potential(self.weights, points)

    def potential_gradient(self, points: npt.ArrayLike) -> FloatArray:
        """
        `grad v[nu]` at the given points

        :param points: Array of shape `(..., d)`
        :return: Array of shape `(..., d)`
        """
        return self.basis.weighted_force(self.weights, points)

    def integrate_against(self, rho: Density) -> float:
        """`int v[nu] rho`, through the cached `D(rho_i, rho)` table"""
        return float(self.weights @ reference_moments(self.basis, rho))

    def pieces(self) -> list[tuple[float, BasisElement]]:
        """The weighted basis elements"""
        return [
            (float(weight), element)
            for weight, element in zip(self.weights, self.basis.elements, strict=True)
        ]


@dataclass(frozen=True, slots=True)
class ShiftedPotential:
    """
    An external potential plus a constant
    """

    base: ExternalPotential
    shift: float

    @property
    def d(self) -> Dimension:
        """The space dimension"""
        return self.base.d

    def potential(self, points: npt.ArrayLike) -> FloatArray:
        """The shifted potential"""
        return self.base.potential(points) + self.shift

    def potential_gradient(self, points: npt.ArrayLike) -> FloatArray:
        """Unchanged by the shift"""
        return self.base.potential_gradient(points)

    def integrate_against(self, rho: Density) -> float:
        """Picks up `N * shift`"""
        return self.base.integrate_against(rho) + rho.n_electrons * self.shift


def potential(charge: ExternalPotential, points: npt.ArrayLike) -> FloatArray:
    """
    Evaluate an external potential

    :param charge: The dual charge or other external potential
    :param points: Array of shape `(..., d)`
    :return: Array of shape `(...)`
    """
    return charge.potential(points)


def potential_gradient(charge: ExternalPotential, points: npt.ArrayLike) -> FloatArray:
    """
    Evaluate the gradient of an external potential

    :param charge: The dual charge or other external potential
    :param points: Array of shape `(..., d)`
    :return: Array of shape `(..., d)`
    """
    return charge.potential_gradient(points)


def charge_mass(charge: DualCharge) -> float:
    """
    Total mass `sum nu_i m_i` of a dual charge
    """
    return charge.mass


def external_term(charge: ExternalPotential, rho: Density) -> float:
    """
    `int v rho`, the linear part of the dual objective.

    Dual charges sum their precomputed `D(rho_i, rho)` table.

    :param charge: The dual charge or other external potential
    :param rho: The target density
    :return: The integral
    """
    return float(charge.integrate_against(rho))
