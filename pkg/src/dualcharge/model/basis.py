"""
Basis elements for the discretized dual charge.

Every element carries the indicator density of its support: a segment in
one dimension, a concentric shell in three dimensions. Potentials are the
exact convolutions of that indicator with the Coulomb kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import pairwise
from typing import TYPE_CHECKING, Protocol, Self

import numpy as np

from dualcharge.kernels import Dimension, FloatArray, as_points

if TYPE_CHECKING:
    import numpy.typing as npt

_FOUR_THIRDS_PI = 4.0 * math.pi / 3.0


class BasisElement(Protocol):
    """
    Protocol shared by the basis element types
    """

    d: Dimension
    """The space dimension of the element"""

    @property
    def mass(self) -> float:
        """Total mass of the element's indicator density"""
        ...

    @property
    def bounds(self) -> tuple[float, float]:
        """Lower and upper coordinate (or radius) of the support"""
        ...

    def potential(self, points: npt.ArrayLike) -> FloatArray:
        """Exact Coulomb potential of the element"""
        ...

    def force(self, points: npt.ArrayLike) -> FloatArray:
        """Gradient of the element's potential"""
        ...

    def pieces(self) -> list[tuple[float, BasisElement]]:
        """Decomposition into weighted uniform pieces"""
        ...


def segment_potential(
    lower: FloatArray,
    upper: FloatArray,
    x: FloatArray,
) -> FloatArray:
    """
    `-int_lower^upper |x - s| ds`, broadcast over all arguments
    """
    left = x - lower
    right = x - upper
    return -0.5 * (left * np.abs(left) - right * np.abs(right))


def segment_force(lower: FloatArray, upper: FloatArray, x: FloatArray) -> FloatArray:
    """
    Derivative of `segment_potential` with respect to `x`
    """
    return -(np.abs(x - lower) - np.abs(x - upper))


def ball_potential(radius: FloatArray, r: FloatArray) -> FloatArray:
    """
    Potential of a ball of unit charge density at distance `r` from its
    center (Newton's theorem)

    Broadcasts over `radius` and `r`; a zero radius gives zero.
    """
    charge = _FOUR_THIRDS_PI * radius**3
    inside = r < radius
    safe_r = np.where(inside | (r == 0.0), 1.0, r)
    safe_radius = np.where(radius > 0.0, radius, 1.0)
    interior = charge * (3.0 * radius**2 - r**2) / (2.0 * safe_radius**3)
    return np.where(inside, interior, np.where(r == 0.0, 0.0, charge / safe_r))


def ball_field_factor(radius: FloatArray, r: FloatArray) -> FloatArray:
    """
    Factor `f` such that the gradient of `ball_potential` at the point `x`
    with `|x| = r` is `f * x`
    """
    inside = r < radius
    safe_r = np.where(r > 0.0, r, 1.0)
    exterior = np.where(r > 0.0, -_FOUR_THIRDS_PI * radius**3 / safe_r**3, 0.0)
    return np.where(inside, -_FOUR_THIRDS_PI, exterior)


@dataclass(frozen=True, slots=True)
class Segment:
    """
    Indicator density of the segment `[lower, upper]`
    """

    lower: float
    upper: float
    d: Dimension = field(default=Dimension.LINE, init=False)

    def __post_init__(self) -> None:
        if not self.upper > self.lower:
            msg = f"Segment must have positive length, got [{self.lower}, {self.upper}]"
            raise ValueError(msg)

    @property
    def mass(self) -> float:
        """Length of the segment"""
        return self.upper - self.lower

    @property
    def bounds(self) -> tuple[float, float]:
        """The segment end points"""
        return self.lower, self.upper

    def potential(self, points: npt.ArrayLike) -> FloatArray:
        """
        `-int |r - s| ds` over the segment

        :param points: Array of shape `(..., 1)` or scalars
        :return: Array of shape `(...)`
        """
        x = as_points(points, self.d)[..., 0]
        return segment_potential(np.float64(self.lower), np.float64(self.upper), x)

    def force(self, points: npt.ArrayLike) -> FloatArray:
        """
        Gradient of the segment potential

        :return: Array of shape `(..., 1)`
        """
        x = as_points(points, self.d)
        return segment_force(np.float64(self.lower), np.float64(self.upper), x)

    def pieces(self) -> list[tuple[float, BasisElement]]:
        """The segment itself with unit weight"""
        return [(1.0, self)]


@dataclass(frozen=True, slots=True)
class Shell:
    """
    Unit density on the concentric shell `inner <= |r| < outer`; a zero
    inner radius gives a ball.
    """

    inner: float
    outer: float
    d: Dimension = field(default=Dimension.SPACE, init=False)

    def __post_init__(self) -> None:
        if self.inner < 0 or not self.outer > self.inner:
            msg = f"Invalid shell radii [{self.inner}, {self.outer})"
            raise ValueError(msg)

    @property
    def mass(self) -> float:
        """Volume of the shell"""
        return _FOUR_THIRDS_PI * (self.outer**3 - self.inner**3)

    @property
    def bounds(self) -> tuple[float, float]:
        """The inner and outer radii"""
        return self.inner, self.outer

    def potential(self, points: npt.ArrayLike) -> FloatArray:
        """
        Potential of the shell as the difference of two uniform balls

        :param points: Array of shape `(..., 3)`
        :return: Array of shape `(...)`
        """
        r = np.linalg.norm(as_points(points, self.d), axis=-1)
        return ball_potential(np.float64(self.outer), r) - ball_potential(
            np.float64(self.inner), r
        )

    def force(self, points: npt.ArrayLike) -> FloatArray:
        """
        Gradient of the shell potential

        :return: Array of shape `(..., 3)`
        """
        x = as_points(points, self.d)
        r = np.linalg.norm(x, axis=-1, keepdims=True)
        factor = ball_field_factor(np.float64(self.outer), r) - ball_field_factor(
            np.float64(self.inner), r
        )
        return factor * x

    def pieces(self) -> list[tuple[float, BasisElement]]:
        """The shell itself with unit weight"""
        return [(1.0, self)]


def basis_potential(element: BasisElement, points: npt.ArrayLike) -> FloatArray:
    """
    Exact Coulomb potential of a basis element

    :param element: The basis element
    :param points: The evaluation points
    :return: The potential values
    """
    return element.potential(points)


def basis_force(element: BasisElement, points: npt.ArrayLike) -> FloatArray:
    """
    Gradient of `basis_potential`

    :param element: The basis element
    :param points: The evaluation points
    :return: The gradient vectors
    """
    return element.force(points)


@dataclass(frozen=True, slots=True)
class BasisSet:
    """
    A finite family of basis elements with pairwise disjoint interiors
    """

    elements: tuple[Segment, ...] | tuple[Shell, ...]
    """The basis elements, ordered by position"""
    d: Dimension = field(init=False)
    """The space dimension"""
    _lower: FloatArray = field(init=False, repr=False, compare=False, hash=False)
    _upper: FloatArray = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if not self.elements:
            msg = "A basis set needs at least one element"
            raise ValueError(msg)

        dims = {element.d for element in self.elements}
        if len(dims) != 1:
            msg = "Basis elements must share one dimension"
            raise ValueError(msg)

        lower = np.array([element.bounds[0] for element in self.elements])
        upper = np.array([element.bounds[1] for element in self.elements])
        order = np.argsort(lower)
        if np.any(lower[order][1:] < upper[order][:-1]):
            msg = "Basis elements must have disjoint interiors"
            raise ValueError(msg)

        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "d", dims.pop())
        object.__setattr__(self, "_lower", lower)
        object.__setattr__(self, "_upper", upper)

    @classmethod
    def segments(cls, lower: float, upper: float, count: int) -> Self:
        """
        Evenly spaced segments tiling `[lower, upper]`

        :param lower: Left end of the tiled interval
        :param upper: Right end of the tiled interval
        :param count: Number of segments
        """
        edges = np.linspace(lower, upper, count + 1)
        return cls(tuple(Segment(float(a), float(b)) for a, b in pairwise(edges)))

    @classmethod
    def shells(cls, radius: float, count: int) -> Self:
        """
        Concentric shells of equal radial width tiling the ball of `radius`

        :param radius: The outer radius of the tiled ball
        :param count: Number of shells
        """
        edges = np.linspace(0.0, radius, count + 1)
        return cls(tuple(Shell(float(a), float(b)) for a, b in pairwise(edges)))

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def masses(self) -> FloatArray:
        """Masses of the elements"""
        return np.array([element.mass for element in self.elements])

    @property
    def lower(self) -> FloatArray:
        """Lower bounds (coordinates or radii) of the elements"""
        return self._lower

    @property
    def upper(self) -> FloatArray:
        """Upper bounds (coordinates or radii) of the elements"""
        return self._upper

    @property
    def centers(self) -> FloatArray:
        """Midpoints of the element supports"""
        return 0.5 * (self._lower + self._upper)

    def potentials(self, points: npt.ArrayLike) -> FloatArray:
        """
        Potentials of every element at every point

        :param points: Array of shape `(..., d)`
        :return: Array of shape `(..., M)`
        """
        pts = as_points(points, self.d)
        if self.d is Dimension.LINE:
            return segment_potential(self._lower, self._upper, pts)

        r = np.linalg.norm(pts, axis=-1, keepdims=True)
        return ball_potential(self._upper, r) - ball_potential(self._lower, r)

    def forces(self, points: npt.ArrayLike) -> FloatArray:
        """
        Potential gradients of every element at every point

        :param points: Array of shape `(..., d)`
        :return: Array of shape `(..., M, d)`
        """
        pts = as_points(points, self.d)
        if self.d is Dimension.LINE:
            return segment_force(self._lower, self._upper, pts)[..., np.newaxis]

        r = np.linalg.norm(pts, axis=-1, keepdims=True)
        factor = ball_field_factor(self._upper, r) - ball_field_factor(self._lower, r)
        return factor[..., np.newaxis] * pts[..., np.newaxis, :]

    def weighted_potential(
        self,
        weights: FloatArray,
        points: npt.ArrayLike,
    ) -> FloatArray:
        """
        Potential of the weighted combination of the elements

        :return: Array of shape `(...)`
        """
        return self.potentials(points) @ weights

    def weighted_force(self, weights: FloatArray, points: npt.ArrayLike) -> FloatArray:
        """
        Gradient of `weighted_potential`

        :return: Array of shape `(..., d)`
        """
        return np.einsum("...md,m->...d", self.forces(points), weights)

