"""
Target one-particle densities
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from dualcharge.kernels import Dimension, FloatArray
from dualcharge.model.basis import Segment, Shell

if TYPE_CHECKING:
    import numpy.typing as npt

    from dualcharge.model.basis import BasisElement


class Interval(NamedTuple):
    """
    One dimensional support `[lower, upper]`
    """

    lower: float
    upper: float


class Ball(NamedTuple):
    """
    Three dimensional support, the centered ball of the given radius
    """

    radius: float


def unit_ball_volume() -> float:
    """
    Volume of the unit ball of R^3
    """
    return 4.0 * math.pi / 3.0


@dataclass(frozen=True, slots=True)
class Density:
    """
    A uniform density of `n_electrons` particles on a bounded support.

    Uniform profiles are the only ones the samplers handle; general one
    dimensional profiles are provided by the oracles.
    """

    n_electrons: int
    """Number of particles N, the total integral of the density"""
    support: Interval | Ball
    """The support of the density"""
    d: Dimension = field(init=False)
    """The space dimension, deduced from the support"""

    def __post_init__(self) -> None:
        if self.n_electrons < 2:  # noqa: PLR2004
            msg = f"A density needs at least two particles, got {self.n_electrons}"
            raise ValueError(msg)

        if isinstance(self.support, Interval):
            if not self.support.upper > self.support.lower:
                msg = f"Empty interval support {self.support}"
                raise ValueError(msg)
            object.__setattr__(self, "d", Dimension.LINE)
        elif isinstance(self.support, Ball):
            if not self.support.radius > 0:
                msg = f"Ball radius must be positive, got {self.support.radius}"
                raise ValueError(msg)
            object.__setattr__(self, "d", Dimension.SPACE)
        else:
            msg = f"Unsupported support type {type(self.support).__name__}"
            raise TypeError(msg)

    @classmethod
    def interval(cls, lower: float, upper: float, n_electrons: int) -> Density:
        """
        Uniform density on `[lower, upper]`
        """
        return cls(n_electrons, Interval(float(lower), float(upper)))

    @classmethod
    def droplet(cls, n_electrons: int, radius: float = 1.0) -> Density:
        """
        Uniform three dimensional droplet `N |B_R|^-1 1_{B_R}`
        """
        return cls(n_electrons, Ball(float(radius)))

    @property
    def volume(self) -> float:
        """Lebesgue measure of the support"""
        if isinstance(self.support, Interval):
            return self.support.upper - self.support.lower
        return unit_ball_volume() * self.support.radius**3

    @property
    def height(self) -> float:
        """Constant value of the density on its support"""
        return self.n_electrons / self.volume

    @property
    def diameter(self) -> float:
        """Diameter of the support"""
        if isinstance(self.support, Interval):
            return self.support.upper - self.support.lower
        return 2.0 * self.support.radius

    @property
    def center(self) -> FloatArray:
        """Center of the support"""
        if isinstance(self.support, Interval):
            return np.array([0.5 * (self.support.lower + self.support.upper)])
        return np.zeros(3)

    def contains(
        self,
        points: npt.ArrayLike,
        *,
        atol: float = 1e-12,
    ) -> npt.NDArray[np.bool_]:
        """
        Test which points lie in the (closed) support

        :param points: Array of shape `(..., d)`
        :param atol: Tolerance for points on the boundary
        :return: Boolean array of shape `(...)`
        """
        pts = np.asarray(points, dtype=np.float64)
        if isinstance(self.support, Interval):
            x = pts[..., 0]
            return (x >= self.support.lower - atol) & (x <= self.support.upper + atol)
        return np.linalg.norm(pts, axis=-1) <= self.support.radius + atol

    def reflect(self, points: FloatArray) -> FloatArray:
        """
        Fold points back into the support by mirror reflection at the
        boundary: interval ends in one dimension, the sphere (radially)
        in three dimensions.

        :param points: Array of shape `(..., d)`
        :return: The reflected points
        """
        if isinstance(self.support, Interval):
            lower, upper = self.support
            return lower + _fold(points - lower, upper - lower)

        radius = self.support.radius
        norm = np.linalg.norm(points, axis=-1, keepdims=True)
        outside = norm > radius
        if not np.any(outside):
            return points
        folded = _fold(norm, radius)
        scale = np.divide(folded, norm, out=np.ones_like(norm), where=outside)
        return points * scale

    def project(self, points: FloatArray) -> FloatArray:
        """
        Nearest points of the support: clipping in one dimension, radial
        scaling onto the sphere in three dimensions

        :param points: Array of shape `(..., d)`
        :return: The projected points
        """
        if isinstance(self.support, Interval):
            return np.clip(points, self.support.lower, self.support.upper)

        norm = np.linalg.norm(points, axis=-1, keepdims=True)
        return points * (self.support.radius / np.maximum(norm, self.support.radius))

    def sample_uniform(self, rng: np.random.Generator, count: int) -> FloatArray:
        """
        Draw `count` independent uniform points on the support

        :param rng: The random generator to draw from
        :param count: The number of points
        :return: Array of shape `(count, d)`
        """
        if isinstance(self.support, Interval):
            return rng.uniform(self.support.lower, self.support.upper, size=(count, 1))

        direction = rng.standard_normal((count, 3))
        direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
        radius = self.support.radius * np.cbrt(rng.uniform(size=(count, 1)))
        return direction * radius

    def pieces(self) -> list[tuple[float, BasisElement]]:
        """
        The density as a weighted indicator of its support
        """
        if isinstance(self.support, Interval):
            return [(self.height, Segment(*self.support))]
        return [(self.height, Shell(0.0, self.support.radius))]

    def cdf(self, x: float) -> float:
        """
        Mass of the one dimensional density to the left of `x`

        :raises ValueError: For three dimensional densities
        """
        if not isinstance(self.support, Interval):
            msg = "The cumulative distribution is only defined in one dimension"
            raise ValueError(msg)
        lower, upper = self.support
        return self.height * (min(max(x, lower), upper) - lower)


def _fold(x: FloatArray, width: float) -> FloatArray:
    """
    Reflect `x` into `[0, width]` with mirrors at both ends
    """
    t = np.mod(x, 2.0 * width)
    return width - np.abs(t - width)
