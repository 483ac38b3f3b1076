"""
Coulomb energies `D(mu, nu)` between densities, basis elements and charges.

Uniform pieces (segments, shells, uniform densities) are paired in closed
form; profile densities fall back to adaptive quadrature.
"""

from __future__ import annotations

import functools
import logging
import math
from typing import TYPE_CHECKING, Protocol, runtime_checkable

import numpy as np
from scipy import integrate

from dualcharge.kernels import FloatArray
from dualcharge.model.basis import BasisElement, Segment, Shell

if TYPE_CHECKING:
    from collections.abc import Callable

    from dualcharge.model.basis import BasisSet
    from dualcharge.model.density import Density

logger = logging.getLogger(__name__)

QUAD_RTOL = 1e-8
QUAD_LIMIT = 200

_FOUR_THIRDS_PI = 4.0 * math.pi / 3.0


class QuadratureError(RuntimeError):
    """
    Raised when an adaptive quadrature does not reach its tolerance
    """

    def __init__(self, msg: str, value: float, abs_error: float) -> None:
        super().__init__(msg)
        self.value = value
        """The last quadrature estimate"""
        self.abs_error = abs_error
        """The estimated absolute error"""


@runtime_checkable
class PiecewiseMeasure(Protocol):
    """
    Measures made of weighted uniform pieces
    """

    def pieces(self) -> list[tuple[float, BasisElement]]:
        """Decomposition into weighted uniform pieces"""
        ...


class ProfileMeasure(Protocol):
    """
    One dimensional measures given by a density profile on an interval
    """

    @property
    def bounds(self) -> tuple[float, float]:
        """The support interval"""
        ...

    def profile(self, x: float) -> float:
        """The density at `x`"""
        ...


def quad(
    func: Callable[[float], float],
    lower: float,
    upper: float,
    *,
    points: list[float] | None = None,
    epsabs: float = 0.0,
    epsrel: float = QUAD_RTOL,
) -> float:
    """
    Adaptive Gauss-Kronrod quadrature that raises instead of warning

    :param func: The integrand
    :param lower: Lower integration bound
    :param upper: Upper integration bound
    :param points: Interior break points of the integrand
    :raises QuadratureError: When the requested tolerance is not met
    :return: The integral
    """
    inner = None
    if points:
        inner = sorted(p for p in points if lower < p < upper) or None

    result = integrate.quad(
        func,
        lower,
        upper,
        points=inner,
        epsabs=epsabs,
        epsrel=epsrel,
        limit=QUAD_LIMIT,
        full_output=1,
    )
    value, abs_error = float(result[0]), float(result[1])
    if len(result) > 3:  # noqa: PLR2004
        msg = (
            f"Quadrature on [{lower}, {upper}] did not converge: {result[3]} "
            f"(estimate {value}, abs. error {abs_error})"
        )
        raise QuadratureError(msg, value, abs_error)
    return value


def segment_pair_energy(first: Segment, second: Segment) -> float:
    """
    `D` between the indicators of two segments, `-int int |x - y| dx dy`
    """
    a, b = first.bounds
    c, d = second.bounds

    def antiderivative(t: float) -> float:
        return abs(t) ** 3 / 6.0

    total = (
        antiderivative(b - c)
        + antiderivative(a - d)
        - antiderivative(a - c)
        - antiderivative(b - d)
    )
    return -total


def ball_pair_energy(first_radius: float, second_radius: float) -> float:
    """
    `D` between two concentric balls of unit charge density
    """
    small, large = sorted((first_radius, second_radius))
    if small == 0.0:
        return 0.0
    q_small = _FOUR_THIRDS_PI * small**3
    q_large = _FOUR_THIRDS_PI * large**3
    return q_small * q_large * (3.0 * large**2 - 0.6 * small**2) / (2.0 * large**3)


def shell_pair_energy(first: Shell, second: Shell) -> float:
    """
    `D` between two concentric shells, expanded over their bounding balls
    """
    total = 0.0
    for r1, s1 in ((first.outer, 1.0), (first.inner, -1.0)):
        for r2, s2 in ((second.outer, 1.0), (second.inner, -1.0)):
            total += s1 * s2 * ball_pair_energy(r1, r2)
    return total


def element_pair_energy(first: BasisElement, second: BasisElement) -> float:
    """
    Closed form `D` between two uniform pieces of the same dimension
    """
    if isinstance(first, Segment) and isinstance(second, Segment):
        return segment_pair_energy(first, second)
    if isinstance(first, Shell) and isinstance(second, Shell):
        return shell_pair_energy(first, second)

    msg = f"No closed form for {type(first).__name__} and {type(second).__name__}"
    raise TypeError(msg)


def _profile_against_pieces(
    measure: ProfileMeasure,
    pieces: list[tuple[float, BasisElement]],
) -> float:
    lower, upper = measure.bounds
    breaks = [bound for _, element in pieces for bound in element.bounds]

    def integrand(x: float) -> float:
        total = sum(weight * float(element.potential(x)) for weight, element in pieces)
        return measure.profile(x) * total

    return quad(integrand, lower, upper, points=breaks)


def _profile_against_profile(first: ProfileMeasure, second: ProfileMeasure) -> float:
    lower, upper = first.bounds
    inner_lower, inner_upper = second.bounds

    def potential(x: float) -> float:
        return -quad(
            lambda y: second.profile(y) * abs(x - y),
            inner_lower,
            inner_upper,
            points=[x],
        )

    return quad(lambda x: first.profile(x) * potential(x), lower, upper)


def coulomb_energy(
    mu: PiecewiseMeasure | ProfileMeasure,
    nu: PiecewiseMeasure | ProfileMeasure,
) -> float:
    """
    The Coulomb energy `D(mu, nu) = int int k(r - r') dmu(r) dnu(r')`.

    Accepts uniform densities, basis elements, dual charges and profile
    densities. No factor one half is applied.

    :param mu: The first measure
    :param nu: The second measure
    :raises QuadratureError: When a quadrature fallback does not converge
    :return: The energy
    """
    if isinstance(mu, PiecewiseMeasure) and isinstance(nu, PiecewiseMeasure):
        return sum(
            w1 * w2 * element_pair_energy(e1, e2)
            for w1, e1 in mu.pieces()
            for w2, e2 in nu.pieces()
        )
    if isinstance(nu, PiecewiseMeasure):
        return _profile_against_pieces(mu, nu.pieces())  # type: ignore[arg-type]
    if isinstance(mu, PiecewiseMeasure):
        return _profile_against_pieces(nu, mu.pieces())  # type: ignore[arg-type]
    return _profile_against_profile(mu, nu)  # type: ignore[arg-type]


def element_against_density(element: BasisElement, rho: Density) -> float:
    """
    `D(rho_i, rho)` for a single element
    """
    return coulomb_energy(element, rho)


@functools.cache
def reference_moments(basis: BasisSet, rho: Density) -> FloatArray:
    """
    The table `D(rho_i, rho)` over the basis, computed once per pair

    :param basis: The basis set
    :param rho: The target density
    :return: Read-only array of shape `(M,)`
    """
    if basis.d != rho.d:
        msg = "Basis and density dimensions differ"
        raise ValueError(msg)

    table = np.array(
        [element_against_density(element, rho) for element in basis.elements]
    )
    table.flags.writeable = False
    logger.debug("Computed %d reference moments", table.size)
    return table


@functools.cache
def interaction_matrix(basis: BasisSet) -> FloatArray:
    """
    The table `D(rho_i, rho_j)` over the basis

    :param basis: The basis set
    :return: Read-only array of shape `(M, M)`
    """
    elements = basis.elements
    matrix = np.array([[element_pair_energy(a, b) for b in elements] for a in elements])
    matrix.flags.writeable = False
    return matrix

