"""
The two electron uniform droplet in the unit ball, solvable in closed form
through its radial transport map, and reference energies for larger
droplets.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np

from dualcharge.kernels import Dimension, FloatArray, as_points
from dualcharge.model.energy import quad

if TYPE_CHECKING:
    import numpy.typing as npt

RADIAL_ATOL = 1e-10

DROPLET_REFERENCE_ENERGIES: dict[int, float] = {
    3: 2.327,
    4: 4.935,
    5: 8.626,
    10: 43.140,
    14: 90.808,
    20: 196.198,
    30: 463.807,
}
"""Published strictly correlated energies of uniform unit droplets"""

_BALANCE_RADIUS = 2.0 ** (-1.0 / 3.0)


def partner_radius(radius: npt.ArrayLike) -> FloatArray:
    """
    `s(r) = (1 - r^3)^(1/3)`, the radius the map sends `r` to
    """
    return np.cbrt(1.0 - np.asarray(radius, dtype=np.float64) ** 3)


def _radii(points: npt.ArrayLike) -> tuple[FloatArray, FloatArray]:
    x = as_points(points, Dimension.SPACE)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0.0):
        msg = "The two electron map is singular at the origin"
        raise ValueError(msg)
    if np.any(r > 1.0):
        msg = "Points must lie in the unit ball"
        raise ValueError(msg)
    return x, r


def seidl_map_2e(points: npt.ArrayLike) -> FloatArray:
    """
    The optimal map of the two electron droplet,
    `t(r) = -(r / |r|) (1 - |r|^3)^(1/3)`

    :param points: Array of shape `(..., 3)` with `0 < |r| <= 1`
    :raises ValueError: At the origin or outside the unit ball
    :return: The image points
    """
    x, r = _radii(points)
    return -(x / r[..., np.newaxis]) * partner_radius(r)[..., np.newaxis]


def exact_2e_gradient(points: npt.ArrayLike) -> FloatArray:
    """
    Gradient of the exact potential, `-(r - t(r)) / |r - t(r)|^3`; it has
    magnitude `1 / (|r| + s)^2` and points to the center

    :param points: Array of shape `(..., 3)` with `0 < |r| <= 1`
    :return: Array of shape `(..., 3)`
    """
    x, r = _radii(points)
    gap = r + partner_radius(r)
    return -(x / r[..., np.newaxis]) / gap[..., np.newaxis] ** 2


def _radial_potential(radius: float, anchor: float) -> float:
    return quad(
        lambda t: 1.0 / (t + float(partner_radius(t))) ** 2,
        radius,
        anchor,
        epsabs=RADIAL_ATOL,
        epsrel=0.0,
    )


def exact_2e_potential(points: npt.ArrayLike, anchor: float = 1.0) -> FloatArray:
    """
    The exact potential, integrated radially from `anchor` where it vanishes

    :param points: Array of shape `(..., 3)` with `0 < |r| <= 1`
    :param anchor: The radius of the zero of the potential
    :return: Array of shape `(...)`
    """
    _, r = _radii(points)
    flat = [_radial_potential(float(radius), anchor) for radius in r.ravel()]
    return np.asarray(flat).reshape(r.shape)


def exact_2e_charge(points: npt.ArrayLike) -> FloatArray:
    """
    The exact dual charge `-laplacian(v) / (4 pi)`,
    `2 / (4 pi |r| s^2 (|r| + s)^3)` with `s = (1 - |r|^3)^(1/3)`

    It integrates to 1 over the unit ball and diverges, integrably, at the
    center and at the surface.

    :param points: Array of shape `(..., 3)` with `0 < |r| < 1`
    :return: Array of shape `(...)`
    """
    _, r = _radii(points)
    s = partner_radius(r)
    return 2.0 / (4.0 * math.pi * r * s**2 * (r + s) ** 3)


def exact_2e_enclosed_charge(inner: float, outer: float) -> float:
    """
    Charge of the exact dual charge in the shell `inner <= |r| <= outer`.

    Above the radius where `r = s` the radial integral is taken in the
    variable `s`, where the integrand is smooth.
    """
    if not 0.0 <= inner <= outer <= 1.0:
        msg = f"Invalid shell radii [{inner}, {outer}]"
        raise ValueError(msg)

    def in_radius(r: float) -> float:
        s = float(partner_radius(r))
        return 2.0 * r / (s**2 * (r + s) ** 3)

    def in_partner(s: float) -> float:
        r = float(partner_radius(s))
        return 2.0 / (r * (r + s) ** 3)

    total = 0.0
    low = min(inner, _BALANCE_RADIUS)
    high = min(outer, _BALANCE_RADIUS)
    if high > low:
        total += quad(in_radius, low, high, epsabs=RADIAL_ATOL, epsrel=0.0)

    low = max(inner, _BALANCE_RADIUS)
    high = max(outer, _BALANCE_RADIUS)
    if high > low:
        s_low = float(partner_radius(high))
        s_high = float(partner_radius(low))
        total += quad(in_partner, s_low, s_high, epsabs=RADIAL_ATOL, epsrel=0.0)
    return total


def exact_2e_shell_charge(inner: float, outer: float) -> float:
    """
    Average density of the exact dual charge over a shell
    """
    volume = 4.0 * math.pi / 3.0 * (outer**3 - inner**3)
    return exact_2e_enclosed_charge(inner, outer) / volume


def exact_2e_energy() -> float:
    """
    The optimal Coulomb energy of two electrons uniform in the unit ball,
    `int (rho / 2) / |r - t(r)| = 3 int_0^1 r^2 / (r + s) dr`
    """
    return 3.0 * quad(
        lambda r: r**2 / (r + float(partner_radius(r))),
        0.0,
        1.0,
        epsabs=RADIAL_ATOL,
        epsrel=0.0,
    )


def reference_energy(n_electrons: int) -> float:
    """
    The reference energy of the uniform unit droplet with `n_electrons`

    :raises KeyError: When no reference value is tabulated
    """
    if n_electrons == 2:  # noqa: PLR2004
        return exact_2e_energy()
    return DROPLET_REFERENCE_ENERGIES[n_electrons]
