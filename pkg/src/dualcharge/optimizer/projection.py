"""
Euclidean projection onto the admissible dual charges
`{nu >= 0, sum nu_i m_i <= N - 1}`
"""

import numpy as np
import numpy.typing as npt
from scipy import optimize

from dualcharge.kernels import FloatArray


def project_delta_b(
    weights: npt.ArrayLike,
    masses: npt.ArrayLike,
    max_mass: float,
) -> FloatArray:
    """
    Nearest point of `{x >= 0, <m, x> <= max_mass}` to `weights`.

    The minimizer is `max(weights - lam * m, 0)` for the smallest
    `lam >= 0` satisfying the mass constraint.

    :param weights: The point to project
    :param masses: The positive element masses
    :param max_mass: The mass bound, `N - 1`
    :return: The projection
    """
    y = np.asarray(weights, dtype=np.float64)
    m = np.asarray(masses, dtype=np.float64)
    if np.any(m <= 0):
        msg = "Element masses must be positive"
        raise ValueError(msg)
    if max_mass < 0:
        msg = f"The mass bound must be non-negative, got {max_mass}"
        raise ValueError(msg)

    clipped = np.maximum(y, 0.0)
    if clipped @ m <= max_mass:
        return clipped

    def excess(lam: float) -> float:
        return float(np.maximum(y - lam * m, 0.0) @ m) - max_mass

    upper = float(np.max(y / m))
    lam = optimize.brentq(excess, 0.0, upper, xtol=1e-14, rtol=1e-14)
    return np.maximum(y - lam * m, 0.0)
