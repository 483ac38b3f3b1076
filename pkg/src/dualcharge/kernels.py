"""
Coulomb interaction kernels and the N-body cost.

In three dimensions the kernel is `1/|r - r'|`, in one dimension it is
`-|r - r'|`. Every function broadcasts over leading axes: a configuration
has shape `(..., N, d)`.
"""

from enum import IntEnum, unique

import numpy as np
import numpy.typing as npt

type FloatArray = npt.NDArray[np.float64]


@unique
class Dimension(IntEnum):
    """
    The supported space dimensions
    """

    LINE = 1
    """One dimension, kernel `-|r - r'|`"""
    SPACE = 3
    """Three dimensions, kernel `1/|r - r'|`"""


class SingularityError(ValueError):
    """
    Raised when the three dimensional kernel is evaluated at coincident points
    """

    def __init__(self, msg: str, pair: tuple[int, int] | None = None) -> None:
        super().__init__(msg)
        self.pair = pair
        """Indices of the first coincident pair, when known"""


def as_points(points: npt.ArrayLike, d: Dimension | int) -> FloatArray:
    """
    Convert scalars or arrays to float arrays with a trailing axis of length `d`

    One dimensional inputs without a trailing axis are accepted for `d = 1`.

    :param points: The points to convert
    :param d: The space dimension
    :return: The converted points
    """
    arr = np.asarray(points, dtype=np.float64)
    if d == Dimension.LINE and (arr.ndim == 0 or arr.shape[-1] != 1):
        arr = arr[..., np.newaxis]
    if arr.shape[-1] != d:
        msg = f"Points must have a trailing axis of length {int(d)}, got {arr.shape}"
        raise ValueError(msg)
    return arr


def as_configuration(config: npt.ArrayLike, d: Dimension | int) -> FloatArray:
    """
    Convert configurations to float arrays of shape `(..., N, d)`

    Flat one dimensional configurations such as `(-2, -1, 0, 1)` are
    accepted for `d = 1`.

    :param config: The configuration(s) to convert
    :param d: The space dimension
    :raises ValueError: Without a particle axis and a trailing axis of length `d`
    :return: The converted configuration(s)
    """
    arr = np.asarray(config, dtype=np.float64)
    if d == Dimension.LINE and arr.ndim >= 1 and arr.shape[-1] != 1:
        arr = arr[..., np.newaxis]
    if arr.ndim < 2 or arr.shape[-1] != d:  # noqa: PLR2004
        msg = f"Configurations must have shape (..., N, {int(d)}), got {arr.shape}"
        raise ValueError(msg)
    return arr


def _pairs(config: FloatArray) -> tuple[FloatArray, FloatArray]:
    """
    Differences `r_i - r_j` and distances for all unordered pairs `i < j`

    :return: Arrays of shape `(..., P, d)` and `(..., P)`
    """
    n = config.shape[-2]
    i, j = np.triu_indices(n, 1)
    diff = config[..., i, :] - config[..., j, :]
    return diff, np.linalg.norm(diff, axis=-1)


def _check_distinct(dist: FloatArray, n: int) -> None:
    coincident = dist == 0.0
    if np.any(coincident):
        i, j = np.triu_indices(n, 1)
        first = int(np.argmax(coincident.reshape(-1, dist.shape[-1]).any(axis=0)))
        msg = f"Coincident points {i[first]} and {j[first]} in the Coulomb kernel"
        raise SingularityError(msg, (int(i[first]), int(j[first])))


def kernel(d: Dimension | int, r: npt.ArrayLike, r_prime: npt.ArrayLike) -> FloatArray:
    """
    The Coulomb kernel between two points

    :param d: The space dimension
    :param r: The first point
    :param r_prime: The second point
    :raises SingularityError: Coincident points in three dimensions
    :return: `1/|r - r'|` for d = 3, `-|r - r'|` for d = 1
    """
    d = Dimension(d)
    dist = np.linalg.norm(as_points(r, d) - as_points(r_prime, d), axis=-1)
    if d is Dimension.LINE:
        return -dist

    if np.any(dist == 0.0):
        msg = "Coincident points in the three dimensional Coulomb kernel"
        raise SingularityError(msg)
    return 1.0 / dist


def cost(d: Dimension | int, config: npt.ArrayLike) -> FloatArray:
    """
    The Coulomb cost, the kernel summed over all unordered pairs

    :param d: The space dimension
    :param config: Configuration(s) of shape `(..., N, d)`
    :raises SingularityError: Coincident points in three dimensions
    :return: The cost of each configuration
    """
    d = Dimension(d)
    config = as_configuration(config, d)
    _, dist = _pairs(config)
    if d is Dimension.LINE:
        return -dist.sum(axis=-1)

    _check_distinct(dist, config.shape[-2])
    return (1.0 / dist).sum(axis=-1)


def truncated_cost(config: npt.ArrayLike, alpha: float) -> FloatArray:
    """
    The three dimensional Coulomb cost with each pair term capped at `1/alpha`

    :param config: Configuration(s) of shape `(..., N, 3)`
    :param alpha: The truncation distance
    :return: The truncated cost of each configuration
    """
    config = _check_truncation_args(config, alpha)
    _, dist = _pairs(config)
    with np.errstate(divide="ignore"):
        terms = np.minimum(1.0 / alpha, 1.0 / dist)
    return terms.sum(axis=-1)


def _check_truncation_args(config: npt.ArrayLike, alpha: float) -> FloatArray:
    if alpha <= 0:
        msg = f"Truncation distance must be positive, got {alpha}"
        raise ValueError(msg)
    config = np.asarray(config, dtype=np.float64)
    if config.shape[-1] != Dimension.SPACE:
        msg = "The truncated cost is only defined in three dimensions"
        raise ValueError(msg)
    return config


def _scatter_pair_gradient(pair_grad: FloatArray, n: int) -> FloatArray:
    """
    Accumulate per-pair gradients with respect to `r_i` into per-particle gradients

    The gradient with respect to `r_j` of each pair term is the negated
    gradient with respect to `r_i`.
    """
    i, j = np.triu_indices(n, 1)
    shape = (*pair_grad.shape[:-2], n, pair_grad.shape[-1])
    grad = np.zeros(shape)
    # unbuffered accumulation, repeated indices are summed
    np.add.at(np.moveaxis(grad, -2, 0), i, np.moveaxis(pair_grad, -2, 0))
    np.add.at(np.moveaxis(grad, -2, 0), j, -np.moveaxis(pair_grad, -2, 0))
    return grad


def cost_gradient(d: Dimension | int, config: npt.ArrayLike) -> FloatArray:
    """
    Gradient of the Coulomb cost with respect to every particle

    :param d: The space dimension
    :param config: Configuration(s) of shape `(..., N, d)`
    :raises SingularityError: Coincident points in three dimensions
    :return: Array of shape `(..., N, d)`
    """
    d = Dimension(d)
    config = as_configuration(config, d)
    n = config.shape[-2]
    diff, dist = _pairs(config)

    if d is Dimension.LINE:
        pair_grad = -np.sign(diff)
    else:
        _check_distinct(dist, n)
        pair_grad = -diff / dist[..., np.newaxis] ** 3

    return _scatter_pair_gradient(pair_grad, n)


def truncated_cost_gradient(config: npt.ArrayLike, alpha: float) -> FloatArray:
    """
    Gradient of the truncated cost. Pair terms closer than `alpha` are flat
    and contribute nothing; at exactly `alpha` the smooth branch is used.

    :param config: Configuration(s) of shape `(..., N, 3)`
    :param alpha: The truncation distance
    :return: Array of shape `(..., N, 3)`
    """
    config = _check_truncation_args(config, alpha)
    n = config.shape[-2]
    diff, dist = _pairs(config)

    active = dist >= alpha
    safe = np.where(active, dist, 1.0)
    field = -diff / safe[..., np.newaxis] ** 3
    pair_grad = np.where(active[..., np.newaxis], field, 0.0)
    return _scatter_pair_gradient(pair_grad, n)


def pair_energy(
    d: Dimension | int,
    config: npt.ArrayLike,
    alpha: float | None,
) -> FloatArray:
    """
    The interaction energy used by the samplers and minimizers: the truncated
    cost in three dimensions when `alpha` is given, the plain cost otherwise.
    """
    if Dimension(d) is Dimension.SPACE and alpha is not None:
        return truncated_cost(config, alpha)
    return cost(d, config)


def pair_energy_gradient(
    d: Dimension | int,
    config: npt.ArrayLike,
    alpha: float | None,
) -> FloatArray:
    """
    Gradient of `pair_energy`
    """
    if Dimension(d) is Dimension.SPACE and alpha is not None:
        return truncated_cost_gradient(config, alpha)
    return cost_gradient(d, config)
