"""
Comparison of experiment results against exact solutions
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, ClassVar, NamedTuple

import numpy as np

from dualcharge.experiment.result import ExperimentResult
from dualcharge.kernels import Dimension, FloatArray
from dualcharge.model.density import Ball
from dualcharge.oracles import (
    breakpoints,
    exact_1d_energy,
    exact_2e_potential,
    exact_2e_shell_charge,
    reference_energy,
)
from dualcharge.utils.config import ConfigError

if TYPE_CHECKING:
    from pathlib import Path

    from dualcharge.model.basis import BasisSet
    from dualcharge.model.density import Density

logger = logging.getLogger(__name__)

COMB_RADIUS = 0.25
"""Distance to a breakpoint counted as concentrated comb charge"""


def potential_grid(rho: Density, points: int) -> tuple[FloatArray, FloatArray]:
    """
    Evaluation grid of the potential curves: the whole interval in one
    dimension, radii on the positive first axis in three

    :param rho: The target density
    :param points: Number of grid points
    :return: The coordinates or radii `(K,)` and the points `(K, d)`
    """
    if rho.d is Dimension.LINE:
        lower, upper = rho.support
        r = np.linspace(lower, upper, points)
        return r, r[:, np.newaxis]

    radius = rho.support.radius
    r = np.linspace(0.0, radius, points + 1)[1:]
    grid = np.zeros((points, 3))
    grid[:, 0] = r
    return r, grid


def align_constant(values: FloatArray, reference: FloatArray) -> float:
    """
    The constant `c` minimizing `|values - (reference + c)|^2`
    """
    return float(np.mean(values - reference))


def curve_deviation(values: FloatArray, reference: FloatArray) -> tuple[float, float]:
    """
    Sup and root mean square distance after aligning the additive constant

    :param values: The computed curve
    :param reference: The exact curve on the same grid
    :return: The sup and L2 deviations
    """
    residual = values - reference - align_constant(values, reference)
    return float(np.max(np.abs(residual))), float(np.sqrt(np.mean(residual**2)))


class Oracle(ABC):
    """
    An exact solution for a family of target densities
    """

    name: ClassVar[str]
    potential_window: ClassVar[tuple[float, float] | None] = None
    """Coordinates (radii in three dimensions) where potentials are compared,
    the whole support when unset"""
    charge_window: ClassVar[tuple[float, float]] = (-math.inf, math.inf)
    """Element centers whose charges are compared"""

    def __init__(self, rho: Density) -> None:
        self.check(rho)
        self.rho = rho

    @classmethod
    @abstractmethod
    def check(cls, rho: Density) -> None:
        """
        :raises ConfigError: When the oracle does not apply to `rho`
        """

    @abstractmethod
    def reference_energy(self) -> float:
        """The optimal Coulomb energy of the density"""

    def potential(self, points: FloatArray) -> FloatArray | None:  # noqa: ARG002
        """The exact potential up to a constant, if known"""
        return None

    def shell_charge(self, basis: BasisSet) -> FloatArray | None:  # noqa: ARG002
        """The exact dual charge averaged over every element, if known"""
        return None

    def expected_mass(self) -> float | None:
        """Total mass of the exact dual charge, if known"""
        return None

    def concentration(  # noqa: ARG002
        self,
        basis: BasisSet,
        weights: FloatArray,
    ) -> float | None:
        """Share of positive charge near the exact point charges, if any"""
        return None

    def window_mask(self, coords: FloatArray) -> np.ndarray:
        """Grid points inside the potential window"""
        if self.potential_window is None:
            return np.ones(coords.shape, dtype=bool)
        low, high = self.potential_window
        return (coords >= low) & (coords <= high)


class OracleManager:
    """
    Manages the oracles available by name
    """

    _registered_oracles: ClassVar[dict[str, type[Oracle]]] = {}

    @classmethod
    def register(cls, oracle_class: type[Oracle]) -> type[Oracle]:
        """
        Registers an oracle type. Can be used as a decorator

        :param oracle_class: The class to register
        :raises RuntimeError: Name already registered
        """
        if oracle_class.name in cls._registered_oracles:
            msg = f"Oracle with name {oracle_class.name!r} already registered"
            raise RuntimeError(msg)

        cls._registered_oracles[oracle_class.name] = oracle_class
        return oracle_class

    @classmethod
    def get_oracle(cls, name: str) -> type[Oracle]:
        """
        Gets the oracle registered under `name`

        :raises ConfigError: For unknown names
        """
        try:
            return cls._registered_oracles[name]
        except KeyError:
            msg = f"Unknown oracle {name!r}"
            raise ConfigError(msg, "oracle") from None

    @classmethod
    def registered(cls) -> tuple[str, ...]:
        """Names of the registered oracles"""
        return tuple(cls._registered_oracles)

    @classmethod
    def clear_registered(cls) -> None:
        """
        UNIT TESTING ONLY: Clears all registered oracles.
        """
        cls._registered_oracles.clear()


def register_oracle(oracle_class: type[Oracle]) -> type[Oracle]:
    """
    Decorator used for registering oracle classes

    :param oracle_class: The oracle class to register
    :return: The registered oracle
    """
    return OracleManager.register(oracle_class)


def _require_unit_droplet(rho: Density, name: str) -> None:
    if rho.d is not Dimension.SPACE or not isinstance(rho.support, Ball):
        msg = f"Oracle {name!r} needs a three dimensional droplet"
        raise ConfigError(msg, "oracle")
    if not math.isclose(rho.support.radius, 1.0):
        msg = f"Oracle {name!r} needs the unit ball, got radius {rho.support.radius}"
        raise ConfigError(msg, "oracle")


@register_oracle
class CombOracle(Oracle):
    """
    Point charges at the unit mass quantiles of a one dimensional density
    """

    name = "comb"

    @classmethod
    def check(cls, rho: Density) -> None:
        if rho.d is not Dimension.LINE:
            msg = "The comb oracle needs a one dimensional density"
            raise ConfigError(msg, "oracle")

    def reference_energy(self) -> float:
        return exact_1d_energy(self.rho)

    def potential(self, points: FloatArray) -> FloatArray:
        return breakpoints(self.rho).potential(points)

    def expected_mass(self) -> float:
        return float(self.rho.n_electrons - 1)

    def concentration(self, basis: BasisSet, weights: FloatArray) -> float:
        ells = np.asarray(breakpoints(self.rho).breakpoints)
        masses = np.clip(weights, 0.0, None) * basis.masses
        total = masses.sum()
        if total == 0.0:
            return 0.0
        near = np.abs(basis.centers[:, np.newaxis] - ells).min(axis=-1) <= COMB_RADIUS
        return float(masses[near].sum() / total)


@register_oracle
class TwoElectronDropletOracle(Oracle):
    """
    The closed form solution of two electrons uniform in the unit ball
    """

    name = "droplet2"
    potential_window = (0.1, 0.9)
    charge_window = (0.1, 0.8)

    @classmethod
    def check(cls, rho: Density) -> None:
        _require_unit_droplet(rho, cls.name)
        if rho.n_electrons != 2:  # noqa: PLR2004
            msg = f"The two electron oracle got {rho.n_electrons} electrons"
            raise ConfigError(msg, "oracle")

    def reference_energy(self) -> float:
        return reference_energy(2)

    def potential(self, points: FloatArray) -> FloatArray:
        return exact_2e_potential(points)

    def shell_charge(self, basis: BasisSet) -> FloatArray:
        return np.array(
            [
                exact_2e_shell_charge(float(a), float(b))
                for a, b in zip(basis.lower, basis.upper, strict=True)
            ]
        )

    def expected_mass(self) -> float:
        return 1.0


@register_oracle
class DropletEnergyOracle(Oracle):
    """
    Published strictly correlated energies of uniform unit droplets
    """

    name = "droplet_energy"

    @classmethod
    def check(cls, rho: Density) -> None:
        _require_unit_droplet(rho, cls.name)
        try:
            reference_energy(rho.n_electrons)
        except KeyError:
            msg = f"No reference energy for {rho.n_electrons} electrons"
            raise ConfigError(msg, "oracle") from None

    def reference_energy(self) -> float:
        return reference_energy(self.rho.n_electrons)


@dataclass(frozen=True, slots=True)
class Tolerances:
    """
    Thresholds of the validation checks
    """

    potential_sup: float = 0.15
    potential_l2: float | None = None
    charge_rel: float = 0.2
    mass_abs: float = 0.15
    min_concentration: float = 0.8
    energy_low: float = 0.95
    """Lowest accepted dual energy, relative to the reference"""
    energy_high: float = 1.005
    """Highest accepted dual energy, relative to the reference"""


class Check(NamedTuple):
    """
    One verdict of a validation
    """

    name: str
    value: float
    lower: float | None
    upper: float | None

    @property
    def passed(self) -> bool:
        """Whether the value lies within the bounds"""
        above = self.lower is None or self.value >= self.lower
        below = self.upper is None or self.value <= self.upper
        return above and below


@dataclass(frozen=True, slots=True)
class ValidationReport:
    """
    Deviations of a result from an oracle with their verdicts
    """

    oracle: str
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        """Whether every check passed"""
        return all(check.passed for check in self.checks)

    def failures(self) -> tuple[Check, ...]:
        """The failed checks"""
        return tuple(check for check in self.checks if not check.passed)

    def to_dict(self) -> dict[str, Any]:
        """The report as a JSON ready dictionary"""
        return {
            "oracle": self.oracle,
            "passed": self.passed,
            "checks": [
                {**check._asdict(), "passed": check.passed} for check in self.checks
            ],
        }


def oracle_potential_curve(
    oracle: Oracle,
    values: FloatArray,
    coords: FloatArray,
    points: FloatArray,
) -> FloatArray | None:
    """
    The oracle potential on a grid, shifted to best match `values` inside
    the potential window

    :return: The aligned curve, or None without an exact potential
    """
    reference = oracle.potential(points)
    if reference is None:
        return None
    mask = oracle.window_mask(coords)
    return reference + align_constant(values[mask], reference[mask])


def compare(
    result: ExperimentResult,
    oracle: Oracle,
    tolerances: Tolerances,
    grid_points: int = 201,
) -> ValidationReport:
    """
    Compare a result against an oracle

    :param result: The experiment result
    :param oracle: The oracle of the result density
    :param tolerances: The thresholds
    :param grid_points: Number of potential grid points
    :return: The report
    """
    charge = result.charge()
    basis = charge.basis
    ref_energy = oracle.reference_energy()
    spread = abs(ref_energy)
    checks = [
        Check(
            "energy",
            result.f_sce,
            ref_energy - (1.0 - tolerances.energy_low) * spread,
            ref_energy + (tolerances.energy_high - 1.0) * spread,
        )
    ]
    if result.f_sce_trace:
        # every iterate bounds the reference from below
        checks.append(
            Check(
                "weak_duality",
                max(result.f_sce_trace),
                None,
                ref_energy + (tolerances.energy_high - 1.0) * spread,
            )
        )

    coords, points = potential_grid(oracle.rho, grid_points)
    reference = oracle.potential(points)
    if reference is not None:
        mask = oracle.window_mask(coords)
        sup, l2 = curve_deviation(charge.potential(points)[mask], reference[mask])
        checks.append(Check("potential_sup", sup, None, tolerances.potential_sup))
        checks.append(Check("potential_l2", l2, None, tolerances.potential_l2))

    exact_charge = oracle.shell_charge(basis)
    if exact_charge is not None:
        low, high = oracle.charge_window
        inside = (basis.centers >= low) & (basis.centers <= high)
        relative = np.abs(charge.weights - exact_charge) / np.abs(exact_charge)
        checks.append(
            Check(
                "charge_rel",
                float(relative[inside].max()),
                None,
                tolerances.charge_rel,
            )
        )

    mass = oracle.expected_mass()
    if mass is not None:
        checks.append(
            Check(
                "mass",
                result.mass,
                mass - tolerances.mass_abs,
                mass + tolerances.mass_abs,
            )
        )

    share = oracle.concentration(basis, charge.weights)
    if share is not None:
        checks.append(Check("concentration", share, tolerances.min_concentration, None))

    report = ValidationReport(oracle.name, tuple(checks))
    for check in report.failures():
        logger.info("Check %s failed: %.6g outside [%s, %s]", *check)
    return report


def validate(
    result_path: Path,
    oracle_name: str,
    tolerances: Tolerances | None = None,
    grid_points: int = 201,
) -> ValidationReport:
    """
    Recompute the oracle curves of a saved result and compare

    :param result_path: The experiment output directory
    :param oracle_name: The registered oracle name
    :param tolerances: The thresholds, defaults to `Tolerances()`
    :param grid_points: Number of potential grid points
    :raises ConfigError: For unknown or inapplicable oracles
    :return: The report
    """
    result = ExperimentResult.load(result_path)
    oracle = OracleManager.get_oracle(oracle_name)(result.density())
    return compare(result, oracle, tolerances or Tolerances(), grid_points)
