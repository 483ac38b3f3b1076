"""
The machine readable record of an experiment run
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, fields
from typing import TYPE_CHECKING, Any, NamedTuple, Self

from dualcharge.kernels import Dimension
from dualcharge.model.basis import BasisSet, Segment, Shell
from dualcharge.model.charge import DualCharge
from dualcharge.model.density import Density

if TYPE_CHECKING:
    from pathlib import Path

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.json"
TIMING_FILE = "timing.json"


class StageRecord(NamedTuple):
    """
    Outcome of the ascent at one inverse temperature of the schedule
    """

    beta: float
    iterations: int
    converged: bool
    mass: float
    grad_norm: float
    """Gradient norm of the last iteration"""


@dataclass(frozen=True, slots=True)
class ExperimentResult:
    """
    Final state and provenance of an experiment.

    Everything but the wall clock time goes to `summary.json`, so identical
    runs write identical summaries.
    """

    name: str
    config_digest: str
    """SHA-256 of the canonical configuration text"""
    seed: int
    dimension: int
    n_electrons: int
    support: tuple[float, ...]
    """`(lower, upper)` in one dimension, `(radius,)` in three"""
    element_bounds: tuple[tuple[float, float], ...]
    weights: tuple[float, ...]
    """The final dual charge weights"""
    mass: float
    iterations: int
    """Iterations summed over all stages"""
    converged: bool
    """Whether the last stage met its gradient tolerance"""
    e_n: float
    """Minimum of `c_alpha - sum v` over configurations"""
    external: float
    """`int v rho`"""
    f_sce: float
    """The dual energy `e_n + external`"""
    grad_norms: tuple[float, ...]
    stages: tuple[StageRecord, ...]
    oracle: str = "none"
    f_sce_trace: tuple[float, ...] = ()
    """Dual energy after every iteration of every stage, empty unless traced"""
    wall_clock: float = 0.0
    """Seconds spent, excluded from the summary"""

    def density(self) -> Density:
        """The target density of the run"""
        if self.dimension == Dimension.LINE:
            return Density.interval(*self.support, self.n_electrons)
        return Density.droplet(self.n_electrons, *self.support)

    def basis(self) -> BasisSet:
        """The basis set of the run"""
        element = Segment if self.dimension == Dimension.LINE else Shell
        return BasisSet(tuple(element(a, b) for a, b in self.element_bounds))

    def charge(self) -> DualCharge:
        """The final dual charge"""
        return DualCharge(self.basis(), self.weights)

    def summary(self) -> dict[str, Any]:
        """
        The summary record, without the wall clock time
        """
        record = {
            item.name: getattr(self, item.name)
            for item in fields(self)
            if item.name != "wall_clock"
        }
        record["stages"] = [stage._asdict() for stage in self.stages]
        return record

    def save(self, directory: Path) -> None:
        """
        Write `summary.json` and `timing.json` into `directory`
        """
        text = json.dumps(self.summary(), indent=2, sort_keys=True)
        (directory / SUMMARY_FILE).write_text(text + "\n", encoding="utf-8")

        timing = json.dumps({"wall_clock": self.wall_clock}, indent=2)
        (directory / TIMING_FILE).write_text(timing + "\n", encoding="utf-8")
        logger.debug("Saved result %s to %s", self.name, directory)

    @classmethod
    def load(cls, directory: Path) -> Self:
        """
        Read a result written by `save`

        :param directory: The experiment output directory
        :raises FileNotFoundError: Without a summary in the directory
        :return: The result
        """
        record = json.loads((directory / SUMMARY_FILE).read_text(encoding="utf-8"))

        timing_file = directory / TIMING_FILE
        if timing_file.exists():
            timing = json.loads(timing_file.read_text(encoding="utf-8"))
            record["wall_clock"] = timing["wall_clock"]

        record["support"] = tuple(record["support"])
        record["element_bounds"] = tuple(
            (lower, upper) for lower, upper in record["element_bounds"]
        )
        record["weights"] = tuple(record["weights"])
        record["grad_norms"] = tuple(record["grad_norms"])
        record["f_sce_trace"] = tuple(record.get("f_sce_trace", ()))
        record["stages"] = tuple(StageRecord(**stage) for stage in record["stages"])
        return cls(**record)

