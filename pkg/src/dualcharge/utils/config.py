"""
Experiment configurations
"""

import hashlib
import logging
from collections.abc import Callable
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Self

from dualcharge.kernels import Dimension
from dualcharge.model.basis import BasisSet
from dualcharge.model.density import Density
from dualcharge.optimizer.nag import OptimizerConfig
from dualcharge.sampler.langevin import SamplerConfig
from dualcharge.zero_temp import InitMode, MultistartConfig

# pylint: disable=R0902

logger = logging.getLogger(__name__)

ORACLES = ("none", "comb", "droplet2", "droplet_energy")
BASIS_KINDS = ("segments", "shells")
REQUIRED_KEYS = ("dimension", "N", "beta", "M")
SUPPORT_KEYS = {Dimension.LINE: ("lower", "upper"), Dimension.SPACE: ("radius",)}


class ConfigError(ValueError):
    """
    Raised for unknown, missing or malformed configuration keys
    """

    def __init__(self, msg: str, key: str | None = None) -> None:
        super().__init__(msg)
        self.key = key
        """The offending key"""


def _parse_int(raw: str) -> int:
    return int(raw)


def _parse_float(raw: str) -> float:
    return float(raw)


def _parse_bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in {"true", "yes", "on", "1"}:
        return True
    if lowered in {"false", "no", "off", "0"}:
        return False
    msg = f"not a boolean: {raw!r}"
    raise ValueError(msg)


def _parse_float_list(raw: str) -> tuple[float, ...]:
    values = tuple(float(item) for item in raw.split(","))
    if not values:
        msg = "empty list"
        raise ValueError(msg)
    return values


def _parse_str(raw: str) -> str:
    return raw


@dataclass(frozen=True, slots=True)
class _Key:
    section: str
    parse: Callable[[str], Any]
    check: Callable[[Any], bool] = lambda _: True
    requirement: str = ""


def _positive(value: Any) -> bool:
    return value > 0


def _non_negative(value: Any) -> bool:
    return value >= 0


_KEYS: dict[str, _Key] = {
    "name": _Key("output", _parse_str),
    "dimension": _Key(
        "density", _parse_int, lambda v: v in {1, 3}, "must be 1 or 3"
    ),
    "N": _Key(
        "density", _parse_int, lambda v: v >= 2, "must be at least 2"  # noqa: PLR2004
    ),
    "lower": _Key("density", _parse_float),
    "upper": _Key("density", _parse_float),
    "radius": _Key("density", _parse_float, _positive, "must be positive"),
    "M": _Key("density", _parse_int, _positive, "must be positive"),
    "basis": _Key(
        "density",
        _parse_str,
        lambda v: v in BASIS_KINDS,
        f"must be one of {BASIS_KINDS}",
    ),
    "beta": _Key(
        "sampler",
        _parse_float_list,
        lambda v: all(b > 0 for b in v),
        "must be positive",
    ),
    "eta": _Key("sampler", _parse_float, _positive, "must be positive"),
    "chains": _Key("sampler", _parse_int, _positive, "must be positive"),
    "steps": _Key("sampler", _parse_int, _positive, "must be positive"),
    "burn_in": _Key("sampler", _parse_int, _non_negative, "must be non-negative"),
    "thin": _Key("sampler", _parse_int, _positive, "must be positive"),
    "seed": _Key("sampler", _parse_int, _non_negative, "must be non-negative"),
    "step_size": _Key("optimizer", _parse_float, _positive, "must be positive"),
    "momentum": _Key(
        "optimizer", _parse_float, lambda v: 0 <= v < 1, "must lie in [0, 1)"
    ),
    "max_iters": _Key("optimizer", _parse_int, _positive, "must be positive"),
    "grad_tol": _Key("optimizer", _parse_float, _non_negative, "must be non-negative"),
    "project_delta_b": _Key("optimizer", _parse_bool),
    "n_starts": _Key("zero_temp", _parse_int, _positive, "must be positive"),
    "trace_starts": _Key("zero_temp", _parse_int, _positive, "must be positive"),
    "alpha": _Key("zero_temp", _parse_float, _positive, "must be positive"),
    "init": _Key(
        "zero_temp",
        _parse_str,
        lambda v: v in {mode.value for mode in InitMode},
        "must be uniform or shells",
    ),
    "grid_points": _Key(
        "output", _parse_int, lambda v: v >= 2, "must be at least 2"  # noqa: PLR2004
    ),
    "oracle": _Key(
        "output",
        _parse_str,
        lambda v: v in ORACLES,
        f"must be one of {ORACLES}",
    ),
    "output_dir": _Key("output", Path),
}


@dataclass
class _DensitySection:
    dimension: int = 1
    N: int = 2
    M: int = 1
    lower: float | None = None
    upper: float | None = None
    radius: float | None = None
    basis: str | None = None

    def __post_init__(self):
        dim = Dimension(self.dimension)
        for key in SUPPORT_KEYS[dim]:
            if getattr(self, key) is None:
                msg = f"Missing required key {key!r} for dimension {self.dimension}"
                raise ConfigError(msg, key)

        expected = "segments" if dim is Dimension.LINE else "shells"
        if self.basis is None:
            self.basis = expected
        if self.basis != expected:
            msg = f"Basis {self.basis!r} does not fit dimension {self.dimension}"
            raise ConfigError(msg, "basis")

        if dim is Dimension.LINE:
            lower, upper = self.support()
            if not upper > lower:
                msg = f"upper ({upper}) must exceed lower ({lower})"
                raise ConfigError(msg, "upper")

    def support(self) -> tuple[float, ...]:
        """`(lower, upper)` in one dimension, `(radius,)` in three"""
        keys = SUPPORT_KEYS[Dimension(self.dimension)]
        return tuple(float(getattr(self, key)) for key in keys)

    def density(self) -> Density:
        """The uniform target density"""
        if self.dimension == Dimension.LINE:
            return Density.interval(*self.support(), self.N)
        return Density.droplet(self.N, *self.support())

    def basis_set(self) -> BasisSet:
        """The evenly spaced basis tiling the support"""
        if self.dimension == Dimension.LINE:
            return BasisSet.segments(*self.support(), self.M)
        return BasisSet.shells(*self.support(), self.M)


@dataclass
class _SamplerSection:
    beta: tuple[float, ...] = (1.0,)
    eta: float | None = None
    chains: int = 8
    steps: int = 100_000
    burn_in: int = 10_000
    thin: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.steps < self.thin:
            msg = f"steps ({self.steps}) must be at least thin ({self.thin})"
            raise ConfigError(msg, "steps")


@dataclass
class _OptimizerSection:
    step_size: float | None = None
    momentum: float = 0.9
    max_iters: int = 500
    grad_tol: float = 0.0
    project_delta_b: bool = False


@dataclass
class _ZeroTempSection:
    n_starts: int | None = None
    trace_starts: int | None = None
    alpha: float | None = None
    init: str = InitMode.UNIFORM.value


@dataclass
class _OutputSection:
    name: str = "experiment"
    grid_points: int = 201
    oracle: str = "none"
    output_dir: Path | None = None

    def __post_init__(self):
        self.output_dir = Path(self.output_dir) if self.output_dir is not None else None


@dataclass
class ExperimentConfig:
    """
    The settings of one experiment run
    """

    density: _DensitySection = field(
        default_factory=lambda: _DensitySection(lower=-1.0, upper=1.0)
    )
    sampler: _SamplerSection = field(default_factory=_SamplerSection)
    optimizer: _OptimizerSection = field(default_factory=_OptimizerSection)
    zero_temp: _ZeroTempSection = field(default_factory=_ZeroTempSection)
    output: _OutputSection = field(default_factory=_OutputSection)

    def __post_init__(self):
        if isinstance(self.density, dict):
            self.density = _DensitySection(**self.density)
        if isinstance(self.sampler, dict):
            self.sampler = _SamplerSection(**self.sampler)
        if isinstance(self.optimizer, dict):
            self.optimizer = _OptimizerSection(**self.optimizer)
        if isinstance(self.zero_temp, dict):
            self.zero_temp = _ZeroTempSection(**self.zero_temp)
        if isinstance(self.output, dict):
            self.output = _OutputSection(**self.output)

    @classmethod
    def from_text(cls, text: str) -> Self:
        """
        Parses flat `key = value` lines, `#` starts a comment

        :param text: The configuration text
        :raises ConfigError: For unknown, duplicate, missing or malformed keys
        :return: The configuration
        """
        sections: dict[str, dict[str, Any]] = {
            "density": {},
            "sampler": {},
            "optimizer": {},
            "zero_temp": {},
            "output": {},
        }
        seen: set[str] = set()

        for lineno, line in enumerate(text.splitlines(), start=1):
            content = line.split("#", 1)[0].strip()
            if not content:
                continue
            if "=" not in content:
                msg = f"Line {lineno} is not of the form 'key = value': {line!r}"
                raise ConfigError(msg)

            key, raw = (part.strip() for part in content.split("=", 1))
            key_def = _KEYS.get(key)
            if key_def is None:
                msg = f"Unknown configuration key {key!r} on line {lineno}"
                raise ConfigError(msg, key)
            if key in seen:
                msg = f"Duplicate configuration key {key!r} on line {lineno}"
                raise ConfigError(msg, key)
            seen.add(key)

            try:
                value = key_def.parse(raw)
            except ValueError:
                msg = f"Malformed value for {key!r}: {raw!r}"
                raise ConfigError(msg, key) from None
            if not key_def.check(value):
                msg = f"Invalid value for {key!r}: {raw!r} {key_def.requirement}"
                raise ConfigError(msg, key)

            sections[key_def.section][key] = value

        for key in REQUIRED_KEYS:
            if key not in seen:
                msg = f"Missing required key {key!r}"
                raise ConfigError(msg, key)

        return cls(**sections)

    @classmethod
    def from_file(cls, filepath: Path) -> Self:
        """
        Loads a config from a filepath

        :param filepath: The filepath to load the config from
        :raises ConfigError: When the file is missing or invalid
        """
        try:
            text = filepath.read_text(encoding="utf-8")
        except FileNotFoundError:
            msg = f"Configuration file {filepath} not found"
            raise ConfigError(msg) from None

        logger.debug("Loaded configuration from %s", filepath)
        return cls.from_text(text)

    def dump(self) -> str:
        """
        Canonical flat text of every set key, in a fixed order
        """
        lines = []
        for section in (self.density, self.sampler, self.optimizer, self.zero_temp):
            for item in fields(section):
                value = getattr(section, item.name)
                if value is None:
                    continue
                if isinstance(value, tuple):
                    value = ", ".join(repr(v) for v in value)
                elif isinstance(value, bool):
                    value = str(value).lower()
                lines.append(f"{item.name} = {value}")
        for key in ("name", "grid_points", "oracle"):
            lines.append(f"{key} = {getattr(self.output, key)}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        """
        SHA-256 of the canonical text, identifying the experiment
        """
        return hashlib.sha256(self.dump().encode("utf-8")).hexdigest()

    def with_seed(self, seed: int) -> Self:
        """
        A copy with the seed replaced
        """
        if seed < 0:
            msg = f"seed must be non-negative, got {seed}"
            raise ConfigError(msg, "seed")
        return replace(self, sampler=replace(self.sampler, seed=seed))

    def sampler_config(self, beta: float) -> SamplerConfig:
        """
        Sampler settings at one inverse temperature
        """
        section = self.sampler
        return SamplerConfig(
            beta=beta,
            eta=section.eta,
            n_chains=section.chains,
            burn_in=section.burn_in,
            n_steps=section.steps,
            thin=section.thin,
            seed=section.seed,
            alpha=self.zero_temp.alpha,
        )

    def optimizer_config(self, beta: float) -> OptimizerConfig:
        """
        Optimizer settings at one inverse temperature
        """
        section = self.optimizer
        return OptimizerConfig(
            sampler=self.sampler_config(beta),
            step_size=section.step_size,
            momentum=section.momentum,
            max_iters=section.max_iters,
            grad_tol=section.grad_tol,
            project_delta_b=section.project_delta_b,
        )

    def multistart_config(self) -> MultistartConfig:
        """
        Zero temperature settings
        """
        return MultistartConfig(
            n_starts=self.zero_temp.n_starts,
            alpha=self.zero_temp.alpha,
            seed=self.sampler.seed,
            init=InitMode(self.zero_temp.init),
        )

    def trace_config(self) -> MultistartConfig | None:
        """
        Zero temperature settings of the per-iteration dual energy trace,
        `None` unless `trace_starts` is set
        """
        if self.zero_temp.trace_starts is None:
            return None
        return replace(self.multistart_config(), n_starts=self.zero_temp.trace_starts)
