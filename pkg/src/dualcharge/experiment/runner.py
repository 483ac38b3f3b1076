"""
Configuration driven experiment runs and their artifacts
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import replace
from functools import partial
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from dualcharge.experiment.result import ExperimentResult, StageRecord
from dualcharge.experiment.validation import (
    OracleManager,
    Tolerances,
    compare,
    oracle_potential_curve,
    potential_grid,
)
from dualcharge.model.charge import DualCharge, external_term
from dualcharge.optimizer.nag import nag_run
from dualcharge.zero_temp import e_n_omega, f_sce

if TYPE_CHECKING:
    from dualcharge.experiment.validation import Oracle
    from dualcharge.kernels import FloatArray
    from dualcharge.model.density import Density
    from dualcharge.optimizer.nag import OptimizerState
    from dualcharge.utils.config import ExperimentConfig
    from dualcharge.zero_temp import MultistartConfig

logger = logging.getLogger(__name__)

RESULTS_ROOT = Path("results")
CONFIG_FILE = "config.conf"
POTENTIAL_FILE = "potential.csv"
CHARGE_FILE = "charge.csv"
DEVIATIONS_FILE = "deviations.json"
LOG_FILE = "run.log"


class OutputExistsError(FileExistsError):
    """
    Raised when an output directory already holds results
    """


def default_output_dir(config: ExperimentConfig) -> Path:
    """
    The configured output directory, `results/<name>` when unset
    """
    if config.output.output_dir is not None:
        return config.output.output_dir
    return RESULTS_ROOT / config.output.name


def prepare_output(directory: Path, *, overwrite: bool) -> Path:
    """
    Create the output directory

    :param directory: The directory
    :param overwrite: Allow writing into an existing directory
    :raises OutputExistsError: When the directory exists, even empty, and
    `overwrite` is not set
    :return: The directory
    """
    if directory.exists() and not overwrite:
        msg = f"Output directory {directory} already exists, use --overwrite"
        raise OutputExistsError(msg)

    directory.mkdir(parents=True, exist_ok=True)
    return directory


def resolve_oracle(config: ExperimentConfig) -> Oracle | None:
    """
    The configured oracle for the configured density

    :raises ConfigError: When the oracle does not apply to the density
    """
    if config.output.oracle == "none":
        return None
    return OracleManager.get_oracle(config.output.oracle)(config.density.density())


def stage_seed(seed: int, stage: int) -> int:
    """
    Sampler seed of one stage of a temperature schedule, the configured
    seed for the first stage
    """
    if stage == 0:
        return seed
    sequence = np.random.SeedSequence(seed, spawn_key=(stage, 0))
    return int(sequence.generate_state(1)[0])


def _write_columns(path: Path, columns: dict[str, FloatArray]) -> None:
    np.savetxt(
        path,
        np.column_stack(list(columns.values())),
        fmt="%.17g",
        delimiter=",",
        header=",".join(columns),
        comments="",
    )


def _write_curves(
    directory: Path,
    result: ExperimentResult,
    oracle: Oracle | None,
    grid_points: int,
) -> None:
    charge = result.charge()
    rho = result.density()

    coords, points = potential_grid(rho, grid_points)
    values = charge.potential(points)
    potential_columns = {
        "r": coords,
        "v": values,
        "v_over_N": values / rho.n_electrons,
    }
    if oracle is not None:
        curve = oracle_potential_curve(oracle, values, coords, points)
        if curve is not None:
            potential_columns["oracle"] = curve
    _write_columns(directory / POTENTIAL_FILE, potential_columns)

    basis = charge.basis
    charge_columns = {
        "lower": basis.lower,
        "upper": basis.upper,
        "weight": charge.weights,
        "mass": charge.weights * basis.masses,
    }
    if oracle is not None:
        exact = oracle.shell_charge(basis)
        if exact is not None:
            charge_columns["oracle"] = exact
    _write_columns(directory / CHARGE_FILE, charge_columns)


def _trace_dual_energy(
    rho: Density,
    cfg: MultistartConfig,
    values: list[float],
    state: OptimizerState,
) -> None:
    value = f_sce(state.charge, rho, cfg)
    values.append(value)
    logger.debug("Iteration %d: F_SCE = %.10g", state.iteration, value)


def run_experiment(
    config: ExperimentConfig,
    output_dir: Path | None = None,
    *,
    overwrite: bool = False,
) -> ExperimentResult:
    """
    Run the temperature schedule of an experiment and write its artifacts.

    Every stage starts from the weights of the previous one. The final
    charge is evaluated at zero temperature, and when an oracle is
    configured, compared against it.

    :param config: The experiment configuration
    :param output_dir: Overrides the configured output directory
    :param overwrite: Allow writing into an existing output directory
    :raises ConfigError: When the configured oracle does not apply
    :raises OutputExistsError: When the output directory exists
    :return: The result, also saved to the output directory
    """
    rho = config.density.density()
    basis = config.density.basis_set()
    oracle = resolve_oracle(config)

    directory = output_dir or default_output_dir(config)
    prepare_output(directory, overwrite=overwrite)
    (directory / CONFIG_FILE).write_text(config.dump(), encoding="utf-8")

    start = time.perf_counter()
    logger.info(
        "Running %s: d = %d, N = %d, %d basis elements, beta schedule %s",
        config.output.name,
        rho.d,
        rho.n_electrons,
        len(basis),
        config.sampler.beta,
    )

    nu = np.zeros(len(basis))
    stages: list[StageRecord] = []
    grad_norms: list[float] = []
    f_sce_trace: list[float] = []
    trace_cfg = config.trace_config()
    callback = None
    if trace_cfg is not None:
        callback = partial(_trace_dual_energy, rho, trace_cfg, f_sce_trace)

    for index, beta in enumerate(config.sampler.beta):
        cfg = config.optimizer_config(beta)
        seed = stage_seed(config.sampler.seed, index)
        cfg = replace(cfg, sampler=replace(cfg.sampler, seed=seed))

        logger.info("Stage %d: beta = %g", index, beta)
        state = nag_run(nu, rho, basis, cfg, callback=callback)
        nu = state.nu

        last = state.history[-1]
        stage = StageRecord(
            beta, state.iteration, state.converged, last.mass, last.grad_norm
        )
        stages.append(stage)
        grad_norms.extend(record.grad_norm for record in state.history)
        logger.info(
            "Stage %d done after %d iterations: mass = %.6g, |g| = %.4g",
            index,
            state.iteration,
            last.mass,
            last.grad_norm,
        )

    charge = DualCharge(basis, nu)
    zero_temp = e_n_omega(charge, rho, config.multistart_config())
    external = external_term(charge, rho)
    dual_energy = zero_temp.value + external
    logger.info("Final mass %.6g, F_SCE = %.10g", charge.mass, dual_energy)

    result = ExperimentResult(
        name=config.output.name,
        config_digest=config.digest(),
        seed=config.sampler.seed,
        dimension=int(rho.d),
        n_electrons=rho.n_electrons,
        support=config.density.support(),
        element_bounds=tuple(
            (float(a), float(b)) for a, b in zip(basis.lower, basis.upper, strict=True)
        ),
        weights=tuple(float(w) for w in nu),
        mass=charge.mass,
        iterations=sum(stage.iterations for stage in stages),
        converged=stages[-1].converged,
        e_n=zero_temp.value,
        external=external,
        f_sce=dual_energy,
        grad_norms=tuple(grad_norms),
        stages=tuple(stages),
        oracle=config.output.oracle,
        f_sce_trace=tuple(f_sce_trace),
        wall_clock=time.perf_counter() - start,
    )
    result.save(directory)
    _write_curves(directory, result, oracle, config.output.grid_points)

    if oracle is not None:
        report = compare(result, oracle, Tolerances(), config.output.grid_points)
        text = json.dumps(report.to_dict(), indent=2)
        (directory / DEVIATIONS_FILE).write_text(text + "\n", encoding="utf-8")
        logger.info(
            "Oracle %s: %s",
            oracle.name,
            "passed" if report.passed else "failed",
        )

    logger.info("Results written to %s", directory)
    return result
