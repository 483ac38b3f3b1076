"""
Dual charge experiment command line
"""

import json
import logging
import logging.config
import sys
from pathlib import Path
from typing import NoReturn

import click

import dualcharge
from dualcharge import ctx
from dualcharge.defaults import preset_path, presets
from dualcharge.experiment.runner import (
    LOG_FILE,
    OutputExistsError,
    default_output_dir,
    prepare_output,
    resolve_oracle,
    run_experiment,
)
from dualcharge.experiment.validation import Tolerances, validate
from dualcharge.utils.config import ConfigError, ExperimentConfig
from dualcharge.utils.logging import generate_default_config

logger = logging.getLogger(__name__)

EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_OUTPUT_EXISTS = 3

_TOLERANCES = Tolerances()


def _fail(msg: str, code: int) -> NoReturn:
    click.echo(msg, err=True)
    sys.exit(code)


def _load_config(config: str) -> ExperimentConfig:
    """
    Load a configuration file, falling back to the bundled presets
    """
    path = Path(config)
    if not path.exists() and config in presets():
        path = preset_path(config)
    return ExperimentConfig.from_file(path)


@click.group()
@click.version_option(dualcharge.__version__, prog_name="dualcharge")
def cli() -> None:
    """
    Compute dual charges of Coulomb transport problems
    """


@cli.command()
@click.argument("config")
@click.option(
    "--output-dir",
    type=click.Path(file_okay=False, path_type=Path),
    help="Overrides the configured output directory.",
)
@click.option("--overwrite", is_flag=True, help="Write into an existing output.")
@click.option(
    "--seed",
    type=click.IntRange(min=0),
    help="Overrides the configured seed.",
)
@click.option(
    "--workers",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    envvar=ctx.WORKERS_ENV,
    help="Worker threads for chains and multistart starts.",
)
def run(
    config: str,
    output_dir: Path | None,
    overwrite: bool,  # noqa: FBT001
    seed: int | None,
    workers: int,
) -> None:
    """
    Run the experiment of CONFIG, a file or the name of a bundled preset
    """
    try:
        experiment = _load_config(config)
        if seed is not None:
            experiment = experiment.with_seed(seed)
        resolve_oracle(experiment)
    except ConfigError as ex:
        _fail(f"Invalid configuration: {ex}", EXIT_CONFIG)

    directory = output_dir or default_output_dir(experiment)
    try:
        prepare_output(directory, overwrite=overwrite)
    except OutputExistsError as ex:
        _fail(str(ex), EXIT_OUTPUT_EXISTS)

    logging.config.dictConfig(generate_default_config(directory / LOG_FILE))
    ctx.workers_ctx.set(workers)
    logger.info("dualcharge version %s", dualcharge.__version__)

    try:
        result = run_experiment(experiment, directory, overwrite=True)
    except Exception:  # noqa: BLE001
        logger.exception("Experiment %s failed", experiment.output.name)
        sys.exit(EXIT_FAILURE)

    click.echo(f"F_SCE = {result.f_sce!r}, mass = {result.mass!r}")
    click.echo(f"Results written to {directory}")


@cli.command(name="validate")
@click.argument(
    "result",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
)
@click.argument("oracle")
@click.option("--potential-sup", type=float, default=_TOLERANCES.potential_sup)
@click.option("--potential-l2", type=float, default=_TOLERANCES.potential_l2)
@click.option("--charge-rel", type=float, default=_TOLERANCES.charge_rel)
@click.option("--mass-abs", type=float, default=_TOLERANCES.mass_abs)
@click.option(
    "--min-concentration",
    type=float,
    default=_TOLERANCES.min_concentration,
)
@click.option("--energy-low", type=float, default=_TOLERANCES.energy_low)
@click.option("--energy-high", type=float, default=_TOLERANCES.energy_high)
@click.option("--grid-points", type=click.IntRange(min=2), default=201)
def validate_command(result: Path, oracle: str, grid_points: int, **tolerances) -> None:
    """
    Compare the saved RESULT against the exact solution ORACLE
    """
    try:
        report = validate(result, oracle, Tolerances(**tolerances), grid_points)
    except ConfigError as ex:
        _fail(f"Invalid oracle: {ex}", EXIT_CONFIG)
    except FileNotFoundError as ex:
        _fail(f"No result found: {ex}", EXIT_FAILURE)

    click.echo(json.dumps(report.to_dict(), indent=2))
    if not report.passed:
        sys.exit(EXIT_FAILURE)


@cli.command(name="presets")
def list_presets() -> None:
    """
    List the bundled experiment presets
    """
    for name in presets():
        click.echo(f"{name}\t{preset_path(name)}")


def main() -> None:
    """
    Run the dualcharge command line
    """
    cli()


if __name__ == "__main__":
    main()
