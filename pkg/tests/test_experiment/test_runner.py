"""
Test experiment runs
"""

import json
import logging
from pathlib import Path

import numpy as np
import pytest

from dualcharge.experiment import (
    ExperimentResult,
    OutputExistsError,
    default_output_dir,
    prepare_output,
    run_experiment,
)
from dualcharge.experiment.result import SUMMARY_FILE, TIMING_FILE
from dualcharge.experiment.runner import (
    CHARGE_FILE,
    CONFIG_FILE,
    DEVIATIONS_FILE,
    POTENTIAL_FILE,
    resolve_oracle,
    stage_seed,
)
from dualcharge.experiment.validation import CombOracle
from dualcharge.oracles import exact_1d_energy
from dualcharge.utils.config import ExperimentConfig

from .results import TINY


@pytest.fixture(name="tiny")
def _tiny():
    """
    A configuration running in a fraction of a second
    """
    return ExperimentConfig.from_text(TINY)


def test_output_dirs(tiny: ExperimentConfig, tmp_path: Path):
    """
    Test the default and configured output directories
    """
    assert default_output_dir(tiny) == Path("results/tiny")

    configured = ExperimentConfig.from_text(TINY + f"output_dir = {tmp_path}\n")
    assert default_output_dir(configured) == tmp_path


def test_prepare_output(tmp_path: Path):
    """
    Test existing results are only written over on request
    """
    target = tmp_path / "a" / "b"
    assert prepare_output(target, overwrite=False) == target
    assert target.is_dir()

    with pytest.raises(OutputExistsError):
        prepare_output(target, overwrite=False)

    (target / "old.txt").write_text("x", encoding="utf-8")
    with pytest.raises(OutputExistsError):
        prepare_output(target, overwrite=False)
    assert prepare_output(target, overwrite=True) == target


def test_stage_seeds():
    """
    Test the first stage keeps the configured seed
    """
    assert stage_seed(7, 0) == 7
    assert len({stage_seed(7, k) for k in range(1, 6)}) == 5
    assert stage_seed(7, 1) == stage_seed(7, 1)


def test_resolve_oracle(tiny: ExperimentConfig):
    """
    Test the configured oracle is instantiated for the density
    """
    assert isinstance(resolve_oracle(tiny), CombOracle)

    plain = ExperimentConfig.from_text(TINY.replace("oracle = comb", ""))
    assert resolve_oracle(plain) is None


def test_run(
    tiny: ExperimentConfig,
    tmp_path: Path,
    caplog: pytest.LogCaptureFixture,
):
    """
    Test a short schedule writes every artifact
    """
    output = tmp_path / "out"
    with caplog.at_level(logging.INFO, logger="dualcharge"):
        result = run_experiment(tiny, output)

    assert [stage.beta for stage in result.stages] == [1.0, 2.0]
    assert result.iterations == sum(stage.iterations for stage in result.stages)
    assert len(result.grad_norms) == result.iterations
    assert len(result.weights) == 4
    assert result.f_sce == pytest.approx(result.e_n + result.external)
    assert np.isfinite(result.f_sce)
    assert result.wall_clock > 0
    assert "Stage 1" in caplog.text

    for name in (CONFIG_FILE, SUMMARY_FILE, TIMING_FILE, POTENTIAL_FILE, CHARGE_FILE):
        assert (output / name).is_file()

    header = (output / POTENTIAL_FILE).read_text(encoding="utf-8").splitlines()[0]
    assert header == "r,v,v_over_N,oracle"
    potential = np.loadtxt(output / POTENTIAL_FILE, delimiter=",", skiprows=1)
    assert potential.shape == (11, 4)
    assert potential[:, 2] == pytest.approx(potential[:, 1] / 2)

    charge = np.loadtxt(output / CHARGE_FILE, delimiter=",", skiprows=1)
    assert charge.shape == (4, 4)
    assert charge[:, 2] == pytest.approx(result.weights)

    deviations = json.loads((output / DEVIATIONS_FILE).read_text(encoding="utf-8"))
    assert deviations["oracle"] == "comb"

    saved = ExperimentConfig.from_file(output / CONFIG_FILE)
    assert saved.digest() == tiny.digest() == result.config_digest


def test_reproducible(tiny: ExperimentConfig, tmp_path: Path):
    """
    Test identical configurations write identical summaries
    """
    run_experiment(tiny, tmp_path / "first")
    run_experiment(tiny, tmp_path / "second")

    first = (tmp_path / "first" / SUMMARY_FILE).read_text(encoding="utf-8")
    second = (tmp_path / "second" / SUMMARY_FILE).read_text(encoding="utf-8")
    assert first == second


def test_refuses_existing(tiny: ExperimentConfig, tmp_path: Path):
    """
    Test a run never silently replaces earlier results
    """
    (tmp_path / SUMMARY_FILE).write_text("{}", encoding="utf-8")

    with pytest.raises(OutputExistsError):
        run_experiment(tiny, tmp_path)

    assert (tmp_path / SUMMARY_FILE).read_text(encoding="utf-8") == "{}"


def test_refuses_empty_directory(tiny: ExperimentConfig, tmp_path: Path):
    """
    Test an existing output directory is refused even when empty
    """
    with pytest.raises(OutputExistsError):
        run_experiment(tiny, tmp_path)

    assert not any(tmp_path.iterdir())

    result = run_experiment(tiny, tmp_path, overwrite=True)
    assert (tmp_path / SUMMARY_FILE).is_file()
    assert result.f_sce_trace == ()


def test_dual_energy_trace(tiny: ExperimentConfig, tmp_path: Path):
    """
    Test the traced dual energy of every iterate stays below the exact energy
    """
    config = ExperimentConfig.from_text(TINY + "trace_starts = 16\n")
    assert config.digest() != tiny.digest()

    result = run_experiment(config, tmp_path / "out")
    exact = exact_1d_energy(result.density())

    assert len(result.f_sce_trace) == result.iterations
    assert max(result.f_sce_trace) <= exact + 1e-6

    loaded = ExperimentResult.load(tmp_path / "out")
    assert loaded.f_sce_trace == result.f_sce_trace
