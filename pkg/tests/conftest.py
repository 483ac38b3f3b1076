"""
Pytest default fixtures
"""

import pytest

from dualcharge import ctx
from dualcharge.experiment.validation import OracleManager
from dualcharge.model import BasisSet, Density


def pytest_addoption(parser):
    """
    Register the option enabling the desk scale reproduction runs
    """
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="run the slow reproduction tests",
    )


def pytest_collection_modifyitems(config, items):
    """
    Skip slow tests unless requested
    """
    if config.getoption("--run-slow"):
        return

    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def context_and_cleanup():
    """
    Setup and tear down the application context
    """
    workers_token = ctx.workers_ctx.set(1)
    oracles = dict(OracleManager._registered_oracles)  # pylint: disable=W0212

    yield

    OracleManager.clear_registered()
    for oracle in oracles.values():
        OracleManager.register(oracle)

    ctx.workers_ctx.reset(workers_token)


@pytest.fixture(name="line_density")
def _line_density():
    """
    Four electrons uniform on [-2, 2]
    """
    return Density.interval(-2.0, 2.0, 4)


@pytest.fixture(name="droplet")
def _droplet():
    """
    Two electrons uniform in the unit ball
    """
    return Density.droplet(2)


@pytest.fixture(name="segments")
def _segments():
    """
    Twenty segments tiling [-2, 2]
    """
    return BasisSet.segments(-2.0, 2.0, 20)


@pytest.fixture(name="shells")
def _shells():
    """
    Fifteen shells tiling the unit ball
    """
    return BasisSet.shells(1.0, 15)
