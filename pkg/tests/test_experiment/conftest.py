"""
Experiment fixtures
"""

import pytest

from .results import comb_result


@pytest.fixture(name="exact_comb")
def _exact_comb():
    """
    A result reproducing the comb solution
    """
    return comb_result()
