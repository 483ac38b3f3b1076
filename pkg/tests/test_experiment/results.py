"""
Hand built experiment configurations and results
"""

from dualcharge.experiment import ExperimentResult, StageRecord

TINY = """
name = tiny
dimension = 1
N = 2
lower = -1
upper = 1
M = 4
beta = 1, 2
chains = 2
steps = 40
burn_in = 10
thin = 4
max_iters = 2
n_starts = 4
grid_points = 11
oracle = comb
"""
"""Two electrons on a line, running in a fraction of a second"""


def comb_result(f_sce: float = -10.0) -> ExperimentResult:
    """
    A result for four electrons on [-2, 2] whose charge smears the exact
    comb over the two segments next to every breakpoint
    """
    bounds = tuple((-2.0 + 0.1 * k, -2.0 + 0.1 * (k + 1)) for k in range(40))
    weights = [0.0] * 40
    for k in (9, 10, 19, 20, 29, 30):
        weights[k] = 5.0

    return ExperimentResult(
        name="comb",
        config_digest="0" * 64,
        seed=0,
        dimension=1,
        n_electrons=4,
        support=(-2.0, 2.0),
        element_bounds=bounds,
        weights=tuple(weights),
        mass=3.0,
        iterations=12,
        converged=True,
        e_n=f_sce + 14.0,
        external=-14.0,
        f_sce=f_sce,
        grad_norms=tuple(1.0 / (k + 1) for k in range(12)),
        stages=(StageRecord(10.0, 12, True, 3.0, 1.0 / 12),),
        oracle="comb",
        wall_clock=1.5,
    )
