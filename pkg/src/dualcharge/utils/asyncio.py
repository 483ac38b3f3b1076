"""
Worker thread helpers
"""

import itertools
import logging
from collections.abc import Callable, Sequence
from functools import partial

import anyio
import anyio.to_thread

from dualcharge import ctx

logger = logging.getLogger(__name__)


async def gather_in_threads[T](
    jobs: Sequence[Callable[[], T]],
    limit: int,
) -> list[T]:
    """
    Run blocking jobs in worker threads and collect their results.

    The results are returned in submission order regardless of the order
    the jobs complete in.

    :param jobs: The blocking callables to run
    :param limit: The maximum number of jobs running at once
    :return: The job results
    """
    limiter = anyio.CapacityLimiter(limit)
    results: list[T | None] = [None] * len(jobs)

    async def _run(index: int, job: Callable[[], T]) -> None:
        results[index] = await anyio.to_thread.run_sync(job, limiter=limiter)

    async with anyio.create_task_group() as tg:
        for index, job in enumerate(jobs):
            tg.start_soon(_run, index, job)

    return results  # type: ignore[return-value]


def run_jobs[T](jobs: Sequence[Callable[[], T]]) -> list[T]:
    """
    Synchronously run jobs using the configured number of workers.

    :param jobs: The blocking callables to run
    :return: The job results in submission order
    """
    workers = min(ctx.get_workers(), len(jobs))
    if workers <= 1:
        return [job() for job in jobs]

    logger.debug("Dispatching %d jobs to %d worker threads", len(jobs), workers)
    return anyio.run(partial(gather_in_threads, jobs, workers))


def partition(count: int, parts: int) -> list[range]:
    """
    Split `range(count)` into at most `parts` contiguous, non-empty ranges

    :param count: The number of items
    :param parts: The requested number of groups
    :return: The ranges in ascending order
    """
    parts = max(1, min(parts, count))
    bounds = [round(i * count / parts) for i in range(parts + 1)]
    return [range(lo, hi) for lo, hi in itertools.pairwise(bounds) if hi > lo]
