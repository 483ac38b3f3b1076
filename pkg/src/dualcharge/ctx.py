"""
Application context managment
"""

from __future__ import annotations

import os
from contextvars import ContextVar

WORKERS_ENV = "DUALCHARGE_WORKERS"

workers_ctx: ContextVar[int] = ContextVar("workers_ctx")


def get_workers() -> int:
    """
    The number of worker threads used for chains and multistart starts.

    The context value takes priority over the `DUALCHARGE_WORKERS`
    environment variable.

    :raises ValueError: When the configured value is not a positive integer
    :return: The worker count
    """
    workers = workers_ctx.get(None)
    if workers is None:
        raw = os.environ.get(WORKERS_ENV, "1")
        try:
            workers = int(raw)
        except ValueError:
            msg = f"{WORKERS_ENV} must be an integer, got {raw!r}"
            raise ValueError(msg) from None

    if workers < 1:
        msg = f"Worker count must be at least 1, got {workers}"
        raise ValueError(msg)

    return workers
