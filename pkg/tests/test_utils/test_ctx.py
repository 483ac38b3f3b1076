"""
Test the application context
"""

import pytest

from dualcharge import ctx


def test_context_value():
    """
    Test the context value is used when set
    """
    assert ctx.get_workers() == 1

    token = ctx.workers_ctx.set(3)
    try:
        assert ctx.get_workers() == 3
    finally:
        ctx.workers_ctx.reset(token)


def test_environment(monkeypatch: pytest.MonkeyPatch):
    """
    Test the environment variable backs an unset context
    """
    token = ctx.workers_ctx.set(None)  # type: ignore[arg-type]
    try:
        monkeypatch.setenv(ctx.WORKERS_ENV, "5")
        assert ctx.get_workers() == 5

        monkeypatch.delenv(ctx.WORKERS_ENV)
        assert ctx.get_workers() == 1

        monkeypatch.setenv(ctx.WORKERS_ENV, "many")
        with pytest.raises(ValueError):
            ctx.get_workers()
    finally:
        ctx.workers_ctx.reset(token)


def test_invalid_count():
    """
    Test non-positive worker counts
    """
    token = ctx.workers_ctx.set(0)
    try:
        with pytest.raises(ValueError):
            ctx.get_workers()
    finally:
        ctx.workers_ctx.reset(token)
