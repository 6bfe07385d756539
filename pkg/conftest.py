"""Shared pytest fixtures; living at the repository root puts ``src`` on sys.path."""

import random

import pytest

from src.app.settings import get_settings


@pytest.fixture
def rng():
    return random.Random(get_settings().random_seed)


@pytest.fixture
def fresh_settings(monkeypatch):
    """Settings re-read after the test adjusts the environment."""

    def load(**env):
        for key, value in env.items():
            monkeypatch.setenv(key, str(value))
        return get_settings(refresh=True)

    yield load
    monkeypatch.undo()
    get_settings(refresh=True)
