"""Shared pytest fixtures.

Every test starts from the packaged config.json with no LOGOPOLE_* environment overrides, so a
setting changed by one test (or by the developer's shell) never leaks into another.
"""

import logging
import os
import sys

import pytest

# Add project root to path so the package imports without installation
sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))

from logopole_core.config import reset_settings  # noqa: E402
from logopole_core.coords import make_point  # noqa: E402

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
)
logger = logging.getLogger("test_fixtures")


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    """Drop LOGOPOLE_* overrides and the cached Settings around each test."""
    for key in list(os.environ):
        if key.startswith("LOGOPOLE_"):
            monkeypatch.delenv(key, raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture()
def settings_file(tmp_path, monkeypatch):
    """Write a JSON settings file and point LOGOPOLE_CONFIG at it; returns a writer."""
    import json

    def write(**overrides):
        path = tmp_path / "settings.json"
        path.write_text(json.dumps(overrides))
        monkeypatch.setenv("LOGOPOLE_CONFIG", str(path))
        reset_settings()
        return path

    return write


@pytest.fixture()
def point():
    """Shortcut for make_point with R = 1 and phi = 0 by default."""
    return make_point
