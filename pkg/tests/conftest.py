"""Pytest fixtures for tests."""

import numpy as np
import pytest

from hurdle_glrm.telemetry import configure_logfire


@pytest.fixture(autouse=True, scope="session")
def quiet_logfire():
    """Configure logfire once with nothing shipped."""
    configure_logfire("hurdle-glrm-tests")


@pytest.fixture(name="rng")
def rng_fixture():
    """A fresh seeded generator per test."""
    return np.random.Generator(np.random.PCG64(20240611))
