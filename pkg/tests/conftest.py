"""
Pytest configuration for dilatoo tests.
"""

import numpy as np
import pytest

from dilatoo.core.tolerance import TolerancePolicy
from dilatoo.utils.data import save_matrix


@pytest.fixture(autouse=True)
def _clean_tolerance_env(monkeypatch):
    """Keep DILATOO_* variables of the calling shell out of the tests."""
    for var in ("DILATOO_TOLERANCE", "DILATOO_REL_EQ", "DILATOO_EIG_RESIDUAL", "DILATOO_PSD_SLACK"):
        monkeypatch.delenv(var, raising=False)


@pytest.fixture
def rng():
    """Seeded generator for reproducible random matrices."""
    return np.random.default_rng(20240611)


@pytest.fixture
def policy():
    """Default thresholds."""
    return TolerancePolicy()


@pytest.fixture
def projection_pair():
    """diag(1, 0) and diag(0, 1): commuting and positive but not a monotone pair."""
    return np.diag([1.0, 0.0]), np.diag([0.0, 1.0])


@pytest.fixture
def write_matrix(tmp_path):
    """Write a matrix file into the test directory and return its path."""

    def _write(name, matrix, kind=None):
        path = tmp_path / name
        save_matrix(path, np.asarray(matrix, dtype=complex), kind)
        return str(path)

    return _write


@pytest.fixture
def random_isometry():
    """Factory for dim x cols matrices with orthonormal columns."""

    def _isometry(rng, dim, cols):
        x = rng.standard_normal((dim, cols)) + 1j * rng.standard_normal((dim, cols))
        q, _ = np.linalg.qr(x)
        return q[:, :cols]

    return _isometry
