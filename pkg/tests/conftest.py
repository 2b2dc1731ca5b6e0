"""
Shared pytest configuration and fixtures.
"""

import pytest
import tempfile
import shutil
from pathlib import Path
import sys

import numpy as np

# Add the project root to the Python path to ensure imports work
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.layout import build_layout  # noqa: E402


@pytest.fixture(scope="session")
def project_root_path():
    """Provide the project root path."""
    return Path(__file__).parent.parent


@pytest.fixture
def temp_directory():
    """Create a temporary directory for test files."""
    temp_dir = tempfile.mkdtemp()
    yield Path(temp_dir)
    shutil.rmtree(temp_dir)


@pytest.fixture
def rng():
    """Seeded generator so random checks are reproducible."""
    return np.random.default_rng(20240611)


@pytest.fixture
def layout_factory():
    """Build (cached) subspace layouts by qubit count."""
    return build_layout


@pytest.fixture
def random_hermitian(rng):
    """Factory for random dense Hermitian matrices of a given dimension."""

    def make(dim: int) -> np.ndarray:
        X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        return (X + X.conj().T) / 2

    return make
