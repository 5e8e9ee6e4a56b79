"""Pytest configuration and shared fixtures."""

import sys
import tempfile
from pathlib import Path

import pytest

# Add src directory to Python path for testing
src_path = Path(__file__).parent.parent / "src"
if str(src_path) not in sys.path:
    sys.path.insert(0, str(src_path))

from g0dist.model import G0Params, sample  # noqa: E402


@pytest.fixture
def temp_dir():
    """A scratch directory removed after the test."""
    with tempfile.TemporaryDirectory() as d:
        yield Path(d)


@pytest.fixture
def unit_params():
    """Unit-mean G0 law with a heavy tail."""
    return G0Params.unit_mean(-1.5, looks=1.0)


@pytest.fixture
def smooth_params():
    return G0Params(alpha=-3.0, gamma=2.0, looks=1.0)


@pytest.fixture
def big_sample(smooth_params):
    """5000 observations of G0(-3, 2, 1)."""
    return sample(smooth_params, 5000, seed=20240501)


@pytest.fixture
def pair_same_law(unit_params):
    """Two independent samples of 60 from the same law."""
    return sample(unit_params, 60, seed=11), sample(unit_params, 60, seed=12)


@pytest.fixture
def pair_different_law():
    """Samples of 80 from clearly different textures with unit mean."""
    return (
        sample(G0Params.unit_mean(-1.5), 80, seed=21),
        sample(G0Params.unit_mean(-3.0), 80, seed=22),
    )
