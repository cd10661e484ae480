import numpy as np
import pytest

from src.models import ProcessSpec
from src.opcore import GridContext, LinOp


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="Jalankan test Monte Carlo yang lambat")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: Monte Carlo test yang lambat (butuh --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="butuh --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def grid16():
    return GridContext(16)


@pytest.fixture
def grid32():
    return GridContext(32)


@pytest.fixture
def grid64():
    return GridContext(64)


@pytest.fixture
def default_spec():
    return ProcessSpec()


@pytest.fixture
def random_linop(rng):
    """Factory: LinOp complex acak pada grid"""
    def make(grid: GridContext) -> LinOp:
        m = grid.m
        return LinOp(rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)), grid)
    return make


@pytest.fixture
def random_psd(rng):
    """Factory: LinOp self-adjoint positive definite acak"""
    def make(grid: GridContext) -> LinOp:
        m = grid.m
        root = rng.standard_normal((m, 2 * m)) + 1j * rng.standard_normal((m, 2 * m))
        return LinOp(root @ np.conj(root.T) / (2 * m), grid)
    return make
