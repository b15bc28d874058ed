import pytest
from harness import SimConfig
from mimo_utils.chest import dft_pilot
from models.constellation import qam16


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow Monte Carlo tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def constellation():
    return qam16()


@pytest.fixture
def pilot32():
    return dft_pilot(32)


@pytest.fixture
def small_config():
    """Cheap operating point for pipeline tests."""
    return SimConfig(seed=1234, m_antennas=16, tau=8, snr_db=5.0, alpha=0.0, trials=20, sweep='snr')
