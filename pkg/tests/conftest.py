import pytest

from noma_lpwa import NetworkConfig, RadioProfile, generate_deployment


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run tests marked slow (large-N checks)")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: large-N checks, skipped by default")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def profile():
    return RadioProfile()


@pytest.fixture(scope="session")
def small_deployment(profile):
    cfg = NetworkConfig(node_count=40, channel_count=4, rng_seed=11)
    return generate_deployment(cfg, profile)
