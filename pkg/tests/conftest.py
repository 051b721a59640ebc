import pytest

from rewardbound.envs.coverage import build_guidance, standard_config
from rewardbound.envs.coverage import build as build_coverage

from smallworlds import fork_world, min_time_config


@pytest.fixture
def fork():
    return fork_world()


@pytest.fixture
def fork_cfg():
    return min_time_config()


@pytest.fixture(scope="session")
def std_config():
    return standard_config()


@pytest.fixture(scope="session")
def std_problem(std_config):
    return build_coverage(std_config)


@pytest.fixture(scope="session")
def std_guidance(std_config):
    return build_guidance(std_config)
