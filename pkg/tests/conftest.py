import pytest

from drmtestbed.config import TestbedConfig
from drmtestbed.testbed import Testbed


@pytest.fixture
def config():
    return TestbedConfig()


@pytest.fixture
def bed(config):
    return Testbed(config)
