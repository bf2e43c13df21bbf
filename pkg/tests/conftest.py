import pytest

from frictionsynth.config import default_config
from frictionsynth.impacts import default_mapping


@pytest.fixture(scope="session")
def cfg():
    return default_config()


@pytest.fixture(scope="session")
def mapping():
    return default_mapping()
