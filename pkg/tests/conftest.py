import pytest
from hypothesis import HealthCheck, settings

from magk.catalog import load_group
from magk.groups import build_semidirect

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def d4():
    return build_semidirect(4, 2, 3, "on_h")


@pytest.fixture(scope="session")
def c4t():
    return load_group("c4t-sz", "builtin")


@pytest.fixture(scope="session")
def kh():
    return load_group("kh", "builtin")
