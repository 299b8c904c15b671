import pytest

from skynoma import ENVIRONMENT_PRESETS, IturLos, default_system_params


@pytest.fixture(scope="session")
def params():
    return default_system_params()


@pytest.fixture(scope="session")
def urban_los():
    return IturLos(ENVIRONMENT_PRESETS["urban"])
