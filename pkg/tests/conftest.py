import pytest

from actionsynth import build_sample_library, default_params


@pytest.fixture(scope="session")
def library():
    return build_sample_library()


@pytest.fixture(scope="session")
def params():
    return default_params()
