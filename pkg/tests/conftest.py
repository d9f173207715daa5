import pytest

from svmaj.numerics import PrecisionConfig, RngStream


@pytest.fixture
def cfg40():
    return PrecisionConfig(digits=40)


@pytest.fixture
def cfg60():
    return PrecisionConfig(digits=60)


@pytest.fixture
def stream():
    return RngStream(seed=20240817, stream_index=0)
