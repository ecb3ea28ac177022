import pytest

from src.schemas import AttnDims
from src.services.suites import Sample
from src.tensor import Rng
from tests.helpers import make_sample


@pytest.fixture
def rng() -> Rng:
    return Rng(42)


@pytest.fixture
def small_dims() -> AttnDims:
    return AttnDims(height=3, width=4, channels=2, query_channels=2, value_channels=3)


@pytest.fixture
def sample() -> Sample:
    return make_sample(3, 4, 2, 3)
