import pytest

from aoikit.core import SourceLoads


@pytest.fixture
def sym05():
    return SourceLoads(1.0, (0.5, 0.5))
