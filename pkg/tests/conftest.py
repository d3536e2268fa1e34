import pytest

from blocklea.graph import parse_partition
from blocklea.model import read_instance

from .helpers import DATA


@pytest.fixture
def example():
    return read_instance(DATA / "example.ilp")


@pytest.fixture
def example_partition():
    return parse_partition((DATA / "example.part").read_text(), 7)
