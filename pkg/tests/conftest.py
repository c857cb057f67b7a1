import pytest

from src.harmonics.groups import FiniteGroup, GroupSubset
from src.utils.logging_config import configure_logging


@pytest.fixture(autouse=True, scope="session")
def quiet_logging():
    configure_logging(level="WARNING", colorize=False)


@pytest.fixture
def z101() -> FiniteGroup:
    return FiniteGroup.cyclic(101)


@pytest.fixture
def f3_4() -> FiniteGroup:
    return FiniteGroup.vector(3, 4)


@pytest.fixture
def interval_101(z101):
    """{-10..10} in Z/101Z."""
    return GroupSubset.from_members(z101, [x % 101 for x in range(-10, 11)])
