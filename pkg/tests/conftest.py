import pytest

from holcliff.algebra import AlgebraConfig


@pytest.fixture(scope="session")
def cfg1():
    return AlgebraConfig(1)


@pytest.fixture(scope="session")
def cfg2():
    return AlgebraConfig(2)
