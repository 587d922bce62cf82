import pytest

from padicbench.config import settings
from padicbench.localfield import POSITIVE_CHAR, FieldSpec


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: exhaustive enumerations; deselect with -m 'not slow'")


@pytest.fixture
def q3():
    return FieldSpec(3)


@pytest.fixture
def q5():
    return FieldSpec(5)


@pytest.fixture
def q7():
    return FieldSpec(7)


@pytest.fixture
def f3():
    return FieldSpec(3, POSITIVE_CHAR)


@pytest.fixture
def f5():
    return FieldSpec(5, POSITIVE_CHAR)


@pytest.fixture
def f7():
    return FieldSpec(7, POSITIVE_CHAR)


@pytest.fixture
def conductor_zero(monkeypatch):
    """Character read off the coefficient of w^-1 (trivial on Omega)."""
    monkeypatch.setattr(settings, "conductor", 0)
    yield
