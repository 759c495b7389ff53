import pytest

from infodesign.core import MarketPrimitives, Uniform01


@pytest.fixture
def mkt13():
    return MarketPrimitives(1.0, 3.0)


@pytest.fixture
def mkt23():
    return MarketPrimitives(2.0, 3.0)


@pytest.fixture
def mkt12():
    return MarketPrimitives(1.0, 2.0)


@pytest.fixture
def uniform():
    return Uniform01()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
