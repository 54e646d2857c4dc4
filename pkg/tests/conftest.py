import pytest

from likegame.engine import run_game
from likegame.scenarios import influencer, salient_type, two_player


@pytest.fixture
def qpq_config():
    return two_player(horizon=2)


@pytest.fixture(scope="session")
def salient_trace():
    return run_game(salient_type())


@pytest.fixture(scope="session")
def influencer_pair():
    return run_game(influencer(10.0, 0)), run_game(influencer(1.0, 0))


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
