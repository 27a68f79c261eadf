import pytest

from nbwalk.graph import named_graph

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture(scope="session")
def acceptance(request):
    """Record one verdict line per acceptance criterion; printed in the terminal summary."""
    log = request.config.stash[_ACCEPTANCE]

    def record(criterion, passed, detail=""):
        log.append((criterion, bool(passed), detail))
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_ACCEPTANCE, [])
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(log, key=lambda x: x[0]):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}  {detail}")


@pytest.fixture(scope="session")
def k4():
    return named_graph("k4")


@pytest.fixture(scope="session")
def petersen():
    return named_graph("petersen")


@pytest.fixture(scope="session")
def k33():
    return named_graph("k33")


@pytest.fixture(scope="session")
def q3():
    return named_graph("q3")
