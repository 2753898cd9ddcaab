import pytest

from frobtrace.curves import Curve

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")
    config.stash[_ACCEPTANCE] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "call" or rep.failed:
        number, title = mark.args
        item.config.stash[_ACCEPTANCE].append((number, title, "PASS" if rep.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_ACCEPTANCE, [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status in sorted(results):
        terminalreporter.write_line(f"criterion {number} [{title}]: {status}")


@pytest.fixture(scope="session")
def e1():
    return Curve.short(1, 1, label="E1")


@pytest.fixture(scope="session")
def e2():
    return Curve.short(2, 3, label="E2")


@pytest.fixture(scope="session")
def pair(e1, e2):
    return [e1, e2]


@pytest.fixture(scope="session")
def pair_table(pair):
    """Traces of the fixture pair at every good prime up to 10^5."""
    from frobtrace.survey import compute_table

    return compute_table(pair, 10**5)
