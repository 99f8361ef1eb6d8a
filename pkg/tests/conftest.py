import sys
from pathlib import Path

import pytest

from locprod.space import FiniteSpace

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def s2():
    return FiniteSpace.sierpinski()


@pytest.fixture
def disc2():
    return FiniteSpace.discrete(2)


@pytest.fixture
def indisc2():
    return FiniteSpace.indiscrete(2)


# --- acceptance summary ---------------------------------------------------------

_CRITERIA = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_CRITERIA] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (rep.when != "call" and not rep.failed):
        return
    number, title = marker.args
    seen = item.config.stash[_CRITERIA].setdefault(number, [title, True])
    seen[1] = seen[1] and rep.passed


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash[_CRITERIA]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
