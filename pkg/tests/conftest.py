import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rolloutmix import load_fixture  # noqa: E402
from fixtures import build  # noqa: E402


@pytest.fixture(scope="session")
def fig2():
    return load_fixture("fig2")


@pytest.fixture(scope="session")
def t1():
    return load_fixture("t1")


@pytest.fixture(scope="session")
def p_hom():
    return load_fixture("p_hom")


@pytest.fixture(scope="session")
def small():
    """Hand-built tiny fixtures keyed by name."""
    return {name: build(name) for name in ("H2", "H3", "H4", "H5", "N1")}


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
