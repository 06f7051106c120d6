import pytest

from ggvol import FIXTURE_NAMES, fixture_path, load

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def shipped():
    """All shipped fixture splittings, keyed by short name."""
    return {name: load(fixture_path(name))[1] for name in FIXTURE_NAMES}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
