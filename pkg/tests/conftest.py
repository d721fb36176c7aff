import pytest

from pfar.samples import example_instance

# filled by test_acceptance.py, one line per criterion
ACCEPTANCE_LINES = []


@pytest.fixture
def example():
    """Four-node example network and flows, paths up to 3 hops."""
    return example_instance(max_path_len=3)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
