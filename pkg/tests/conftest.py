import pytest

from randcorr.sampler import RngStream

_ACCEPTANCE = []


@pytest.fixture
def rng(request):
    # one stream per test, keyed on the test name so reordering changes nothing
    key = sum(request.node.name.encode()) * 7919 + len(request.node.name)
    return RngStream(20240601, key)


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE:
        terminalreporter.write_line(line)
