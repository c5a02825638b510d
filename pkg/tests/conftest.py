import pytest

_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(label, passed, detail)`` then assert."""

    def record(label, passed, detail=""):
        line = f"{'PASS' if passed else 'FAIL'} criterion {label}: {detail}"
        _CRITERIA[label] = line
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[label])
