import pytest

_REPORT: list[str] = []


@pytest.fixture
def report():
    """Record one acceptance line; it is echoed now and again in the summary."""

    def record(number: int, ok: bool, detail: str, seconds: float) -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail} [{seconds:.2f}s]"
        _REPORT.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance")
        for line in _REPORT:
            terminalreporter.write_line(line)
