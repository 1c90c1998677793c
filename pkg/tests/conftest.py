import pytest

_GATES = []


@pytest.fixture
def gate():
    """Record one acceptance verdict; the line is echoed now and in the run summary."""

    def record(n, ok, detail):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        _GATES.append((n, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _GATES:
        return
    terminalreporter.section("acceptance gates")
    for _, line in sorted(_GATES):
        terminalreporter.write_line(line)
