import time

import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report_line():
    def record(check, **kwargs):
        start = time.perf_counter()
        result = check(**kwargs)
        result.seconds = time.perf_counter() - start
        line = result.line()
        ACCEPTANCE_LINES.append(line)
        print(line)
        return result
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
