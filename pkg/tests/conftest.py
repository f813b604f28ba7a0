import pytest

ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one pass/fail line; the line is printed when the check returns."""

    def record(number, title, ok, detail=""):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {title}" + (f" ({detail})" if detail else "")
        ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
