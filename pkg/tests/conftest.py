"""Collects the acceptance verdicts so they are printed together at the end
of the run, whatever the capture mode."""

VERDICTS: list[str] = []


def record(criterion: str, status: str, detail: str = "") -> str:
    line = f"{status}: {criterion}" + (f" ({detail})" if detail else "")
    VERDICTS.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
