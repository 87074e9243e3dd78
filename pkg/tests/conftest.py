import pytest

from relpoly.worlds import Domain


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") != "call" and outcome != "error":
                continue
            name = rep.nodeid.split("::")[-1]
            if "test_acceptance" in rep.nodeid and name.startswith("test_criterion_"):
                n = int(name.split("_")[2])
                lines.append((n, name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for n, name, verdict in sorted(lines):
            terminalreporter.write_line(f"criterion {n}: {verdict}  ({name})")


@pytest.fixture
def dom2():
    return Domain.of_size(2)


@pytest.fixture
def dom3():
    return Domain.of_size(3)
