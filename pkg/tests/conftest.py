import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance checklist even when stdout capture is on."""
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "CRITERION_LINES", None) if mod is not None else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
