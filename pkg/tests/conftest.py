import numpy as np
import pytest


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    entries = []
    for status, flag in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" in nodeid and "::" in nodeid:
                entries.append((nodeid.split("::")[-1], flag))
    if entries:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, flag in sorted(set(entries)):
            terminalreporter.write_line(f"{flag}: {name}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
