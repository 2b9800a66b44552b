import pytest

from hetnet_ffr.discrepancy import reference_network, reference_open_scenario

# PASS/FAIL lines from the acceptance suite, echoed in the terminal summary.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def record():
    """``record(criterion, ok, detail)`` prints and keeps one PASS/FAIL line."""

    def _record(criterion, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _record


@pytest.fixture(scope="session")
def ref_net():
    return reference_network()


@pytest.fixture(scope="session")
def open_scen():
    return reference_open_scenario()
