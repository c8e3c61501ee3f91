import pytest

from stable_field_lab.simulator import load_bundled

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def example3():
    return load_bundled("example3")


@pytest.fixture(scope="session")
def nadkarni():
    return load_bundled("nadkarni")


@pytest.fixture(scope="session")
def nadkarni_alt():
    return load_bundled("nadkarni_alt_gamma0")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
