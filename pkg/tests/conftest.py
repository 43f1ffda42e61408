import numpy as np
import pytest

ACCEPTANCE_LOG = []


def log_acceptance(line):
    ACCEPTANCE_LOG.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
