import numpy as np
import pytest

from privmap.channels import full_dephasing
from privmap.codes import paper_subsystem_code

_CRITERIA = pytest.StashKey[list]()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def dephasing2():
    return full_dephasing(2)


@pytest.fixture(scope="session")
def dephasing_code():
    return paper_subsystem_code()


@pytest.fixture
def criterion(request):
    """Print and record one PASS/FAIL line for an acceptance criterion."""
    lines = request.config.stash.setdefault(_CRITERIA, [])

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        lines.append((number, line))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
