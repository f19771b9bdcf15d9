import math

import pytest

from dcesim.modulation import TwoStepModulation


@pytest.fixture
def resonant12():
    return TwoStepModulation.resonant(1.2)


def resonant_mu(f_r):
    p = TwoStepModulation.resonant(f_r)
    return abs(math.log(f_r)) / p.period


# acceptance criteria register their verdicts here; printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
