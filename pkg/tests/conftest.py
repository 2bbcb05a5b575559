import numpy as np
import pytest

from elo_lab import ScenarioParams


@pytest.fixture
def reference():
    """M=15 teams, v=3, no home advantage."""
    return ScenarioParams(15, 3.0, 0.0)


def gauss_hermite_expectation(f, eta, v, nodes=96):
    """E f(z) for z ~ N(eta, 2v) with probabilists' Gauss-Hermite quadrature."""
    x, w = np.polynomial.hermite_e.hermegauss(nodes)
    z = eta + np.sqrt(2.0 * v) * x
    return float(np.sum(w * f(z)) / np.sqrt(2.0 * np.pi))


ACCEPTANCE_LINES = []


def record_criterion(number, title, ok, detail=""):
    line = f"criterion {number:>2} [{'PASS' if ok else 'FAIL'}] {title}"
    if detail:
        line += f" :: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1])):
            terminalreporter.write_line(line)
