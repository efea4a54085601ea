import numpy as np
import pytest

from entm import families as fam


@pytest.fixture
def bell():
    return fam.pure_density(0.5)


def oracle_negativity(rho):
    """Negativity from an explicit index permutation and LAPACK eigenvalues."""
    pt = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    pt[2 * a + b, 2 * c + d] = rho[2 * a + d, 2 * c + b]
    return max(0.0, -2.0 * np.linalg.eigvalsh(pt)[0])


ACCEPTANCE = []


def record(criterion, ok, detail):
    line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
