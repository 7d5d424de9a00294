import itertools
from functools import reduce

import numpy as np
import pytest

SIGMA_UP = np.array([[0, 0], [1, 0]], dtype=complex)  # |1><0| on one qubit


def kron_all(mats):
    return reduce(np.kron, mats)


def site_operator(op, site, n):
    return kron_all([op if k == site else np.eye(2) for k in range(n)])


def dicke_vectors(n):
    """Symmetric states with k excitations built by explicit symmetrisation
    in the 2^n product basis (bit k set = qubit k excited)."""
    vecs = []
    for k in range(n + 1):
        v = np.zeros(2**n, dtype=complex)
        for ones in itertools.combinations(range(n), k):
            idx = sum(1 << (n - 1 - q) for q in ones)
            v[idx] = 1.0
        vecs.append(v / np.linalg.norm(v))
    return np.array(vecs).T  # columns ordered by excitation number


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


ACCEPTANCE_LINES: list[str] = []


def report_criterion(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
