import itertools

import numpy as np
import pytest

from gpstd import fixtures
from gpstd.symtensor import SymTensor, monomials


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_tensor(n, m, rng):
    return SymTensor(n, m, crandn(rng, len(monomials(n, m))))


def full_power_sum(U, m):
    """Independent oracle: sum of outer powers built with numpy only."""
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    out = 0
    for u in U:
        T = np.array(1.0 + 0j)
        for _ in range(m):
            T = np.multiply.outer(T, u)
        out = out + T
    return out


def sorted_tuples(n, m):
    return list(itertools.combinations_with_replacement(range(n + 1), m))


EX13_POINTS = np.array([[-2, -1], [1, 2], [2, -2]], dtype=complex)
EX13_WEIGHTS = np.array([3, 5, -1], dtype=complex)


@pytest.fixture
def ex13():
    return fixtures.build("example_1_3")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# One line per acceptance criterion, printed at the end of the run.
CRITERIA: dict = {}


def record(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    CRITERIA[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[k])
