import zlib

import numpy as np
import pytest
from scipy.stats import unitary_group

ACCEPTANCE_LINES = []


def haar(n, rng):
    return unitary_group.rvs(n, random_state=rng)


def random_density(K, rng):
    G = rng.normal(size=(K, K)) + 1j * rng.normal(size=(K, K))
    m = G @ G.conj().T
    return m / np.trace(m).real


@pytest.fixture
def rng(request):
    return np.random.default_rng(zlib.crc32(request.node.name.encode()))


def record_acceptance(number, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
