import itertools
import math
import random

import pytest

ACCEPTANCE_LOG = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LOG:
        terminalreporter.write_line(line)


def leibniz_det(rows):
    """Determinant by permutation expansion; independent of elimination code."""
    n = len(rows)
    total = 0
    for perm in itertools.permutations(range(n)):
        inversions = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
        total += (-1) ** inversions * math.prod(rows[i][perm[i]] for i in range(n))
    return total


def random_primitive_prefix(rng, d, size, cap=4):
    """A primitive set of ``size`` points in Z^d with small entries."""
    from primset import is_primitive_minors, random_unimodular

    for _ in range(200):
        pts = [tuple(rng.randint(-cap, cap) for _ in range(d)) for _ in range(size)]
        if is_primitive_minors(pts):
            return pts
    # near m = d primitive sets are rare; rows of a unimodular matrix are primitive
    u = random_unimodular(d, 4 * d, 2, rng.getrandbits(32))
    return [tuple(row) for row in u[:size]]


@pytest.fixture
def rng():
    return random.Random(20240611)
