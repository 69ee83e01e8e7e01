import random
import sys
from fractions import Fraction
from itertools import combinations

import pytest

from magchar.metric import is_weak3generic, make_space


def random_rational_space(rng: random.Random, n: int, denom: int = 4):
    """Distances k/denom in [1, 2]; the triangle inequality holds automatically."""
    D = [[0] * n for _ in range(n)]
    for i, j in combinations(range(n), 2):
        D[i][j] = D[j][i] = Fraction(rng.randint(denom, 2 * denom), denom)
    return make_space(D)


def random_weak3_space(rng: random.Random, n: int):
    while True:
        X = random_rational_space(rng, n, denom=rng.choice([999_999_937, 1_000_000_007]))
        if is_weak3generic(X):
            return X


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
