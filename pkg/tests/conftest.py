import random

import pytest

from qfgenus.forms import det


def random_form(rng: random.Random, n: int, lo: int = -20, hi: int = 20, det_bound: int = 10**6):
    """Symmetric integer matrix with nonzero determinant of bounded size."""
    while True:
        Q = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                Q[i][j] = Q[j][i] = rng.randint(lo, hi)
        d = det(Q)
        if d and abs(d) <= det_bound:
            return Q


def random_unimodular(rng: random.Random, n: int, steps: int = 6):
    """Product of elementary integer matrices."""
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        c = rng.randint(-2, 2)
        for r in range(n):
            U[r][j] += c * U[r][i]
    return U


def block_form(rng: random.Random, n: int, det_bits: int):
    """Block-diagonal form mixing odd, scaled and even binary blocks, |det| < 2^det_bits."""
    while True:
        rows = [[0] * n for _ in range(n)]
        i = 0
        while i < n:
            if i + 1 < n and rng.random() < 0.2:
                a, c = rng.randint(-3, 3), rng.randint(-3, 3)
                b = rng.choice([1, 3, 5, 2, 4])
                rows[i][i], rows[i + 1][i + 1] = 2 * a, 2 * c
                rows[i][i + 1] = rows[i + 1][i] = b
                i += 2
            else:
                rows[i][i] = rng.choice([1, -1]) * rng.choice([1, 1, 1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 25, 27])
                i += 1
        d = det(rows)
        if d and abs(d) < 2 ** det_bits:
            return rows


@pytest.fixture
def rng():
    return random.Random(12345)
