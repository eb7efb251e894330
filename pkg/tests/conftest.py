"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the library's own algorithms: the
determinant oracle is cofactor expansion, the rank oracle enumerates
minors, and the expansion-sign oracle counts permutation inversions.
Expected values asserted in tests come from these, not from the code
under test.
"""

from __future__ import annotations

import itertools
import random

import pytest

from hamrank.exact import Mat


def det_cofactor(m: Mat) -> int:
    """Determinant by cofactor expansion along the first row."""
    n = m.rows
    assert m.cols == n
    if n == 0:
        return 1
    if n == 1:
        return m.at(0, 0)
    total = 0
    cols = list(range(n))
    for j in range(n):
        entry = m.at(0, j)
        if entry == 0:
            continue
        rest = m.submatrix(range(1, n), [c for c in cols if c != j])
        total += (-1) ** j * entry * det_cofactor(rest)
    return total


def brute_rank(m: Mat) -> int:
    """Largest size of a nonvanishing minor, by enumeration."""
    best = 0
    for size in range(1, min(m.rows, m.cols) + 1):
        found = False
        for rows in itertools.combinations(range(m.rows), size):
            for cols in itertools.combinations(range(m.cols), size):
                if det_cofactor(m.submatrix(rows, cols)) != 0:
                    found = True
                    break
            if found:
                break
        if found:
            best = size
        else:
            break
    return best


def hamming(x, y) -> int:
    assert len(x) == len(y)
    return sum(1 for a, b in zip(x, y) if a != b)


def expansion_sign(alpha: tuple[int, ...], beta: tuple[int, ...], k: int) -> int:
    """Sign of the unique (alpha -> beta)-matching permutation that is order
    preserving on alpha and its complement, by counting inversions."""
    co_alpha = [i for i in range(k) if i not in alpha]
    co_beta = [j for j in range(k) if j not in beta]
    perm = [0] * k
    for a, b in zip(sorted(alpha), sorted(beta)):
        perm[a] = b
    for a, b in zip(co_alpha, co_beta):
        perm[a] = b
    inversions = sum(
        1
        for i in range(k)
        for j in range(i + 1, k)
        if perm[i] > perm[j]
    )
    return -1 if inversions % 2 else 1


def random_mat(rng: random.Random, rows: int, cols: int, bound: int = 9) -> Mat:
    return Mat(
        rows, cols, tuple(rng.randint(-bound, bound) for _ in range(rows * cols))
    )


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
