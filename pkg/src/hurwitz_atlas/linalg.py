"""Gaussian elimination over Fractions."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class SingularSystem(ValueError):
    pass


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction]:
    """Solve the square system ``matrix @ x = rhs`` exactly.

    Raises SingularSystem when the matrix is rank deficient.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix) or len(rhs) != n:
        raise ValueError("solve expects a square system")
    aug = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularSystem(f"rank deficient at column {col}")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        prow = aug[col]
        for r in range(n):
            if r == col:
                continue
            f = aug[r][col]
            if f:
                row = aug[r]
                for c in range(col, n + 1):
                    row[c] -= f * prow[c] / p
    return [aug[i][n] / aug[i][i] for i in range(n)]
