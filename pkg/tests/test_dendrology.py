from fractions import Fraction as F
from math import factorial

import pytest

from hurwitz_atlas.algebra import AElement, fit, to_series
from hurwitz_atlas.dendrology import distance_histogram, enumerate_trees, path_moments
from hurwitz_atlas.guards import GUARD_ENV, GuardError
from hurwitz_atlas.series import a_sequence, generators


def _is_tree(tree):
    adj = tree.adjacency()
    seen = {1}
    stack = [1]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(tree.edges) == tree.n - 1 and len(seen) == tree.n


@pytest.mark.parametrize("n, count", [(1, 1), (2, 1), (3, 3), (4, 16), (7, 16807)])
def test_cayley_count(n, count):
    trees = list(enumerate_trees(n))
    assert len(trees) == count
    assert len({t.edges for t in trees}) == count


def test_trees_are_trees():
    assert all(_is_tree(t) for t in enumerate_trees(6))


def test_guard():
    with pytest.raises(GuardError):
        list(enumerate_trees(10))
    with pytest.raises(GuardError):
        path_moments(9, 1, "m")


def test_guard_override(monkeypatch):
    monkeypatch.setenv(GUARD_ENV, "1")
    assert path_moments(2, 1, "m") == 2


def test_moment_examples():
    assert path_moments(2, 1, "m") == 2
    assert path_moments(2, 1, "p") == 2
    assert path_moments(3, 1, "p") == 24
    assert path_moments(4, 2, "m") == 600
    with pytest.raises(ValueError):
        path_moments(3, 1, "x")


def test_histogram_total():
    # every tree contributes n(n-1) ordered pairs
    for n in range(2, 7):
        assert sum(distance_histogram(n).values()) == n ** (n - 2) * n * (n - 1)


@pytest.mark.parametrize("n", range(2, 9))
def test_p_moments_match_z_powers(n):
    z = generators("Z", n)
    for k in range(1, 4):
        assert path_moments(n, k, "p") == (z ** (k + 1))[n] * factorial(n)


@pytest.mark.parametrize("n", range(1, 9))
def test_first_moment_is_total_height(n):
    assert path_moments(n, 1, "m") == path_moments(n, 1, "p") == a_sequence(n)


def _stirling2(k, j):
    if k == j:
        return 1
    if j == 0 or j > k:
        return 0
    return j * _stirling2(k - 1, j) + _stirling2(k - 1, j - 1)


@pytest.mark.parametrize("k", [2, 3])
def test_m_moment_series_fits(k):
    # l^k = sum_j S(k, j) j! C(l, j), so sum m_{n,k} q^n/n! = sum_j S(k, j) j! Z^(j+1)
    elem = sum((AElement.Z() ** (j + 1) * (_stirling2(k, j) * factorial(j)) for j in range(1, k + 1)),
               AElement.const(0))
    series = to_series(elem, 24)
    for n in range(1, 9):
        assert series[n] * factorial(n) == path_moments(n, k, "m")
    found = [M for M in range(7) if len(series) >= 2 * M + 9 and fit(series, M, 8) == elem]
    assert found and min(found) <= 6
