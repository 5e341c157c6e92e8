"""Brute-force moments of the marked-pair distance on Cayley trees."""

from __future__ import annotations

import heapq
import itertools
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator

from .guards import GuardError, guard_exceeded

MAX_TREE_VERTICES = 9
MAX_MOMENT_VERTICES = 8


@dataclass(frozen=True)
class LabeledTree:
    n: int
    edges: tuple[tuple[int, int], ...]

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in range(1, self.n + 1)}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


def prufer_decode(seq: tuple[int, ...], n: int) -> tuple[tuple[int, int], ...]:
    degree = [1] * (n + 1)
    for v in seq:
        degree[v] += 1
    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, v), max(leaf, v)))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    a, b = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((a, b))
    return tuple(sorted(edges))


def enumerate_trees(n: int) -> Iterator[LabeledTree]:
    """Every labeled tree on {1..n}, once each, via Prüfer sequences."""
    if n < 1 or guard_exceeded(n > MAX_TREE_VERTICES):
        raise GuardError(f"tree enumeration supports 1 <= n <= {MAX_TREE_VERTICES}, got {n}")
    if n == 1:
        yield LabeledTree(1, ())
        return
    if n == 2:
        yield LabeledTree(2, ((1, 2),))
        return
    for seq in itertools.product(range(1, n + 1), repeat=n - 2):
        yield LabeledTree(n, prufer_decode(seq, n))


def _distances_from(adj: dict[int, list[int]], src: int) -> dict[int, int]:
    dist = {src: 0}
    frontier = [src]
    while frontier:
        nxt = []
        for v in frontier:
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


@lru_cache(maxsize=None)
def distance_histogram(n: int) -> dict[int, int]:
    """Number of (tree, ordered pair of distinct vertices) at each distance."""
    hist: Counter[int] = Counter()
    for tree in enumerate_trees(n):
        adj = tree.adjacency()
        for a in range(1, n + 1):
            for b, d in _distances_from(adj, a).items():
                if b != a:
                    hist[d] += 1
    return dict(hist)


def path_moments(n: int, k: int, kind: str) -> int:
    """``m_{n,k} = sum l^k`` or ``p_{n,k} = sum C(l, k)`` over marked trees."""
    if guard_exceeded(n > MAX_MOMENT_VERTICES) or n < 1:
        raise GuardError(f"moment enumeration supports 1 <= n <= {MAX_MOMENT_VERTICES}, got {n}")
    if k < 0:
        raise ValueError("k must be non-negative")
    hist = distance_histogram(n)
    if kind == "m":
        return sum(count * l**k for l, count in hist.items())
    if kind == "p":
        return sum(count * comb(l, k) for l, count in hist.items())
    raise ValueError(f"kind must be 'm' or 'p', got {kind!r}")

