"""Half-edge multigraphs with a star vertex.

A decorated graph has a star vertex ``"*"``, numbered vertices ``1..n`` and,
after simplification, anonymous vertices.  Loops and multiple edges are
allowed, so the structure is kept as half-edges: ``half[h]`` is the vertex
carrying half-edge ``h`` and ``partner`` is the fixed-point-free involution
pairing half-edges into edges.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from pathlib import Path
from typing import Hashable, Iterable, Sequence

from .algebra import AElement
from .guards import GuardError, guard_exceeded

STAR = "*"
MAX_EXTENSION_VERTICES = 6


class SimplificationError(ValueError):
    pass


def _vertex_kind(v) -> str:
    if v == STAR:
        return "star"
    if isinstance(v, int):
        return "numbered"
    return "anon"


class MultiGraph:
    """Half-edge multigraph.  Vertex ids: ``"*"``, ints (numbered), str (anonymous)."""

    __slots__ = ("vertices", "half", "partner")

    def __init__(self, vertices: Iterable[Hashable], half: Sequence, partner: Sequence[int]):
        self.vertices = tuple(vertices)
        self.half = tuple(half)
        self.partner = tuple(partner)
        if STAR not in self.vertices:
            raise ValueError("a decorated graph needs the star vertex")
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        if len(self.half) != len(self.partner):
            raise ValueError("half-edge arrays differ in length")
        for h, p in enumerate(self.partner):
            if p == h or self.partner[p] != h:
                raise ValueError("pairing must be a fixed-point-free involution")
            if self.half[h] not in vs:
                raise ValueError(f"half-edge {h} sits on unknown vertex {self.half[h]!r}")

    @classmethod
    def from_edges(cls, vertices: Iterable[Hashable], edges: Iterable[tuple]) -> "MultiGraph":
        half: list = []
        partner: list[int] = []
        for a, b in edges:
            h = len(half)
            half += [a, b]
            partner += [h + 1, h]
        return cls(vertices, half, partner)

    def edges(self) -> list[tuple]:
        out = []
        for h, p in enumerate(self.partner):
            if h < p:
                out.append((self.half[h], self.half[p]))
        return out

    def valency(self, v) -> int:
        return sum(1 for x in self.half if x == v)

    def valencies(self) -> dict:
        c = Counter(self.half)
        return {v: c.get(v, 0) for v in self.vertices}

    @property
    def num_edges(self) -> int:
        return len(self.half) // 2

    def euler_characteristic(self) -> int:
        return len(self.vertices) - self.num_edges

    def non_star_count(self) -> int:
        return len(self.vertices) - 1

    def star_valency(self) -> int:
        return self.valency(STAR)

    def kind(self, v) -> str:
        return _vertex_kind(v)

    def components(self) -> list[set]:
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges():
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        groups: dict = defaultdict(set)
        for v in self.vertices:
            groups[find(v)].add(v)
        return list(groups.values())

    def __repr__(self):
        return f"MultiGraph(vertices={list(self.vertices)!r}, edges={self.edges()!r})"

    # serialization

    def to_dict(self) -> dict:
        slots: Counter = Counter()
        names = []
        for v in self.half:
            names.append([_json_id(v), slots[v]])
            slots[v] += 1
        edges = [[names[h], names[p]] for h, p in enumerate(self.partner) if h < p]
        return {
            "vertices": [{"id": _json_id(v), "kind": _vertex_kind(v)} for v in self.vertices],
            "edges": edges,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MultiGraph":
        ids = {}
        vertices = []
        for entry in data["vertices"]:
            kind = entry["kind"]
            raw = entry["id"]
            if kind == "star":
                vid = STAR
            elif kind == "numbered":
                vid = int(raw)
            elif kind == "anon":
                vid = str(raw)
                if vid == STAR:
                    raise ValueError("anonymous vertex cannot be named '*'")
            else:
                raise ValueError(f"unknown vertex kind {kind!r}")
            ids[str(raw)] = vid
            vertices.append(vid)
        edges = []
        seen = set()
        for (va, sa), (vb, sb) in data["edges"]:
            for key in ((str(va), sa), (str(vb), sb)):
                if key in seen:
                    raise ValueError(f"half-edge {key} used twice")
                seen.add(key)
            edges.append((ids[str(va)], ids[str(vb)]))
        return cls.from_edges(vertices, edges)


def _json_id(v):
    return v if isinstance(v, int) else str(v)


# simplification -------------------------------------------------------------


def _protected(v, p: int) -> bool:
    return v == STAR or (isinstance(v, int) and 1 <= v <= p)


def check_component_condition(g: MultiGraph, p: int = 0) -> None:
    """Each component holds a protected vertex or has cycle rank >= 2."""
    edges = g.edges()
    for comp in g.components():
        if any(_protected(v, p) for v in comp):
            continue
        e = sum(1 for a, _ in edges if a in comp)
        if e - len(comp) + 1 < 2:
            raise SimplificationError(
                f"unsimplifiable component: {sorted(map(str, comp))} has no protected vertex "
                "and fewer than two independent cycles"
            )


def reduce_graph(g: MultiGraph, p: int = 0, rng: random.Random | None = None) -> MultiGraph:
    """Apply (S) and (D) until neither applies; numbering is left intact."""
    check_component_condition(g, p)
    edges: dict[int, list] = {i: list(e) for i, e in enumerate(g.edges())}
    inc: dict = defaultdict(list)  # vertex -> incident edge ids, loops listed twice
    for i, (a, b) in edges.items():
        inc[a].append(i)
        inc[b].append(i)
    alive = set(g.vertices)
    next_id = len(edges)

    def candidates():
        return [
            v for v in alive
            if not _protected(v, p) and 1 <= len(inc[v]) <= 2
            and not (len(inc[v]) == 1 and STAR in edges[inc[v][0]])
        ]

    while True:
        cands = candidates()
        if not cands:
            break
        if rng is None:
            v = min(cands, key=lambda x: (isinstance(x, str), str(x) if isinstance(x, str) else x))
        else:
            v = rng.choice(sorted(cands, key=str))
        ids = inc[v]
        if len(ids) == 1:
            (eid,) = ids
            a, b = edges.pop(eid)
            w = b if a == v else a
            inc[w].remove(eid)
            del inc[v]
            alive.discard(v)
            continue
        e1, e2 = ids
        if e1 == e2:
            raise SimplificationError(f"unsimplifiable component: isolated loop at {v!r}")
        ends = []
        for eid in (e1, e2):
            a, b = edges.pop(eid)
            w = b if a == v else a
            inc[w].remove(eid)
            ends.append(w)
        del inc[v]
        alive.discard(v)
        edges[next_id] = ends
        inc[ends[0]].append(next_id)
        inc[ends[1]].append(next_id)
        next_id += 1

    for v in list(alive):
        if not _protected(v, p) and not inc[v]:
            raise SimplificationError(f"unsimplifiable component: isolated vertex {v!r}")
    order = [v for v in g.vertices if v in alive]
    return MultiGraph.from_edges(order, [tuple(e) for _, e in sorted(edges.items())])


def _forget_numbers(g: MultiGraph, p: int) -> MultiGraph:
    rename = {}
    for v in g.vertices:
        if isinstance(v, int) and v > p:
            rename[v] = f"v{v}"
        else:
            rename[v] = v
    return MultiGraph.from_edges([rename[v] for v in g.vertices], [(rename[a], rename[b]) for a, b in g.edges()])


def is_simple(g: MultiGraph) -> bool:
    vals = g.valencies()
    return all(vals[v] >= 3 for v in g.vertices if _vertex_kind(v) == "anon")


def simplify(g: MultiGraph, p: int = 0, rng: random.Random | None = None) -> MultiGraph:
    """(S)/(D)-reduce ``g`` keeping ``*`` and vertices ``1..p``; forget other numbers."""
    reduced = _forget_numbers(reduce_graph(g, p, rng), p)
    if not is_simple(reduced):
        raise SimplificationError(
            "unsimplifiable component: a leaf attached to the star cannot be erased "
            "without changing the star valency"
        )
    return reduced


# isomorphism and automorphisms --------------------------------------------------


def _multiplicities(g: MultiGraph) -> Counter:
    m: Counter = Counter()
    for a, b in g.edges():
        m[frozenset((a, b)) if a != b else frozenset((a,))] += 1
    return m


def _anon_groups(g: MultiGraph) -> list[tuple[tuple[int, int], list]]:
    """Anonymous vertices bucketed by (valency, loop count), buckets in key order."""
    vals = g.valencies()
    loops = Counter(a for a, b in g.edges() if a == b)
    groups: dict = defaultdict(list)
    for v in g.vertices:
        if _vertex_kind(v) == "anon":
            groups[(vals[v], loops[v])].append(v)
    return sorted(groups.items())


def _labelled_orders(g: MultiGraph):
    fixed = [STAR] + sorted(v for v in g.vertices if _vertex_kind(v) == "numbered")
    groups = [grp for _, grp in _anon_groups(g)]
    for perms in itertools.product(*(itertools.permutations(grp) for grp in groups)):
        yield fixed + [v for perm in perms for v in perm]


def _matrix_key(g: MultiGraph, order: list) -> tuple:
    pos = {v: i for i, v in enumerate(order)}
    return tuple(sorted(tuple(sorted((pos[a], pos[b]))) for a, b in g.edges()))


def canonical_form(g: MultiGraph) -> tuple:
    """Isomorphism invariant fixing ``*`` and numbered vertices."""
    fixed = tuple(sorted(v for v in g.vertices if _vertex_kind(v) == "numbered"))
    shape = tuple((key, len(grp)) for key, grp in _anon_groups(g))
    best = min(_matrix_key(g, order) for order in _labelled_orders(g))
    return (fixed, shape, best)


def is_isomorphic(g: MultiGraph, h: MultiGraph) -> bool:
    return canonical_form(g) == canonical_form(h)


def automorphism_count(g: MultiGraph) -> int:
    """Order of the half-edge permutation group preserving vertices and pairing.

    ``*`` and numbered vertices are fixed; anonymous vertices may be permuted
    among themselves.
    """
    vals = g.valencies()
    if any(vals[v] == 0 and _vertex_kind(v) == "anon" for v in g.vertices):
        # isolated vertices carry no half-edges, so permuting them is invisible
        g = MultiGraph.from_edges([v for v in g.vertices if vals[v] or _vertex_kind(v) != "anon"],
                                  g.edges())
    base = next(_labelled_orders(g))
    ref = _matrix_key(g, base)
    vertex_auts = sum(1 for order in _labelled_orders(g) if _matrix_key(g, order) == ref)
    local = 1
    for key, m in _multiplicities(g).items():
        local *= factorial(m)
        if len(key) == 1:
            local *= 2**m
    return vertex_auts * local


def automorphism_count_bruteforce(g: MultiGraph) -> int:
    """Exhaustive search over half-edge permutations (for small graphs)."""
    H = len(g.half)
    if guard_exceeded(H > 10):
        raise GuardError("brute-force automorphism search limited to 10 half-edges")
    count = 0
    for perm in itertools.permutations(range(H)):
        vmap: dict = {}
        ok = True
        for h in range(H):
            src, dst = g.half[h], g.half[perm[h]]
            if vmap.setdefault(src, dst) != dst:
                ok = False
                break
            if perm[g.partner[h]] != g.partner[perm[h]]:
                ok = False
                break
        if not ok:
            continue
        if len(set(vmap.values())) != len(vmap):
            continue
        if any(_vertex_kind(v) != "anon" and vmap.get(v, v) != v for v in g.vertices):
            continue
        if any(_vertex_kind(v) == "anon" and _vertex_kind(vmap.get(v, v)) != "anon" for v in g.vertices):
            continue
        count += 1
    return count


def disjoint_union(g: MultiGraph, h: MultiGraph) -> MultiGraph:
    """Glue two decorated graphs along their star vertices; other ids must not clash."""
    clash = (set(g.vertices) & set(h.vertices)) - {STAR}
    if clash:
        raise ValueError(f"vertex ids clash: {clash}")
    vertices = list(g.vertices) + [v for v in h.vertices if v != STAR]
    return MultiGraph.from_edges(vertices, g.edges() + h.edges())


# extensions --------------------------------------------------------------------


def _degree_sequence_multigraphs(degrees: Sequence[int]):
    """Yield (multiplicity dict) for every loopy multigraph with the given degrees."""
    n = len(degrees)
    rem = list(degrees)
    mult: dict[tuple[int, int], int] = {}

    def fill_row(i: int, j: int):
        # distribute rem[i] among vertices j..n-1
        if rem[i] == 0:
            yield from place(i + 1)
            return
        if j >= n:
            return
        if sum(rem[j:]) < rem[i]:
            return
        top = min(rem[i], rem[j])
        for m in range(top, -1, -1):
            if m:
                mult[(i, j)] = m
            rem[i] -= m
            rem[j] -= m
            yield from fill_row(i, j + 1)
            rem[i] += m
            rem[j] += m
            mult.pop((i, j), None)

    def place(i: int):
        if i == n:
            yield dict(mult)
            return
        for loops in range(rem[i] // 2, -1, -1):
            if loops:
                mult[(i, i)] = loops
            rem[i] -= 2 * loops
            yield from fill_row(i, i + 1)
            rem[i] += 2 * loops
            mult.pop((i, i), None)

    yield from place(0)


def decorated_graphs(star_valency: int, valencies: Sequence[int]):
    """Every n-decorated graph with the given valencies, with weight 1/|Aut|."""
    verts = [STAR] + list(range(1, len(valencies) + 1))
    degrees = [star_valency] + list(valencies)
    if sum(degrees) % 2:
        return
    for mult in _degree_sequence_multigraphs(degrees):
        edges = []
        aut = 1
        for (i, j), m in mult.items():
            edges += [(verts[i], verts[j])] * m
            aut *= factorial(m) * (2**m if i == j else 1)
        yield MultiGraph.from_edges(verts, edges), Fraction(1, aut)


def enumerate_extensions(h: MultiGraph, valencies: Sequence[int], p: int = 0) -> Fraction:
    """Weighted count of decorated graphs with the given valencies simplifying to ``h``."""
    n = len(valencies)
    if guard_exceeded(n > MAX_EXTENSION_VERTICES):
        raise GuardError(f"extension enumeration supports n <= {MAX_EXTENSION_VERTICES}, got {n}")
    if any(v < 0 for v in valencies):
        raise ValueError("valencies must be non-negative")
    return _extension_weight(canonical_form(h), h.star_valency(), h.euler_characteristic(),
                             tuple(valencies), p)


def _extension_weight(h_canon, star_valency: int, chi: int, valencies: tuple, p: int) -> Fraction:
    n = len(valencies)
    # (S) and (D) preserve the Euler characteristic
    if (star_valency + sum(valencies)) != 2 * (n + 1 - chi):
        return Fraction(0)
    return _simplification_buckets(star_valency, valencies, p).get(h_canon, Fraction(0))


@lru_cache(maxsize=4096)
def _simplification_buckets(star_valency: int, valencies: tuple, p: int) -> dict:
    """Canonical form of the simplification -> total weight, for one valency vector."""
    buckets: dict = defaultdict(Fraction)
    for g, w in decorated_graphs(star_valency, valencies):
        try:
            s = simplify(g, p)
        except SimplificationError:
            continue
        buckets[canonical_form(s)] += w
    return dict(buckets)


def valency_vectors(n: int, total: int):
    """Ordered vectors of n positive valencies summing to ``total``."""
    if n == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - n + 2):
        for rest in valency_vectors(n - 1, total - first):
            yield (first,) + rest


def extension_series_coefficient(h: MultiGraph, n: int, p: int = 0) -> Fraction:
    """``(1/n!) sum_d <tau_d1 ... tau_dn>_H`` by explicit enumeration."""
    total_half = 2 * (n + 1 - h.euler_characteristic()) - h.star_valency()
    s = sum((enumerate_extensions(h, vec, p) for vec in valency_vectors(n, total_half)), Fraction(0))
    return s / factorial(n)


def f_h_closed_form(h: MultiGraph) -> AElement:
    """``Y^v (1+Z)^e / |Aut(H)|`` with v non-star vertices and e edges."""
    y, xinv = AElement.Y(), AElement.X(-1)
    return (y ** h.non_star_count()) * (xinv ** h.num_edges) * Fraction(1, automorphism_count(h))


# catalog ---------------------------------------------------------------------------

CATALOG_PATH = Path(__file__).with_name("data") / "catalog.json"


def load_catalog(path: str | Path | None = None) -> dict[str, MultiGraph]:
    data = json.loads(Path(path or CATALOG_PATH).read_text())
    return {entry["name"]: MultiGraph.from_dict(entry) for entry in data["graphs"]}


def build_simple_graph(star_valency: int, valencies: Sequence[int]) -> MultiGraph:
    """A connected simple graph with prescribed valencies (greedy construction).

    A path ``* - v1 - ... - vm`` guarantees connectivity; the leftover stubs
    are closed into loops where possible and paired across vertices otherwise.
    """
    if star_valency < 1:
        raise ValueError("star valency must be positive")
    if any(v < 3 for v in valencies):
        raise ValueError("anonymous vertices of a simple graph need valency >= 3")
    if (star_valency + sum(valencies)) % 2:
        raise ValueError("valency sum must be even")
    names = [f"a{i}" for i in range(1, len(valencies) + 1)]
    verts = [STAR] + names
    edges = []
    stubs = {STAR: star_valency}
    stubs.update(dict(zip(names, valencies)))
    prev = STAR
    for v in names:
        edges.append((prev, v))
        stubs[prev] -= 1
        stubs[v] -= 1
        prev = v
    for v in verts:
        while stubs[v] >= 2:
            edges.append((v, v))
            stubs[v] -= 2
    odd = [v for v in verts if stubs[v] == 1]
    for a, b in zip(odd[::2], odd[1::2]):
        edges.append((a, b))
    return MultiGraph.from_edges(verts, edges)


def find_simple_graph(star_valency: int, valencies: Sequence[int],
                      catalog: dict[str, MultiGraph] | None = None) -> MultiGraph:
    """Catalog entry with matching star and vertex valencies, else a greedy build."""
    want = sorted(valencies)
    for g in (catalog if catalog is not None else load_catalog()).values():
        vals = g.valencies()
        anon = sorted(vals[v] for v in g.vertices if _vertex_kind(v) == "anon")
        if vals[STAR] == star_valency and anon == want and len(g.components()) == 1:
            return g
    return build_simple_graph(star_valency, valencies)
