import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from hurwitz_atlas.algebra import to_series
from hurwitz_atlas.graphs import (
    STAR,
    MultiGraph,
    SimplificationError,
    automorphism_count,
    automorphism_count_bruteforce,
    build_simple_graph,
    canonical_form,
    decorated_graphs,
    disjoint_union,
    enumerate_extensions,
    extension_series_coefficient,
    f_h_closed_form,
    is_isomorphic,
    load_catalog,
    simplify,
    valency_vectors,
)
from hurwitz_atlas.guards import GuardError
from hurwitz_atlas.algebra import AElement

CATALOG = load_catalog()
H4 = CATALOG["H4"]


def test_catalog_automorphisms():
    assert [automorphism_count(CATALOG[k]) for k in ("H4", "H23", "H222")] == [8, 4, 4]
    for h in CATALOG.values():
        assert automorphism_count(h) == automorphism_count_bruteforce(h)


def test_catalog_shapes():
    for name, vals in (("H4", [5]), ("H23", [3, 4]), ("H222", [3, 3, 3])):
        h = CATALOG[name]
        v = h.valencies()
        assert v[STAR] == 1
        assert sorted(x for k, x in v.items() if k != STAR) == vals
        assert h.euler_characteristic() == -1


def test_small_automorphisms():
    assert automorphism_count(MultiGraph.from_edges([STAR, "v"], [(STAR, "v")])) == 1
    assert automorphism_count(MultiGraph.from_edges([STAR, "v"], [(STAR, "v")] * 2)) == 2


def test_pairing_must_be_involution():
    with pytest.raises(ValueError):
        MultiGraph([STAR, 1], [STAR, 1], [1, 1])
    with pytest.raises(ValueError):
        MultiGraph([1], [1, 1], [1, 0])


def test_simplify_rejects_path():
    g = MultiGraph.from_edges([STAR, 1, 2], [(STAR, 1), (1, 2)])
    with pytest.raises(SimplificationError, match="unsimplifiable component"):
        simplify(g, 0)


def test_simplify_rejects_unprotected_cycle():
    g = MultiGraph.from_edges([STAR, 1, 2, 3], [(STAR, 3), (3, 3), (1, 2), (1, 2)])
    with pytest.raises(SimplificationError, match="unsimplifiable component"):
        simplify(g, 0)


def test_simplify_h4_is_fixed():
    g = MultiGraph.from_edges([STAR, 1], [(STAR, 1), (1, 1), (1, 1)])
    assert is_isomorphic(simplify(g, 0), H4)


def test_simplify_removes_subdivisions():
    g = MultiGraph.from_edges([STAR, 1, 2, 3, 4], [(STAR, 1), (1, 1), (1, 2), (2, 3), (3, 4), (4, 1)])
    assert is_isomorphic(simplify(g, 0), H4)


def test_simplify_keeps_protected_vertices():
    g = MultiGraph.from_edges([STAR, 1, 2], [(STAR, 2), (2, 2), (2, 2), (2, 1)])
    s = simplify(g, 1)
    assert 1 in s.vertices and s.valency(1) == 1
    with pytest.raises(SimplificationError):
        # vertex 2 alone would be erased down to a leaf on the star
        simplify(MultiGraph.from_edges([STAR, 1, 2], [(STAR, 2), (2, 1)]), 0)


def test_extension_examples():
    assert enumerate_extensions(H4, [5]) == F(1, 8)
    assert enumerate_extensions(H4, [1]) == 0
    with pytest.raises(GuardError):
        enumerate_extensions(H4, [3] * 7)


def test_extension_n2_matches_closed_form():
    closed = to_series(f_h_closed_form(H4), 2)
    total = sum((enumerate_extensions(H4, v) for v in valency_vectors(2, 7)), F(0))
    assert total / 2 == closed[2]


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(CATALOG))
def test_extensions_match_closed_form(name):
    h = CATALOG[name]
    closed = to_series(f_h_closed_form(h), 5)
    assert [extension_series_coefficient(h, n) for n in range(6)] == list(closed)


def test_extension_edge_count():
    # every extension of a chi = 3 - 2g graph with n numbered vertices has 2g - 2 + n edges
    g = 2
    h_canon = canonical_form(H4)
    for n in range(1, 4):
        for vec in valency_vectors(n, 2 * (n + 1 - H4.euler_characteristic()) - 1):
            for G, _ in decorated_graphs(1, vec):
                try:
                    s = simplify(G, 0)
                except SimplificationError:
                    continue
                if canonical_form(s) == h_canon:
                    assert G.num_edges == 2 * g - 2 + n


def test_f_h_examples():
    theta = MultiGraph.from_edges([STAR, "v"], [(STAR, "v")] * 3)
    assert automorphism_count(theta) == 6
    Y, Xi = AElement.Y(), AElement.X(-1)
    assert f_h_closed_form(H4) == Y * Xi**3 * F(1, 8)
    assert f_h_closed_form(theta) == Y * Xi**3 * F(1, 6)
    loops = MultiGraph.from_edges([STAR], [(STAR, STAR)] * 2)
    assert f_h_closed_form(loops) == Xi**2 * F(1, 8)
    assert to_series(f_h_closed_form(H4), 1)[1] == enumerate_extensions(H4, [5])


def test_catalog_json_roundtrip():
    for h in CATALOG.values():
        again = MultiGraph.from_dict(h.to_dict())
        assert canonical_form(again) == canonical_form(h)


def test_build_simple_graph():
    g = build_simple_graph(1, [3, 3, 3])
    assert g.euler_characteristic() == -1 and len(g.components()) == 1
    assert sorted(g.valencies().values()) == [1, 3, 3, 3]


def _random_graph(rng, max_n=6, max_edges=8):
    n = rng.randint(1, max_n)
    verts = [STAR] + list(range(1, n + 1))
    edges = [(rng.choice(verts), rng.choice(verts)) for _ in range(rng.randint(1, max_edges))]
    return MultiGraph.from_edges(verts, edges)


def test_confluence():
    rng = random.Random(7)
    tested = 0
    while tested < 50:
        g = _random_graph(rng)
        try:
            ref = canonical_form(simplify(g, 0))
        except SimplificationError:
            continue
        tested += 1
        for seed in range(10):
            assert canonical_form(simplify(g, 0, random.Random(seed))) == ref


small_graphs = st.builds(
    lambda n, pairs: MultiGraph.from_edges(
        [STAR] + [f"a{i}" for i in range(n)],
        [tuple(([STAR] + [f"a{i}" for i in range(n)])[k % (n + 1)] for k in p) for p in pairs],
    ),
    st.integers(0, 3),
    st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=4),
)


@settings(max_examples=40, deadline=None)
@given(small_graphs)
def test_automorphisms_match_bruteforce(g):
    assert automorphism_count(g) == automorphism_count_bruteforce(g)


numbered_parts = st.lists(st.tuples(st.integers(10, 12), st.integers(10, 12)), min_size=1, max_size=3)


@settings(max_examples=20, deadline=None)
@given(small_graphs, numbered_parts)
def test_automorphisms_multiply_on_disjoint_union(g, pairs):
    h = MultiGraph.from_edges([STAR, 10, 11, 12], pairs)
    if len(g.half) + len(h.half) > 8:
        return
    u = disjoint_union(g, h)
    assert automorphism_count(u) == automorphism_count(g) * automorphism_count(h)
    assert automorphism_count(u) == automorphism_count_bruteforce(u)
