import random
from fractions import Fraction as F
from math import factorial

import pytest

from hurwitz_atlas.algebra import AElement, FitFailure, fit, fit_escalating, to_series
from hurwitz_atlas.brackets import (
    BracketTable,
    closed_bracket,
    decompose_to_graphs,
    decomposition_element,
    eval_bracket,
    f_series,
    load_genus2,
    monomials,
    parse_monomial,
    weighted_f_series,
)
from hurwitz_atlas.graphs import automorphism_count, f_h_closed_form, load_catalog
from hurwitz_atlas.hurwitz import Partition, genus0_closed
from hurwitz_atlas.series import a_sequence, d_operator, generators


def all_monomials(max_n, max_sum):
    for n in range(max_n + 1):
        yield from monomials(n, max_sum)


def test_closed_bracket_examples():
    assert closed_bracket("g0", (0, 0, 0)) == 1
    assert closed_bracket("g1", (1,)) == F(1, 24)
    assert closed_bracket("g1beta", (0,)) == 1
    assert closed_bracket("g0", (0, 0)) == 0
    with pytest.raises(ValueError):
        closed_bracket("g7", (1,))


def _string(kind, m):
    rest = list(m)
    out = F(0)
    for i, d in enumerate(rest):
        if d:
            out += closed_bracket(kind, rest[:i] + [d - 1] + rest[i + 1:])
    return out


@pytest.mark.parametrize("kind, genus", [("g0", 0), ("g1", 1)])
def test_closed_forms_satisfy_string_and_dilaton(kind, genus):
    for m in all_monomials(7, 10):
        n = len(m) + 1
        if 2 * genus - 2 + n <= 0:
            continue
        # the unstable base brackets are not covered by the relations
        if (kind, m) in (("g0", (0, 0)), ("g1", ())):
            continue
        assert closed_bracket(kind, (0,) + m) == _string(kind, m)
        assert closed_bracket(kind, (1,) + m) == (2 * genus - 2 + len(m)) * closed_bracket(kind, m)


def test_genus2_eval_examples():
    t = load_genus2()
    assert eval_bracket(t, (0, 5)) == F(1, 1152)
    assert eval_bracket(t, (1, 4)) == F(1, 384)


def test_genus0_recursion_matches_closed_form():
    t = BracketTable.genus0()
    for m in all_monomials(8, 12):
        assert eval_bracket(t, m) == closed_bracket("g0", m)


def test_genus1_recursion_matches_closed_form():
    t = BracketTable.genus1()
    for m in all_monomials(8, 10):
        assert eval_bracket(t, m) == closed_bracket("g1", m)


def test_pure_degree_vanishing_on_random_monomials():
    rng = random.Random(3)
    for t in (load_genus2(), BracketTable.genus0(), BracketTable.genus1_beta()):
        for _ in range(200):
            m = tuple(sorted(rng.randint(0, 6) for _ in range(rng.randint(0, 7))))
            if t.degree + sum(m) != 3 * t.genus - 3 + len(m):
                assert eval_bracket(t, m) == 0


def test_table_json_roundtrip():
    t = load_genus2()
    assert BracketTable.from_dict(t.to_dict()).values == t.values
    assert t.to_dict() == {"genus": 2, "degree": 0,
                           "values": {"2,2,2": "7/240", "2,3": "29/5760", "4": "1/1152"}}
    assert parse_monomial("3, 2") == (2, 3)


def test_decompose_examples():
    dec = decompose_to_graphs(load_genus2())
    coeffs = {tuple(sorted(v for k, v in h.valencies().items() if k != "*")): c for h, c in dec}
    assert coeffs[(5,)] == F(1, 1152) * 8
    assert coeffs[(3, 4)] == F(29, 5760) * 4
    # three equal exponents: the H-bracket counts all 3! labellings
    assert coeffs[(3, 3, 3)] == F(7, 240) * 4 / 6
    single = BracketTable(genus=2, degree=0, values={(4,): 1})
    [(h, c)] = decompose_to_graphs(single)
    assert c == 8 and automorphism_count(h) == 8
    assert decompose_to_graphs(BracketTable(genus=2, degree=0, values={})) == []


def test_decompose_star_valency_error():
    bad = BracketTable(genus=1, degree="mixed", values={(2, 2): 1})
    with pytest.raises(ValueError, match="degree/genus out of range"):
        decompose_to_graphs(bad)


def test_f_series_genus0():
    s = f_series(BracketTable.genus0(), 12, g0_convention=True)
    assert all(s[n] == F(n) ** (n - 3) / factorial(n) for n in range(1, 13))
    assert f_series(BracketTable.closed_form("g0"), 12, g0_convention=True) == s


def test_f_series_genus1_beta():
    assert f_series(BracketTable.genus1_beta(), 12) == generators("Y", 12)


def test_f_series_genus1():
    s = f_series(BracketTable.genus1(), 10)
    for n in range(1, 11):
        assert s[n] == F(1, 24) * (F(a_sequence(n), n) + n ** (n - 1)) / factorial(n)


def test_genus2_series_equals_decomposition():
    t = load_genus2()
    s = f_series(t, 10)
    assert s == to_series(decomposition_element(decompose_to_graphs(t)), 10)
    Y, Xi = AElement.Y(), AElement.X(-1)
    corrected = Y * Xi**3 * F(1, 1152) + Y**2 * Xi**4 * F(29, 5760) + Y**3 * Xi**5 * F(7, 1440)
    assert s == to_series(corrected, 10)


def test_genus2_series_from_brackets_directly():
    # ordered sum over exponent tuples, independent of the multiset bookkeeping
    import itertools

    t = load_genus2()
    s = f_series(t, 5)
    for n in range(6):
        total = sum((eval_bracket(t, d) for d in itertools.product(range(n + 4), repeat=n)), F(0))
        assert s[n] == total / factorial(n)


def test_f_series_fit_membership():
    assert isinstance(fit(f_series(BracketTable.genus0(), 24, True), 4, 8), AElement)
    assert isinstance(fit(f_series(BracketTable.genus1_beta(), 20), 2, 8), AElement)
    assert isinstance(fit_escalating(f_series(load_genus2(), 28), 10, 8)[0], AElement)
    g1 = f_series(BracketTable.genus1(), 28)
    assert fit_escalating(g1, 10, 8)[1] is None
    assert isinstance(fit_escalating(d_operator(g1), 10, 8)[0], AElement)


def test_weighted_single_point_is_d_of_f():
    for t in (load_genus2(), BracketTable.genus1_beta(), BracketTable.genus0()):
        assert weighted_f_series(t, [1], 9) == d_operator(f_series(t, 9))


def test_weighted_genus1_beta_fits():
    s = weighted_f_series(BracketTable.genus1_beta(), [1], 20)
    elem, window = fit_escalating(s, 4, 8)
    assert window is not None and window <= 4


@pytest.mark.parametrize("parts", [(2,), (3,), (2, 2), (3, 2), (2, 1), (4,)])
def test_weighted_genus0_matches_hurwitz_formula(parts):
    mu = Partition(parts)
    r = mu.r
    s = weighted_f_series(BracketTable.closed_form("g0"), list(parts), 12)
    for n in range(12 + 1):
        if n - r < 3 or n < mu.p + r:
            continue
        prefactor = F(factorial(2 * n - 2 - r), mu.aut)
        for b in parts:
            prefactor *= F(b**b, factorial(b))
        assert s[n] == genus0_closed(n, mu) / prefactor
