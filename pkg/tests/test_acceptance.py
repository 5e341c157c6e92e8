"""Acceptance criteria, one check per criterion (or clause), each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import sys
import time
from fractions import Fraction as F
from math import factorial, prod
from pathlib import Path

import pytest

from hurwitz_atlas.algebra import AElement, fit_escalating, leading_asymptotic, to_series
from hurwitz_atlas.brackets import BracketTable, closed_bracket, eval_bracket, f_series, load_genus2, monomials
from hurwitz_atlas.dendrology import path_moments
from hurwitz_atlas.graphs import automorphism_count, extension_series_coefficient, f_h_closed_form, load_catalog
from hurwitz_atlas.hurwitz import (
    HurwitzQuery,
    Partition,
    brute_force_oracle,
    connected_counts,
    genus0_closed,
    h_series,
    partitions,
)
from hurwitz_atlas.series import PowerSeries, a_sequence, d_operator, exp, generators

README = Path(__file__).resolve().parents[1] / "README.md"


def _fmt(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _report(label: str, ok: bool, detail: str) -> None:
    line = f"[acceptance] criterion {label}: {_fmt(ok)} ({detail})"
    sys.__stdout__.write(line + "\n")
    sys.__stdout__.flush()


# criteria ------------------------------------------------------------------------------


def criterion_1():
    t0 = time.perf_counter()
    N = 32
    y, z = generators("Y", N), generators("Z", N)
    q = PowerSeries.monomial(1, N)
    one = PowerSeries.constant(1, N)
    checks = [
        q * exp(y) == y,
        (one - y) * (one + z) == one,
        z == d_operator(y),
        d_operator(z) == z * (one + z) ** 2,
        d_operator(z * z) == (z * z).scale(2) * (one + z) ** 2,
    ]
    elapsed = time.perf_counter() - t0
    return all(checks) and elapsed < 1.0, f"{sum(checks)}/5 identities to order 32 in {elapsed:.2f}s"


def criterion_2():
    bad = 0
    for k in range(1, 9):
        yk = generators("Y", 24) ** k
        for n in range(1, 25):
            expected = k * prod(range(n - k + 1, n)) * F(n) ** (n - k) if n >= k else 0
            if yk[n] * factorial(n) != expected:
                bad += 1
    return bad == 0, f"{bad} mismatches for k <= 8, n <= 24"


def criterion_3():
    first = [a_sequence(n) for n in range(1, 6)]
    ok = first == [0, 2, 24, 312, 4720]
    ok &= all(a_sequence(n) == factorial(n) * sum(F(n**k, factorial(k)) for k in range(n - 1))
              for n in range(1, 21))
    return ok, f"A_1..A_5 = {first}; sum identity for n <= 20"


def criterion_4():
    t0 = time.perf_counter()
    bad = 0
    for n in range(2, 9):
        z = generators("Z", n)
        for k in range(1, 4):
            bad += path_moments(n, k, "p") != (z ** (k + 1))[n] * factorial(n)
    ok = bad == 0 and path_moments(2, 1, "m") == 2
    ok &= all(path_moments(n, 1, "m") == a_sequence(n) for n in range(1, 9))
    elapsed = time.perf_counter() - t0
    return ok and elapsed < 120, f"{bad} p-moment mismatches, {elapsed:.1f}s"


def criterion_5():
    t0 = time.perf_counter()
    catalog = load_catalog()
    names = ("H4", "H23", "H222")
    auts = [automorphism_count(catalog[k]) for k in names]
    ok = auts == [8, 4, 4]
    for k in names:
        h = catalog[k]
        closed = to_series(f_h_closed_form(h), 5)
        ok &= [extension_series_coefficient(h, n) for n in range(6)] == list(closed)
    elapsed = time.perf_counter() - t0
    return ok and elapsed < 300, f"automorphisms {auts}; extensions n <= 5 in {elapsed:.1f}s"


def criterion_6_genus0():
    t = BracketTable.genus0()
    bad = sum(eval_bracket(t, m) != closed_bracket("g0", m) for n in range(9) for m in monomials(n, 12))
    return bad == 0, f"{bad} mismatches between recursion and closed form, n <= 8"


def _genus2_literal():
    Y, Xi = AElement.Y(), AElement.X(-1)
    return Y * Xi**3 * F(1, 1152) + Y**2 * Xi**4 * F(29, 5760) + Y**3 * Xi**5 * F(7, 240)


def criterion_6_genus2():
    series = f_series(load_genus2(), 10)
    target = to_series(_genus2_literal(), 10)
    diff = [n for n in range(11) if series[n] != target[n]]
    detail = "series equals the stated formula" if not diff else (
        f"first difference at q^{diff[0]}: {series[diff[0]]} vs {target[diff[0]]}")
    return not diff, detail


def criterion_6_genus1():
    g1 = f_series(BracketTable.genus1(), 28)
    _, w_plain = fit_escalating(g1, 10, 8)
    _, w_d = fit_escalating(d_operator(g1), 10, 8)
    return w_plain is None and w_d is not None, f"F fit window {w_plain}, DF fit window {w_d}"


def criterion_7():
    t0 = time.perf_counter()
    pool = [Partition(p) for m in range(6) for p in partitions(m, 3)]
    checked = bad = 0
    for k in range(3):
        for combo in itertools.combinations_with_replacement(pool, k):
            for g in range(3):
                counts = None
                for n in range(1, 6):
                    q = HurwitzQuery(g, combo, n)
                    if any(mu.m > n for mu in combo) or not 0 <= q.c <= 10:
                        continue
                    counts = counts or connected_counts(g, combo, 5)
                    checked += 1
                    bad += counts[n] != brute_force_oracle(q)
    g0_bad = 0
    for m in range(5):
        for parts in partitions(m):
            mu = Partition(parts)
            counts = connected_counts(0, [mu], 10)
            g0_bad += sum(counts[n] != genus0_closed(n, mu) for n in range(1, 11))
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and g0_bad == 0 and checked > 0 and elapsed < 300
    return ok, f"{checked} oracle queries, {bad} + {g0_bad} mismatches, {elapsed:.1f}s"


MEMBERS = [(0, ""), (0, "2"), (0, "3"), (0, "2;2"), (1, "1"), (1, "2"), (2, "")]


def _mus(text):
    return [Partition.parse(x) for x in text.split(";") if x]


def criterion_8():
    windows = {}
    for g, text in MEMBERS:
        _, windows[(g, text)] = fit_escalating(h_series(g, _mus(text), 28), 10, 8)
    _, w_exc = fit_escalating(h_series(1, [], 28), 10, 8)
    ok = all(w is not None for w in windows.values()) and w_exc is None
    shown = ", ".join(f"({g},{t or '-'})->{w}" for (g, t), w in windows.items())
    return ok, f"windows {shown}; (1,-) fit window {w_exc}"


def _b(g, mus, N=28, M=10):
    elem, window = fit_escalating(h_series(g, mus, N), M, 8)
    if window is None:
        return None
    return leading_asymptotic(elem)


def criterion_9():
    t0 = time.perf_counter()
    b0 = _b(0, [])
    b1 = _b(1, [Partition((1,))])
    b2 = _b(2, [])
    ok = b0 is not None and (b0.alpha, b0.c_gauss, b0.c_plain) == (F(-7, 2), 1, 0)
    ok &= b1 is not None and (b1.alpha, b1.c_gauss, b1.c_plain) == (0, 0, F(1, 48))
    ok &= b2 is not None and (b2.alpha, b2.c_gauss, b2.c_plain) == (F(3, 2), F(7, 4320), 0)
    elapsed = time.perf_counter() - t0
    return ok and elapsed < 600, (f"b0 {b0 and b0.to_dict()}, b1 {b1 and b1.to_dict()}, "
                                  f"b2 {b2 and b2.to_dict()}, {elapsed:.1f}s")


def criterion_9_stretch():
    b3 = _b(3, [])
    ok = b3 is not None and (b3.alpha, b3.c_gauss, b3.c_plain) == (4, 0, F(5 * 7**2, 2**16 * 3**5))
    return ok, f"b3 {b3 and b3.to_dict()}"


def criterion_10():
    text = README.read_text() if README.exists() else ""
    ok = "out of scope" in text.lower() and "Painlev" in text
    return ok, "large-scale claims declared out of scope in README; b_g inputs covered by criterion 9"


CRITERIA = [
    ("1", criterion_1),
    ("2", criterion_2),
    ("3", criterion_3),
    ("4", criterion_4),
    ("5", criterion_5),
    ("6 (genus-0 recursion)", criterion_6_genus0),
    ("6 (genus-2 F-series formula)", criterion_6_genus2),
    ("6 (genus-1 fit and D-fit)", criterion_6_genus1),
    ("7", criterion_7),
    ("8", criterion_8),
    ("9", criterion_9),
    ("9 (stretch b3)", criterion_9_stretch),
    ("10", criterion_10),
]


@pytest.mark.parametrize("label, check", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(label, check):
    ok, detail = check()
    _report(label, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for label, check in CRITERIA:
        ok, detail = check()
        _report(label, ok, detail)
        failures += not ok
    sys.exit(1 if failures else 0)
