"""Brackets <tau_d1 ... tau_dn>: closed forms, string/dilaton recursion, F-series."""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .algebra import AElement
from .graphs import MultiGraph, automorphism_count, find_simple_graph, load_catalog
from .series import PowerSeries, as_fraction, fraction_str

GENUS2_PATH = Path(__file__).with_name("data") / "genus2.json"
MAX_DEPTH = 1000

Monomial = tuple  # sorted tuple of non-negative ints


def monomial(ds: Iterable[int]) -> Monomial:
    ds = tuple(sorted(int(d) for d in ds))
    if any(d < 0 for d in ds):
        raise ValueError("monomial exponents must be non-negative")
    return ds


def parse_monomial(text: str) -> Monomial:
    text = text.strip()
    if not text:
        return ()
    return monomial(int(x) for x in text.split(","))


def format_monomial(m: Monomial) -> str:
    return ",".join(str(d) for d in m)


def _elementary_symmetric(values: Sequence[int]) -> list[int]:
    e = [1] + [0] * len(values)
    for x in values:
        for j in range(len(values), 0, -1):
            e[j] += e[j - 1] * x
    return e


def closed_bracket(kind: str, m: Sequence[int]) -> Fraction:
    """Closed-form brackets in genus 0, genus 1, and genus 1 with the degree-1 class."""
    m = monomial(m)
    n = len(m)
    denom = prod(factorial(d) for d in m)
    s = sum(m)
    if kind == "g0":
        if n < 3 or s != n - 3:
            return Fraction(0)
        return Fraction(factorial(n - 3), denom)
    if kind == "g1":
        if n < 1 or s != n:
            return Fraction(0)
        sigma = _elementary_symmetric(m)
        top = factorial(n) - sum(factorial(j - 2) * factorial(n - j) * sigma[j] for j in range(2, n + 1))
        return Fraction(top, 24 * denom)
    if kind == "g1beta":
        if n < 1 or s != n - 1:
            return Fraction(0)
        return Fraction(factorial(n - 1), denom)
    raise ValueError(f"unknown closed bracket kind {kind!r}")


CLOSED_GENUS = {"g0": (0, 0), "g1": (1, 0), "g1beta": (1, 1)}


@dataclass
class BracketTable:
    """Initial values of a bracket in genus ``genus``.

    ``degree`` is the degree ``b`` of the class, or ``"mixed"`` when only the
    inequality ``sum d <= 3g-3+n`` is known.  A table built with ``closed``
    evaluates one of the closed forms instead of recursing.
    """

    genus: int
    degree: int | str = 0
    values: dict = field(default_factory=dict)
    closed: str | None = None
    memo: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be non-negative")
        if self.degree != "mixed" and (not isinstance(self.degree, int) or self.degree < 0):
            raise ValueError("degree must be a non-negative integer or 'mixed'")
        self.values = {monomial(k): as_fraction(v) for k, v in self.values.items()}

    @classmethod
    def closed_form(cls, kind: str) -> "BracketTable":
        g, b = CLOSED_GENUS[kind]
        return cls(genus=g, degree=b, closed=kind)

    @classmethod
    def genus0(cls) -> "BracketTable":
        return cls(genus=0, degree=0, values={(0, 0, 0): 1})

    @classmethod
    def genus1(cls) -> "BracketTable":
        return cls(genus=1, degree=0, values={(1,): Fraction(1, 24)})

    @classmethod
    def genus1_beta(cls) -> "BracketTable":
        return cls(genus=1, degree=1, values={(0,): 1})

    @classmethod
    def from_dict(cls, data: dict) -> "BracketTable":
        values = {parse_monomial(k): Fraction(v) for k, v in data.get("values", {}).items()}
        return cls(genus=int(data["genus"]), degree=data.get("degree", 0), values=values)

    @classmethod
    def load(cls, path: str | Path) -> "BracketTable":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {
            "genus": self.genus,
            "degree": self.degree,
            "values": {format_monomial(k): fraction_str(v) for k, v in sorted(self.values.items())},
        }

    def vanishes(self, m: Monomial) -> bool:
        dim = 3 * self.genus - 3 + len(m)
        if self.degree == "mixed":
            return sum(m) > dim
        return self.degree + sum(m) != dim

    def max_degree_sum(self, n: int) -> int:
        return 3 * self.genus - 3 + n - (0 if self.degree == "mixed" else self.degree)


def load_genus2() -> BracketTable:
    return BracketTable.load(GENUS2_PATH)


class RecursionDepthError(RuntimeError):
    pass


def eval_bracket(t: BracketTable, m: Iterable[int], _depth: int = 0) -> Fraction:
    """Evaluate a bracket from its table by the string and dilaton relations."""
    m = monomial(m)
    if t.closed is not None:
        return closed_bracket(t.closed, m)
    if m in t.memo:
        return t.memo[m]
    if _depth > MAX_DEPTH:
        raise RecursionDepthError("bracket recursion depth exceeded")
    if m in t.values:
        value = t.values[m]
    elif t.vanishes(m):
        value = Fraction(0)
    elif m and m[0] == 0:
        rest = list(m[1:])
        value = Fraction(0)
        for i, d in enumerate(rest):
            if d == 0 or (i and rest[i - 1] == d):
                continue
            mult = rest.count(d)
            lowered = rest[:i] + [d - 1] + rest[i + 1:]
            value += mult * eval_bracket(t, lowered, _depth + 1)
    elif 1 in m:
        rest = list(m)
        rest.remove(1)
        value = (2 * t.genus - 2 + len(rest)) * eval_bracket(t, rest, _depth + 1)
    else:
        value = Fraction(0)
    t.memo[m] = value
    return value


def monomials(n: int, max_sum: int, exact: bool = False) -> Iterator[Monomial]:
    """Sorted monomials of length n with degree sum <= max_sum (or == when exact)."""
    if max_sum < 0:
        return

    def rec(k: int, lo: int, budget: int):
        if k == 0:
            if not exact or budget == 0:
                yield ()
            return
        for d in range(lo, budget // k + 1):
            for tail in rec(k - 1, d, budget - d):
                yield (d,) + tail

    yield from rec(n, 0, max_sum)


def multiset_weight(m: Monomial) -> Fraction:
    """``1/prod(mult!)``: ordered tuples of a multiset divided by n!."""
    return Fraction(1, prod(factorial(c) for c in Counter(m).values()))


def f_series(t: BracketTable, order: int, g0_convention: bool = False) -> PowerSeries:
    """``sum_n q^n/n! sum_d <tau_d1 ... tau_dn>`` truncated at ``order``."""
    exact = t.degree != "mixed"
    coeffs = []
    for n in range(order + 1):
        total = Fraction(0)
        for m in monomials(n, t.max_degree_sum(n), exact):
            v = eval_bracket(t, m)
            if v:
                total += v * multiset_weight(m)
        coeffs.append(total)
    if g0_convention:
        if t.genus != 0:
            raise ValueError("the q + q^2/4 convention terms apply to genus 0 only")
        if order >= 1:
            coeffs[1] += 1
        if order >= 2:
            coeffs[2] += Fraction(1, 4)
    return PowerSeries(coeffs)


def weighted_f_series(t: BracketTable, weights: Sequence[int], order: int) -> PowerSeries:
    """F-series with p distinguished points weighted by ``b_i^{d_i}``.

    The coefficient of q^n sums over ordered exponents on the p distinguished
    points and unordered exponents on the remaining n-p-r points, divided by
    (n-p-r)!.
    """
    weights = [int(b) for b in weights]
    if any(b < 1 for b in weights):
        raise ValueError("weights must be positive integers")
    p = len(weights)
    r = sum(b - 1 for b in weights)
    exact = t.degree != "mixed"
    coeffs = []
    for n in range(order + 1):
        k = n - r
        if k < p:
            coeffs.append(Fraction(0))
            continue
        budget = t.max_degree_sum(k)
        total = Fraction(0)
        if budget >= 0:
            for head in itertools.product(range(budget + 1), repeat=p):
                hs = sum(head)
                if hs > budget:
                    continue
                w = prod(b**d for b, d in zip(weights, head))
                for tail in monomials(k - p, budget - hs, exact):
                    v = eval_bracket(t, head + tail)
                    if v:
                        total += w * v * multiset_weight(tail)
        coeffs.append(total)
    return PowerSeries(coeffs)


def decompose_to_graphs(t: BracketTable, catalog: dict[str, MultiGraph] | None = None
                        ) -> list[tuple[MultiGraph, Fraction]]:
    """Express the bracket as a combination of H-brackets of simple graphs.

    Each initial value ``q_m`` yields a simple graph with numbered valencies
    ``d_i+1`` and star valency ``b+g-1``.  Its coefficient is
    ``q_m |Aut(H)| / prod(mult!)``: an H-bracket counts every labelling of the
    anonymous vertices, so repeated exponents overcount by the multiplicities.
    """
    if catalog is None:
        catalog = load_catalog()
    out = []
    for m, q in sorted(t.values.items()):
        if not q:
            continue
        if any(d < 2 for d in m):
            raise ValueError(f"initial value {m} must have every exponent >= 2")
        b = 3 * t.genus - 3 + len(m) - sum(m)
        if t.degree != "mixed" and b != t.degree:
            raise ValueError(f"initial value {m} has the wrong degree")
        star = b + t.genus - 1
        if star <= 0 or b < 0:
            raise ValueError("degree/genus out of range")
        h = find_simple_graph(star, [d + 1 for d in m], catalog)
        out.append((h, q * automorphism_count(h) * multiset_weight(m)))
    return out


def decomposition_element(decomposition: Sequence[tuple[MultiGraph, Fraction]]) -> AElement:
    """``sum c_H F_H`` with ``F_H = Y^v (1+Z)^e / |Aut(H)|``."""
    from .graphs import f_h_closed_form

    total = AElement.const(0)
    for h, c in decomposition:
        total = total + f_h_closed_form(h) * c
    return total
