"""Elements of the tree-series algebra as Laurent polynomials in X = 1 - Y.

Since ``(1 - Y)(1 + Z) = 1``, every polynomial in Y and Z is a Laurent
polynomial in ``X = 1 - Y`` with ``X^-1 = 1 + Z``.  This module keeps that
canonical form, converts it to series, fits coefficient sequences back into
it, and reads off exact per-coefficient closed forms and leading asymptotics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Mapping

from . import linalg
from .series import PowerSeries, a_sequence, as_fraction, fraction_str, generators


class AElement:
    """Finite Laurent polynomial ``sum_k c_k X^k`` with no stored zeros."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, object] | None = None):
        clean = {}
        for k, c in (terms or {}).items():
            c = as_fraction(c)
            if c:
                clean[int(k)] = c
        self._terms = dict(sorted(clean.items()))

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    @classmethod
    def const(cls, c) -> "AElement":
        return cls({0: c})

    @classmethod
    def X(cls, k: int = 1) -> "AElement":
        return cls({k: 1})

    @classmethod
    def Y(cls) -> "AElement":
        return cls({0: 1, 1: -1})

    @classmethod
    def Z(cls) -> "AElement":
        return cls({-1: 1, 0: -1})

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if not isinstance(other, AElement):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __repr__(self):
        if not self._terms:
            return "AElement(0)"
        parts = [f"{c}*X^{k}" for k, c in self._terms.items()]
        return "AElement(" + " + ".join(parts) + ")"

    def __add__(self, other):
        if not isinstance(other, AElement):
            other = AElement.const(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return AElement(out)

    __radd__ = __add__

    def __neg__(self):
        return AElement({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, AElement):
            other = AElement.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, AElement):
            c = as_fraction(other)
            return AElement({k: c * v for k, v in self._terms.items()})
        out: dict[int, Fraction] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + c1 * c2
        return AElement(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials in X can be inverted in the algebra")
            (e, c), = self._terms.items()
            return AElement({e * k: c**k})
        out = AElement.const(1)
        for _ in range(k):
            out = out * self
        return out

    def d(self) -> "AElement":
        """``D = q d/dq``; uses ``DX = -Z = 1 - X^-1``."""
        out: dict[int, Fraction] = {}
        for k, c in self._terms.items():
            if k:
                out[k - 1] = out.get(k - 1, 0) + k * c
                out[k - 2] = out.get(k - 2, 0) - k * c
        return AElement(out)

    def constant_term(self) -> Fraction:
        """Value of the series at q = 0 (where X = 1)."""
        return sum(self._terms.values(), Fraction(0))

    def to_dict(self) -> dict:
        return {"X": {str(k): fraction_str(c) for k, c in self._terms.items()}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping) -> "AElement":
        return cls({int(k): Fraction(v) for k, v in data["X"].items()})


def from_yz_poly(poly: Mapping[tuple[int, int], object]) -> AElement:
    """Reduce ``sum c_ij Y^i Z^j`` to canonical form."""
    y, z = AElement.Y(), AElement.Z()
    out = AElement()
    for (i, j), c in poly.items():
        out = out + (y**i) * (z**j) * as_fraction(c)
    return out


@lru_cache(maxsize=None)
def _x_power_series(k: int, order: int) -> PowerSeries:
    if k >= 0:
        x = PowerSeries.constant(1, order) - generators("Y", order)
        return x**k
    xinv = PowerSeries.constant(1, order) + generators("Z", order)
    return xinv ** (-k)


def to_series(a: AElement, order: int) -> PowerSeries:
    out = PowerSeries.zero(order)
    for k, c in a.terms.items():
        out = out + _x_power_series(k, order).scale(c)
    return out


@dataclass(frozen=True)
class FitFailure:
    """Returned (never raised) when a sequence does not fit the window."""

    reason: str
    index: int | None = None
    window: int | None = None

    def to_dict(self) -> dict:
        return {"reason": self.reason, "index": self.index, "window": self.window}


def fit(coeffs: PowerSeries, window: int, holdout: int) -> AElement | FitFailure:
    """Express ``coeffs`` in the basis ``X^k, -window <= k <= window``.

    The first ``2*window + 1`` coefficients determine the candidate; every
    remaining coefficient (at least ``holdout`` of them) must then agree.
    """
    M = window
    size = 2 * M + 1
    if M < 0 or holdout < 0:
        raise ValueError("window and holdout must be non-negative")
    if len(coeffs) < size + holdout:
        raise ValueError(
            f"need {size + holdout} coefficients for window {M} and holdout {holdout}, got {len(coeffs)}"
        )
    order = coeffs.order
    basis = [_x_power_series(k, order) for k in range(-M, M + 1)]
    matrix = [[basis[j][n] for j in range(size)] for n in range(size)]
    try:
        sol = linalg.solve(matrix, [coeffs[n] for n in range(size)])
    except linalg.SingularSystem:
        return FitFailure("rank deficient", None, M)
    candidate = AElement({k: c for k, c in zip(range(-M, M + 1), sol)})
    check = to_series(candidate, order)
    for n in range(size, order + 1):
        if check[n] != coeffs[n]:
            return FitFailure("holdout mismatch", n, M)
    return candidate


def fit_escalating(coeffs: PowerSeries, max_window: int, holdout: int, min_window: int = 0):
    """Try windows ``min_window..max_window``; returns (element, window) or the last failure."""
    last = FitFailure("no admissible window", None, None)
    for M in range(min_window, max_window + 1):
        if len(coeffs) < 2 * M + 1 + holdout:
            break
        res = fit(coeffs, M, holdout)
        if isinstance(res, AElement):
            return res, M
        last = res
    return last, None


# Z-powers in the D-basis ---------------------------------------------------


def _zpoly_d(poly: dict[int, int]) -> dict[int, int]:
    # D(Z^j) = j Z^j (1 + Z)^2
    out: dict[int, int] = {}
    for j, c in poly.items():
        for shift, w in ((0, 1), (1, 2), (2, 1)):
            out[j + shift] = out.get(j + shift, 0) + j * c * w
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def d_basis_as_z_poly(kind: str, m: int) -> dict[int, int]:
    """``D^m Z`` (kind "Z") or ``D^m(Z^2)`` (kind "Z2") as a polynomial in Z."""
    poly = {1: 1} if kind == "Z" else {2: 1}
    for _ in range(m):
        poly = _zpoly_d(poly)
    return poly


def _d_basis_list(k: int) -> list[tuple[str, int]]:
    return [("Z" if i % 2 == 0 else "Z2", i // 2) for i in range(k)]


@lru_cache(maxsize=None)
def z_power_decompose(k: int) -> dict[tuple[str, int], Fraction]:
    """Coefficients of ``Z^k`` over ``Z, Z^2, DZ, D(Z^2), D^2 Z, ...``.

    Keys are ("Z", m) for ``D^m Z`` and ("Z2", m) for ``D^m(Z^2)``.  The
    i-th basis element has Z-degree i + 1, so back substitution from the top
    degree solves the triangular system.
    """
    if k < 1:
        raise ValueError("k must be positive")
    basis = _d_basis_list(k)
    residual: dict[int, Fraction] = {k: Fraction(1)}
    out: dict[tuple[str, int], Fraction] = {}
    for i in range(k - 1, -1, -1):
        deg = i + 1
        c = residual.get(deg, Fraction(0))
        if not c:
            continue
        poly = d_basis_as_z_poly(*basis[i])
        c = c / poly[deg]
        out[basis[i]] = c
        for j, v in poly.items():
            residual[j] = residual.get(j, Fraction(0)) - c * v
    if any(residual.values()):
        raise AssertionError("triangular back substitution left a residual")
    return dict(sorted(out.items(), key=lambda kv: (kv[0][1], kv[0][0])))


# closed forms and asymptotics ---------------------------------------------


def _laurent_add(target: dict[int, Fraction], poly: Mapping[int, object], scale) -> None:
    for e, c in poly.items():
        target[e] = target.get(e, Fraction(0)) + scale * c


def _clean(poly: Mapping[int, Fraction]) -> dict[int, Fraction]:
    return {e: c for e, c in sorted(poly.items()) if c}


@lru_cache(maxsize=None)
def y_power_laurent(j: int) -> dict[int, Fraction]:
    """``n! [q^n] Y^j / (n^n)`` as a Laurent polynomial in n, for j >= 1.

    ``j (n-1)(n-2)...(n-j+1) n^{-j}``; exact for every n >= 1.
    """
    poly = {0: Fraction(j)}
    for i in range(1, j):
        nxt: dict[int, Fraction] = {}
        for e, c in poly.items():
            nxt[e + 1] = nxt.get(e + 1, 0) + c
            nxt[e] = nxt.get(e, 0) - i * c
        poly = nxt
    return _clean({e - j: c for e, c in poly.items()})


@dataclass(frozen=True)
class ClosedForm:
    """coeff_n = P(n) n^n/n! + Q(n) A_n/n! for n >= n0, exceptions below."""

    P: dict[int, Fraction]
    Q: dict[int, Fraction]
    n0: int
    exceptions: tuple[tuple[int, Fraction], ...] = field(default=())

    def coefficient(self, n: int) -> Fraction:
        if n < self.n0:
            for m, c in self.exceptions:
                if m == n:
                    return c
            return Fraction(0)
        nn = Fraction(n**n, factorial(n))
        an = Fraction(a_sequence(n), factorial(n))
        p = sum((c * Fraction(n) ** e for e, c in self.P.items()), Fraction(0))
        q = sum((c * Fraction(n) ** e for e, c in self.Q.items()), Fraction(0))
        return p * nn + q * an

    def to_dict(self) -> dict:
        return {
            "P": {str(e): fraction_str(c) for e, c in self.P.items()},
            "Q": {str(e): fraction_str(c) for e, c in self.Q.items()},
            "n0": self.n0,
            "exceptions": [[n, fraction_str(c)] for n, c in self.exceptions],
        }


def closed_form(a: AElement) -> ClosedForm:
    P: dict[int, Fraction] = {}
    Q: dict[int, Fraction] = {}
    for k, c in a.terms.items():
        if k >= 0:
            # X^k = sum_j C(k, j) (-1)^j Y^j
            for j in range(1, k + 1):
                _laurent_add(P, y_power_laurent(j), c * comb(k, j) * (-1) ** j)
        else:
            # X^-k = (1 + Z)^k = sum_j C(k, j) Z^j
            for j in range(1, -k + 1):
                w = c * comb(-k, j)
                for (kind, m), v in z_power_decompose(j).items():
                    target = P if kind == "Z" else Q
                    target[m] = target.get(m, Fraction(0)) + w * v
    return ClosedForm(_clean(P), _clean(Q), 1, ((0, a.constant_term()),))


@dataclass(frozen=True)
class AsymptoticTerm:
    """Coefficient growth ``c e^n n^alpha`` with ``c = c_gauss/sqrt(2 pi) + c_plain``."""

    alpha: Fraction
    c_gauss: Fraction
    c_plain: Fraction

    def to_dict(self) -> dict:
        return {
            "alpha": fraction_str(self.alpha),
            "c_gauss": fraction_str(self.c_gauss),
            "c_plain": fraction_str(self.c_plain),
        }

    def numeric_constant(self, digits: int = 50) -> str:
        import mpmath

        with mpmath.workdps(digits + 5):
            val = mpmath.mpf(self.c_gauss.numerator) / self.c_gauss.denominator / mpmath.sqrt(
                2 * mpmath.pi
            ) + mpmath.mpf(self.c_plain.numerator) / self.c_plain.denominator
            return mpmath.nstr(val, digits)


def leading_asymptotic(a: AElement) -> AsymptoticTerm:
    if a.is_zero():
        raise ValueError("zero element has no asymptotic")
    cf = closed_form(a)
    if not cf.P and not cf.Q:
        raise ValueError("constant element: coefficients vanish for n >= 1")
    cands = []
    if cf.P:
        e = max(cf.P)
        cands.append(AsymptoticTerm(Fraction(e) - Fraction(1, 2), cf.P[e], Fraction(0)))
    if cf.Q:
        e = max(cf.Q)
        cands.append(AsymptoticTerm(Fraction(e), Fraction(0), cf.Q[e] / 2))
    return max(cands, key=lambda t: t.alpha)
