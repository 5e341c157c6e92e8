"""Truncated formal power series over exact rationals.

Two carriers live here: :class:`PowerSeries` in one variable ``q`` and
:class:`BiSeries` in ``q`` and a second marker ``u``.  Coefficients are
stored against the plain monomials, never against ``q**n / n!``.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and "num/den" strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted")
    return Fraction(value)


def fraction_str(value: Fraction) -> str:
    return str(as_fraction(value))


class SeriesError(ValueError):
    pass


class PowerSeries:
    """Immutable series ``c_0 + c_1 q + ... + c_N q^N + O(q^{N+1})``."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = tuple(as_fraction(c) for c in coeffs)
        if not cs:
            raise SeriesError("a series needs at least the constant term")
        self._coeffs = cs

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    def __getitem__(self, n: int) -> Fraction:
        return self._coeffs[n]

    def __len__(self) -> int:
        return len(self._coeffs)

    def __iter__(self):
        return iter(self._coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __repr__(self) -> str:
        body = ", ".join(str(c) for c in self._coeffs[:8])
        tail = ", ..." if len(self._coeffs) > 8 else ""
        return f"PowerSeries([{body}{tail}], order={self.order})"

    # construction helpers

    @classmethod
    def zero(cls, order: int) -> "PowerSeries":
        return cls([0] * (order + 1))

    @classmethod
    def constant(cls, c, order: int) -> "PowerSeries":
        return cls([c] + [0] * order)

    @classmethod
    def monomial(cls, k: int, order: int, c=1) -> "PowerSeries":
        cs = [0] * (order + 1)
        if k <= order:
            cs[k] = c
        return cls(cs)

    def truncate(self, order: int) -> "PowerSeries":
        if order > self.order:
            raise SeriesError(f"cannot extend a series of order {self.order} to {order}")
        return PowerSeries(self._coeffs[: order + 1])

    # arithmetic; binary operations truncate to the smaller order

    def __add__(self, other):
        if not isinstance(other, PowerSeries):
            other = PowerSeries.constant(other, self.order)
        n = min(self.order, other.order)
        return PowerSeries(self._coeffs[i] + other._coeffs[i] for i in range(n + 1))

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(-c for c in self._coeffs)

    def __sub__(self, other):
        if not isinstance(other, PowerSeries):
            other = PowerSeries.constant(other, self.order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return self.scale(other)
        n = min(self.order, other.order)
        a, b = self._coeffs, other._coeffs
        # skip zero entries; generator series often start at q^1
        nz_a = [(i, c) for i, c in enumerate(a[: n + 1]) if c]
        out = [Fraction(0)] * (n + 1)
        for j, cb in enumerate(b[: n + 1]):
            if not cb:
                continue
            for i, ca in nz_a:
                if i + j > n:
                    break
                out[i + j] += ca * cb
        return PowerSeries(out)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "PowerSeries":
        c = as_fraction(c)
        return PowerSeries(c * x for x in self._coeffs)

    def inverse(self) -> "PowerSeries":
        c0 = self._coeffs[0]
        if c0 == 0:
            raise SeriesError("series with zero constant term is not invertible")
        n = self.order
        inv = [Fraction(0)] * (n + 1)
        inv[0] = 1 / c0
        for k in range(1, n + 1):
            s = sum(self._coeffs[i] * inv[k - i] for i in range(1, k + 1))
            inv[k] = -s / c0
        return PowerSeries(inv)

    def __pow__(self, k: int) -> "PowerSeries":
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        if k < 0:
            return self.inverse() ** (-k)
        result = PowerSeries.constant(1, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def valuation(self) -> int | None:
        for i, c in enumerate(self._coeffs):
            if c:
                return i
        return None

    # serialization

    def to_json(self) -> str:
        return json.dumps([fraction_str(c) for c in self._coeffs])

    @classmethod
    def from_json(cls, text: str) -> "PowerSeries":
        return cls(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "numerator", "denominator"])
        for n, c in enumerate(self._coeffs):
            w.writerow([n, c.numerator, c.denominator])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PowerSeries":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise SeriesError("empty coefficient table")
        order = max(int(r["n"]) for r in rows)
        cs = [Fraction(0)] * (order + 1)
        for r in rows:
            cs[int(r["n"])] = Fraction(int(r["numerator"]), int(r["denominator"]))
        return cls(cs)


def arith(a: PowerSeries, b: PowerSeries | None, op: str, arg=None) -> PowerSeries:
    """Dispatch form of the arithmetic: op in add, sub, mul, scale, pow."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(arg)
    if op == "pow":
        return a ** arg
    raise SeriesError(f"unknown operation {op!r}")


def d_operator(a: PowerSeries) -> PowerSeries:
    """``D = q d/dq``: multiply the coefficient of ``q^n`` by ``n``."""
    return PowerSeries(n * c for n, c in enumerate(a.coeffs))


def derivative(a: PowerSeries) -> PowerSeries:
    """Ordinary d/dq; the result loses one order of precision."""
    if a.order == 0:
        return PowerSeries([0])
    return PowerSeries(n * a[n] for n in range(1, a.order + 1))


def exp(a: PowerSeries) -> PowerSeries:
    if a[0] != 0:
        raise SeriesError("nonzero constant term")
    n = a.order
    out = [Fraction(0)] * (n + 1)
    out[0] = Fraction(1)
    # k f_k = sum_{j=1}^k j a_j f_{k-j}
    for k in range(1, n + 1):
        s = sum((j * a[j] * out[k - j] for j in range(1, k + 1) if a[j]), Fraction(0))
        out[k] = s / k
    return PowerSeries(out)


def log(a: PowerSeries) -> PowerSeries:
    if a[0] != 1:
        raise SeriesError("constant term ≠ 1")
    n = a.order
    out = [Fraction(0)] * (n + 1)
    # k a_k = sum_{j=1}^k j g_j a_{k-j}
    for k in range(1, n + 1):
        s = k * a[k] - sum((j * out[j] * a[k - j] for j in range(1, k)), Fraction(0))
        out[k] = s / k
    return PowerSeries(out)


def exp_log(a: PowerSeries, which: str) -> PowerSeries:
    if which == "exp":
        return exp(a)
    if which == "log":
        return log(a)
    raise SeriesError(f"unknown transform {which!r}")


def a_sequence(n: int) -> int:
    """Total height of Cayley trees, ``sum_{p+q=n} n!/(p!q!) p^p q^q``."""
    return sum(
        factorial(n) // (factorial(p) * factorial(n - p)) * p**p * (n - p) ** (n - p)
        for p in range(1, n)
    )


def generators(name: str, order: int) -> PowerSeries:
    """The tree series Y, Z and the exponential series of ``A_n``."""
    if order < 0:
        raise SeriesError("order must be non-negative")
    if name == "Y":
        return PowerSeries([0] + [Fraction(n ** (n - 1), factorial(n)) for n in range(1, order + 1)])
    if name == "Z":
        return PowerSeries([0] + [Fraction(n**n, factorial(n)) for n in range(1, order + 1)])
    if name in ("A", "Asequence"):
        return PowerSeries([0] + [Fraction(a_sequence(n), factorial(n)) for n in range(1, order + 1)])
    raise SeriesError(f"unknown generator {name!r}")


class BiSeries:
    """Truncated series in ``q`` (order N) and ``u`` (order T)."""

    __slots__ = ("_rows",)

    def __init__(self, rows: Sequence[Sequence]):
        rs = tuple(tuple(as_fraction(c) for c in row) for row in rows)
        if not rs or not rs[0]:
            raise SeriesError("empty bivariate series")
        width = len(rs[0])
        if any(len(r) != width for r in rs):
            raise SeriesError("coefficient array must be rectangular")
        self._rows = rs

    @property
    def order_q(self) -> int:
        return len(self._rows) - 1

    @property
    def order_u(self) -> int:
        return len(self._rows[0]) - 1

    @property
    def rows(self):
        return self._rows

    def __getitem__(self, idx) -> Fraction:
        n, t = idx
        return self._rows[n][t]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiSeries):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        return f"BiSeries(order_q={self.order_q}, order_u={self.order_u})"

    @classmethod
    def zero(cls, order_q: int, order_u: int) -> "BiSeries":
        return cls([[0] * (order_u + 1) for _ in range(order_q + 1)])

    def slice_u0(self) -> PowerSeries:
        return PowerSeries(row[0] for row in self._rows)

    def __add__(self, other: "BiSeries") -> "BiSeries":
        N = min(self.order_q, other.order_q)
        T = min(self.order_u, other.order_u)
        return BiSeries(
            [[self._rows[n][t] + other._rows[n][t] for t in range(T + 1)] for n in range(N + 1)]
        )

    def __sub__(self, other: "BiSeries") -> "BiSeries":
        return self + other.scale(-1)

    def scale(self, c) -> "BiSeries":
        c = as_fraction(c)
        return BiSeries([[c * x for x in row] for row in self._rows])

    def __mul__(self, other: "BiSeries") -> "BiSeries":
        N = min(self.order_q, other.order_q)
        T = min(self.order_u, other.order_u)
        out = [[Fraction(0)] * (T + 1) for _ in range(N + 1)]
        for i in range(N + 1):
            ai = [(s, c) for s, c in enumerate(self._rows[i][: T + 1]) if c]
            if not ai:
                continue
            for j in range(N + 1 - i):
                bj = [(s, c) for s, c in enumerate(other._rows[j][: T + 1]) if c]
                row = out[i + j]
                for s, ca in ai:
                    for r, cb in bj:
                        if s + r > T:
                            break
                        row[s + r] += ca * cb
        return BiSeries(out)


def _upoly_mul_into(acc: list, a: Sequence, b: Sequence, coef, T: int) -> None:
    """acc += coef * a * b, truncated at u^T."""
    nz_b = [(r, c) for r, c in enumerate(b[: T + 1]) if c]
    if not nz_b:
        return
    for s, ca in enumerate(a[: T + 1]):
        if not ca:
            continue
        ca = ca * coef
        for r, cb in nz_b:
            if s + r > T:
                break
            acc[s + r] += ca * cb


def bi_exp(a: BiSeries) -> BiSeries:
    """Formal exponential of a BiSeries with zero constant term."""
    if a[0, 0] != 0:
        raise SeriesError("nonzero constant term")
    return _graded_exp_log(a, inverse=False)


def bi_log(a: BiSeries) -> BiSeries:
    """Formal logarithm of a BiSeries whose constant term is 1."""
    if a[0, 0] != 1:
        raise SeriesError("constant term ≠ 1")
    return _graded_exp_log(a, inverse=True)


def _graded_exp_log(a: BiSeries, inverse: bool) -> BiSeries:
    # Euler operator E = q d/dq + u d/du on F = exp(G): (n+t) F_nt = sum (i+j) G_ij F_{n-i,t-j}
    N, T = a.order_q, a.order_u
    src = a.rows
    F = [[Fraction(0)] * (T + 1) for _ in range(N + 1)]
    G = [[Fraction(0)] * (T + 1) for _ in range(N + 1)]
    if inverse:
        F = [list(r) for r in src]
    else:
        G = [list(r) for r in src]
        F[0][0] = Fraction(1)
    nz_G: list[tuple[int, int, Fraction]] = []
    for total in range(1, N + T + 1):
        for n in range(max(0, total - T), min(N, total) + 1):
            t = total - n
            s = Fraction(0)
            for i, j, w in nz_G:
                if i <= n and j <= t:
                    f = F[n - i][t - j]
                    if f:
                        s += w * f
            if inverse:
                g = F[n][t] - s / total
                G[n][t] = g
            else:
                g = G[n][t]
                F[n][t] = s / total + g
            if g:
                nz_G.append((n, t, (n + t) * g))
    return BiSeries(G if inverse else F)
