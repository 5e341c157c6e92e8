"""Hurwitz numbers of marked coverings of the sphere.

Coverings are encoded by monodromy: a branch point of type mu has monodromy
whose cycle type is the parts of mu of size >= 2 completed by fixed points,
and the marked simple preimages are chosen among those fixed points.  The
remaining c(n) = 2n + 2g - 2 - r branch points are simple (transpositions).
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod
from typing import Iterable, Iterator, Sequence

from .algebra import AElement, AsymptoticTerm, FitFailure, fit_escalating, leading_asymptotic
from .guards import GuardError, guard_exceeded
from .series import BiSeries, PowerSeries, bi_log

MAX_CLASS_N = 30
MAX_CLASS_SIZE = 10**6
MAX_BRUTE_N = 6
MAX_BRUTE_T = 10


# partitions -------------------------------------------------------------------


@dataclass(frozen=True)
class Partition:
    """A ramification type; parts are stored in decreasing order."""

    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(sorted((int(b) for b in self.parts), reverse=True))
        if any(b < 1 for b in parts):
            raise ValueError("partition parts must be positive")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Accepts ``"3,2,2"``, ``"1^2 3"`` or ``""`` for the empty partition."""
        text = text.strip()
        if not text:
            return cls(())
        if "^" in text or (" " in text and "," not in text):
            parts: list[int] = []
            for token in text.split():
                m = re.fullmatch(r"(\d+)(?:\^(\d+))?", token)
                if not m:
                    raise ValueError(f"cannot parse partition token {token!r}")
                parts += [int(m.group(1))] * int(m.group(2) or 1)
            return cls(tuple(parts))
        try:
            return cls(tuple(int(x) for x in text.split(",")))
        except ValueError as exc:
            raise ValueError(f"cannot parse partition {text!r}") from exc

    @property
    def m(self) -> int:
        return sum(self.parts)

    @property
    def p(self) -> int:
        return len(self.parts)

    @property
    def r(self) -> int:
        return self.m - self.p

    @property
    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self.parts))

    @property
    def aut(self) -> int:
        return prod(factorial(a) for a in Counter(self.parts).values())

    @property
    def a1(self) -> int:
        return self.parts.count(1)

    def nontrivial(self) -> tuple[int, ...]:
        return tuple(b for b in self.parts if b >= 2)

    def completed(self, n: int) -> tuple[int, ...]:
        """Cycle type of the monodromy in S_n (fixed points included)."""
        if n < self.m:
            raise ValueError(f"partition {self} does not fit in {n} sheets")
        return self.nontrivial() + (1,) * (n - sum(self.nontrivial()))

    def marking_factor(self, n: int) -> int:
        return comb(self.a1 + n - self.m, self.a1)

    def __str__(self):
        return ",".join(map(str, self.parts))


def parse_mus(text: str) -> list[Partition]:
    """``"p1;p2;..."``; empty items denote unramified points and are dropped."""
    out = []
    for item in text.split(";"):
        mu = Partition.parse(item)
        if mu.parts:
            out.append(mu)
    return out


def partitions(n: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of n as decreasing tuples."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def class_size(lam: Sequence[int]) -> int:
    n = sum(lam)
    z = prod(j**a * factorial(a) for j, a in Counter(lam).items())
    return factorial(n) // z


def cycle_type(perm: Sequence[int]) -> tuple[int, ...]:
    seen = [False] * len(perm)
    out = []
    for i in range(len(perm)):
        if not seen[i]:
            length = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            out.append(length)
    return tuple(sorted(out, reverse=True))


def compose(x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
    """``x*y``: apply y first, then x."""
    return tuple(x[j] for j in y)


def class_elements(lam: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Every permutation of {0..n-1} with cycle type ``lam``, once each."""
    n = sum(lam)
    cycles = sorted((b for b in lam if b >= 2), reverse=True)
    perm = list(range(n))
    used = [False] * n

    def rec(idx: int, prev_min: int):
        if idx == len(cycles):
            yield tuple(perm)
            return
        length = cycles[idx]
        lo = prev_min + 1 if idx and cycles[idx - 1] == length else 0
        for start in range(lo, n):
            if used[start]:
                continue
            free = [v for v in range(start + 1, n) if not used[v]]
            used[start] = True
            for rest in itertools.permutations(free, length - 1):
                cyc = (start,) + rest
                for v in rest:
                    used[v] = True
                for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                    perm[a] = b
                yield from rec(idx + 1, start)
                for v in cyc:
                    perm[v] = v
                for v in rest:
                    used[v] = False
            used[start] = False

    yield from rec(0, -1)


def representative(lam: Sequence[int]) -> tuple[int, ...]:
    perm = []
    start = 0
    for b in lam:
        perm += [start + (i + 1) % b for i in range(b)]
        start += b
    return tuple(perm)


# class vectors ----------------------------------------------------------------


@dataclass
class ClassVector:
    """Weights on the conjugacy classes of S_n, as element counts."""

    n: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for lam, w in self.entries.items():
            lam = tuple(sorted(lam, reverse=True))
            if sum(lam) != self.n:
                raise ValueError(f"{lam} is not a partition of {self.n}")
            if w:
                clean[lam] = clean.get(lam, 0) + w
        self.entries = {k: v for k, v in clean.items() if v}

    @classmethod
    def identity(cls, n: int) -> "ClassVector":
        return cls(n, {(1,) * n: 1})

    def __getitem__(self, lam) -> int | Fraction:
        return self.entries.get(tuple(sorted(lam, reverse=True)), 0)

    def __eq__(self, other):
        if not isinstance(other, ClassVector):
            return NotImplemented
        return self.n == other.n and self.entries == other.entries


@lru_cache(maxsize=None)
def _class_index(n: int) -> tuple[tuple[tuple[int, ...], ...], dict]:
    parts = tuple(partitions(n))
    return parts, {lam: i for i, lam in enumerate(parts)}


@lru_cache(maxsize=None)
def _transposition_transitions(n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """For each class, the classes reached by one transposition and how often."""
    parts, index = _class_index(n)
    out = []
    for lam in parts:
        mult = Counter(lam)
        targets: Counter = Counter()
        for L, a in mult.items():
            for i in range(1, L // 2 + 1):
                j = L - i
                ways = a * (L if i != j else L // 2)
                new = list(lam)
                new.remove(L)
                new += [i, j]
                targets[index[tuple(sorted(new, reverse=True))]] += ways
        lengths = sorted(mult)
        for x, L1 in enumerate(lengths):
            for L2 in lengths[x:]:
                if L1 == L2:
                    ways = comb(mult[L1], 2) * L1 * L1
                else:
                    ways = mult[L1] * mult[L2] * L1 * L2
                if not ways:
                    continue
                new = list(lam)
                new.remove(L1)
                new.remove(L2)
                new.append(L1 + L2)
                targets[index[tuple(sorted(new, reverse=True))]] += ways
        out.append(tuple(sorted(targets.items())))
    return tuple(out)


def _check_class_n(n: int) -> None:
    if n < 0 or guard_exceeded(n > MAX_CLASS_N):
        raise GuardError(f"class-algebra dynamics support n <= {MAX_CLASS_N}, got {n}")


def _cut_and_join_list(n: int, vec: list) -> list:
    trans = _transposition_transitions(n)
    out = [0] * len(vec)
    for i, w in enumerate(vec):
        if w:
            for j, ways in trans[i]:
                out[j] += w * ways
    return out


def _to_list(v: ClassVector) -> list:
    parts, index = _class_index(v.n)
    vec = [0] * len(parts)
    for lam, w in v.entries.items():
        vec[index[lam]] = w
    return vec


def _from_list(n: int, vec: Sequence) -> ClassVector:
    parts, _ = _class_index(n)
    return ClassVector(n, {parts[i]: w for i, w in enumerate(vec) if w})


def cut_and_join(v: ClassVector) -> ClassVector:
    """Multiply by the sum of all transpositions."""
    _check_class_n(v.n)
    return _from_list(v.n, _cut_and_join_list(v.n, _to_list(v)))


def _class_multiply_list(n: int, vec: Sequence, lam: tuple[int, ...]) -> list:
    parts, index = _class_index(n)
    out = [0] * len(parts)
    nonzero = [(i, w) for i, w in enumerate(vec) if w]
    if len(nonzero) == 1 and nonzero[0][0] == index[(1,) * n]:
        out[index[lam]] = nonzero[0][1] * class_size(lam)
        return out
    if guard_exceeded(class_size(lam) > MAX_CLASS_SIZE):
        raise GuardError(f"class {lam} has more than {MAX_CLASS_SIZE} elements")
    elements = list(class_elements(lam))
    for i, w in nonzero:
        x = representative(parts[i])
        counts: Counter = Counter(cycle_type(compose(x, y)) for y in elements)
        for mu, c in counts.items():
            out[index[mu]] += w * c
    return out


def class_multiply(v: ClassVector, lam: Sequence[int]) -> ClassVector:
    """Multiply by the class sum of ``lam`` (representative-based convolution)."""
    _check_class_n(v.n)
    lam = tuple(sorted(lam, reverse=True))
    if sum(lam) != v.n:
        raise ValueError(f"{lam} is not a partition of {v.n}")
    return _from_list(v.n, _class_multiply_list(v.n, _to_list(v), lam))


# queries ----------------------------------------------------------------------------


@dataclass(frozen=True)
class HurwitzQuery:
    g: int
    mus: tuple[Partition, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "mus", tuple(self.mus))
        if self.g < 0 or self.n < 0:
            raise ValueError("genus and sheet count must be non-negative")

    @property
    def r(self) -> int:
        return sum(mu.r for mu in self.mus)

    @property
    def c(self) -> int:
        return simple_point_count(self.g, self.mus, self.n)


def simple_point_count(g: int, mus: Sequence[Partition], n: int) -> int:
    return 2 * n + 2 * g - 2 - sum(mu.r for mu in mus)


def _fits(mus: Sequence[Partition], n: int) -> bool:
    return all(mu.m <= n for mu in mus)


def _tuple_counts(n: int, mus: Sequence[Partition], T: int) -> list[int]:
    """Marked monodromy tuples with product 1, for 0..T transpositions (not divided by n!)."""
    if n == 0:
        return [1 if not any(mu.parts for mu in mus) else 0] + [0] * T
    if not _fits(mus, n):
        return [0] * (T + 1)
    _check_class_n(n)
    parts, index = _class_index(n)
    ident = index[(1,) * n]
    start = [0] * len(parts)
    start[ident] = 1
    w = start
    for mu in mus:
        w = _class_multiply_list(n, w, mu.completed(n))
    marking = prod(mu.marking_factor(n) for mu in mus)
    # <w C^t, e> = sum_lam (w C^a)_lam (C^b)_lam z_lam / n!  with a + b = t
    half = T // 2 + 1
    left = [w]
    for _ in range(half):
        left.append(_cut_and_join_list(n, left[-1]))
    if w is start:
        right = left
    else:
        right = [start]
        for _ in range(half):
            right.append(_cut_and_join_list(n, right[-1]))
    z = [factorial(n) // class_size(lam) for lam in parts]
    nf = factorial(n)
    out = []
    for t in range(T + 1):
        a = (t + 1) // 2
        b = t - a
        u, v = left[a], right[b]
        s = sum(u[i] * v[i] * z[i] for i in range(len(parts)) if u[i] and v[i])
        if s % nf:
            raise ArithmeticError("class pairing is not integral")
        out.append(marking * (s // nf))
    return out


def disconnected_count(q: HurwitzQuery) -> Fraction:
    """Possibly disconnected marked coverings, weighted by 1/n!."""
    c = q.c
    if c < 0:
        return Fraction(0)
    return Fraction(_tuple_counts(q.n, q.mus, c)[c], factorial(q.n))


def _sub_partitions(mu: Partition) -> list[Partition]:
    mult = mu.multiplicities
    sizes = sorted(mult)
    out = []
    for counts in itertools.product(*(range(mult[s] + 1) for s in sizes)):
        out.append(Partition(tuple(s for s, c in zip(sizes, counts) for _ in range(c))))
    return out


def connected_counts(g: int, mus: Sequence[Partition], N: int) -> list[Fraction]:
    """Connected Hurwitz numbers h_{g,n;mus} for n = 0..N."""
    mus = tuple(mu for mu in mus if mu.parts)
    if N < 0:
        raise ValueError("N must be non-negative")
    _check_class_n(N)
    T = simple_point_count(g, mus, N)
    if T < 0:
        return [Fraction(0)] * (N + 1)
    if not mus:
        return _connected_unramified(g, N, T)
    return _connected_multi(g, mus, N, T)


def _connected_unramified(g: int, N: int, T: int) -> list[Fraction]:
    rows = []
    for n in range(N + 1):
        counts = _tuple_counts(n, (), T)
        rows.append([Fraction(x, factorial(n) * factorial(t)) for t, x in enumerate(counts)])
    logged = bi_log(BiSeries(rows))
    out = []
    for n in range(N + 1):
        c = simple_point_count(g, (), n)
        out.append(logged[n, c] * factorial(c) if 0 <= c <= T and n else Fraction(0))
    return out


def _connected_multi(g: int, mus: tuple[Partition, ...], N: int, T: int) -> list[Fraction]:
    # Exponential formula with the parts of each mu distributed among components.
    # Integer form: N[n, nu, t] = sum C(n-1, i-1) C(t, s) M[i, beta, s] N[n-i, nu-beta, t-s]
    # where the component through sheet 1 has i sheets, parts beta and s transpositions.
    subs = [_sub_partitions(mu) for mu in mus]
    vectors = list(itertools.product(*subs))
    key = {v: i for i, v in enumerate(vectors)}

    def minus(a, b):
        out = []
        for x, y in zip(a, b):
            cx, cy = Counter(x.parts), Counter(y.parts)
            if cy - cx:
                return None
            out.append(Partition(tuple((cx - cy).elements())))
        return tuple(out)

    pairs = {}
    for a in vectors:
        lst = []
        for b in vectors:
            d = minus(a, b)
            if d is not None:
                lst.append((key[b], key[d]))
        pairs[key[a]] = lst

    full = key[tuple(mus)]
    Ndis = [[_tuple_counts(n, vec, T) for vec in vectors] for n in range(N + 1)]
    M = [[[0] * (T + 1) for _ in vectors] for _ in range(N + 1)]
    binom_t = [[comb(t, s) for s in range(t + 1)] for t in range(T + 1)]
    for n in range(1, N + 1):
        for a in range(len(vectors)):
            for t in range(T + 1):
                total = Ndis[n][a][t]
                for i in range(1, n + 1):
                    ci = comb(n - 1, i - 1)
                    for b, d in pairs[a]:
                        Mi = M[i][b]
                        rest = Ndis[n - i][d]
                        for s in range(t + 1):
                            if i == n and b == a and s == t:
                                continue
                            m = Mi[s]
                            if m:
                                r = rest[t - s]
                                if r:
                                    total -= ci * binom_t[t][s] * m * r
                M[n][a][t] = total
    out = []
    for n in range(N + 1):
        c = simple_point_count(g, mus, n)
        if n == 0 or c < 0 or c > T:
            out.append(Fraction(0))
        else:
            out.append(Fraction(M[n][full][c], factorial(n)))
    return out


# brute force --------------------------------------------------------------------------


def _join_blocks(blocks: tuple[int, ...], perm: Sequence[int]) -> tuple[int, ...]:
    parent = list(blocks)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in enumerate(perm):
        a, b = find(i), find(j)
        if a != b:
            parent[max(a, b)] = min(a, b)
    return tuple(find(i) for i in range(len(blocks)))


@lru_cache(maxsize=None)
def _brute_force_table(n: int, mus: tuple[Partition, ...], T: int) -> tuple[int, ...]:
    """Transitive tuples (sigma_1..sigma_k, tau_1..tau_t) with product 1, t <= T."""
    ident = tuple(range(n))
    states: Counter = Counter({(ident, ident): 1})
    for mu in mus:
        elements = list(class_elements(mu.completed(n)))
        nxt: Counter = Counter()
        for (prod_, blocks), w in states.items():
            for y in elements:
                nxt[(compose(prod_, y), _join_blocks(blocks, y))] += w
        states = nxt
    transpositions = [
        tuple(j if k == i else i if k == j else k for k in range(n))
        for i in range(n) for j in range(i + 1, n)
    ]
    connected = tuple([0] * n)
    out = []
    for t in range(T + 1):
        out.append(states.get((ident, connected), 0))
        if t == T:
            break
        nxt = Counter()
        for (prod_, blocks), w in states.items():
            for y in transpositions:
                nxt[(compose(prod_, y), _join_blocks(blocks, y))] += w
        states = nxt
    return tuple(out)


def brute_force_oracle(q: HurwitzQuery) -> Fraction:
    """Connected count by direct enumeration of monodromy tuples."""
    mus = tuple(mu for mu in q.mus if mu.parts)
    c = q.c
    if q.n < 1 or guard_exceeded(q.n > MAX_BRUTE_N) or guard_exceeded(c > MAX_BRUTE_T):
        raise GuardError(f"brute force supports 1 <= n <= {MAX_BRUTE_N} and c(n) <= {MAX_BRUTE_T}")
    if c < 0 or not _fits(mus, q.n):
        return Fraction(0)
    count = _brute_force_table(q.n, mus, max(c, MAX_BRUTE_T))[c]
    marking = prod(mu.marking_factor(q.n) for mu in mus)
    return Fraction(count * marking, factorial(q.n))


# closed form and series -----------------------------------------------------------------


def genus0_closed(n: int, mu: Partition) -> Fraction:
    """The genus-0 formula for one ramification type plus simple points."""
    p, r = mu.p, mu.r
    if n < p + r or n < 1:
        return Fraction(0)
    c = 2 * n - 2 - r
    if c < 0:
        return Fraction(0)
    value = Fraction(factorial(c), mu.aut)
    for b in mu.parts:
        value *= Fraction(b**b, factorial(b))
    value *= Fraction(n) ** (n - r - 3)
    return value / factorial(n - p - r)


def h_series(g: int, mus: Sequence[Partition], N: int) -> PowerSeries:
    """``sum_n h_{g,n;mus} / c(n)! q^n``."""
    mus = tuple(mu for mu in mus if mu.parts)
    h = connected_counts(g, mus, N)
    coeffs = []
    for n in range(N + 1):
        c = simple_point_count(g, mus, n)
        coeffs.append(h[n] / factorial(c) if c >= 0 else Fraction(0))
    return PowerSeries(coeffs)


class FitError(ValueError):
    def __init__(self, failure: FitFailure):
        super().__init__(f"fit failed: {failure.reason} at index {failure.index} (window {failure.window})")
        self.failure = failure


def fit_and_b(g: int, mus: Sequence[Partition], N: int, max_window: int,
              holdout: int = 8) -> tuple[AElement, int, AsymptoticTerm]:
    """Fit the Hurwitz series into the algebra and read off its leading asymptotic."""
    series = h_series(g, mus, N)
    elem, window = fit_escalating(series, max_window, holdout)
    if window is None:
        raise FitError(elem)
    return elem, window, leading_asymptotic(elem)


def expected_alpha(g: int) -> Fraction:
    return Fraction(5 * (g - 1), 2) - 1
