"""Finite metric spaces with exact distances, isometry search, genericity tests."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import (
    AsymmetricMatrix,
    DisconnectedGraph,
    DuplicateEdge,
    NegativeOrZeroOffDiagonal,
    NonPositiveFactor,
    NonZeroDiagonal,
    SelfLoop,
    TriangleViolation,
    ValidationError,
)
from .scalar import EMPTY_BASIS, ExactScalar, SymbolBasis


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Validated symmetric distance matrix; build with :func:`make_space`."""

    dist: tuple[tuple[ExactScalar, ...], ...]
    basis: SymbolBasis = EMPTY_BASIS
    metric: bool = True

    @property
    def n(self) -> int:
        return len(self.dist)

    def __len__(self):
        return len(self.dist)

    def d(self, i: int, j: int) -> ExactScalar:
        return self.dist[i][j]

    def pairs(self):
        """Yield ``(i, j, d_ij)`` for ``i < j``."""
        for i in range(self.n):
            row = self.dist[i]
            for j in range(i + 1, self.n):
                yield i, j, row[j]

    def edge_lengths(self) -> list[ExactScalar]:
        return [d for _, _, d in self.pairs()]

    def is_rational(self) -> bool:
        return all(d.is_rational() for d in self.edge_lengths())

    def __eq__(self, other):
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self.dist == other.dist

    def __hash__(self):
        return hash(self.dist)

    def __repr__(self):
        rows = "; ".join(" ".join(str(d) for d in row) for row in self.dist)
        return f"FiniteMetricSpace(n={self.n}, [{rows}])"


def make_space(
    dist: Sequence[Sequence],
    basis: SymbolBasis | None = None,
    allow_nonmetric: bool = False,
) -> FiniteMetricSpace:
    """Validate and freeze a distance matrix.

    Entries may be ExactScalars, ints, Fractions or scalar strings.  With
    ``allow_nonmetric`` the triangle inequality is not enforced (the result is
    flagged, and reconstruction refuses it).
    """
    n = len(dist)
    if n < 1:
        raise ValidationError("a metric space needs at least one point")
    if any(len(row) != n for row in dist):
        raise ValidationError("distance matrix must be square")
    mat = tuple(tuple(ExactScalar.coerce(x) for x in row) for row in dist)
    for i in range(n):
        if not mat[i][i].is_zero():
            raise NonZeroDiagonal(i)
        for j in range(i + 1, n):
            if mat[i][j] != mat[j][i]:
                raise AsymmetricMatrix(i, j)
            if mat[i][j].sign() <= 0:
                raise NegativeOrZeroOffDiagonal(i, j)
    if not allow_nonmetric:
        check_triangle(mat)
    if basis is None:
        basis = SymbolBasis.for_scalars(d for row in mat for d in row)
    return FiniteMetricSpace(mat, basis, not allow_nonmetric or _is_metric(mat))


def check_triangle(mat) -> None:
    n = len(mat)
    for i in range(n):
        for k in range(i + 1, n):
            dik = mat[i][k]
            for j in range(n):
                if j == i or j == k:
                    continue
                slack = mat[i][j] + mat[j][k] - dik
                if not slack.is_zero() and slack.sign() < 0:
                    raise TriangleViolation(i, j, k)


def _is_metric(mat) -> bool:
    try:
        check_triangle(mat)
    except TriangleViolation:
        return False
    return True


def all_pairs_hops(n: int, edges: Iterable[tuple[int, int]]) -> list[list[int | None]]:
    """Breadth-first all-pairs hop distances; ``None`` marks unreachable pairs."""
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    out = []
    for s in range(n):
        row: list[int | None] = [None] * n
        row[s] = 0
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if row[v] is None:
                        row[v] = row[u] + 1
                        nxt.append(v)
            frontier = nxt
        out.append(row)
    return out


def check_simple_graph(n: int, edges: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    seen = set()
    out = []
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValidationError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"duplicate edge {key}")
        seen.add(key)
        out.append(key)
    return out


def graph_to_metric(n: int, edges: Iterable[tuple[int, int]]) -> FiniteMetricSpace:
    """Shortest-path metric of a connected simple graph with unit edges."""
    edges = check_simple_graph(n, edges)
    hops = all_pairs_hops(n, edges)
    if any(h is None for row in hops for h in row):
        raise DisconnectedGraph("graph is not connected")
    return make_space(hops)


def scale(X: FiniteMetricSpace, t) -> FiniteMetricSpace:
    t = Fraction(t)
    if t <= 0:
        raise NonPositiveFactor(f"scale factor must be positive, got {t}")
    if t == 1:
        return X
    return FiniteMetricSpace(tuple(tuple(d * t for d in row) for row in X.dist), X.basis, X.metric)


def permute(X: FiniteMetricSpace, perm: Sequence[int]) -> FiniteMetricSpace:
    """Relabel so that new point ``i`` is old point ``perm[i]``."""
    return FiniteMetricSpace(
        tuple(tuple(X.dist[pi][pj] for pj in perm) for pi in perm), X.basis, X.metric
    )


def _row_signature(row) -> frozenset:
    return frozenset(Counter(row).items())


def is_isometric(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> list[int] | None:
    """Return ``sigma`` with ``d_Y(sigma[i], sigma[j]) == d_X(i, j)``, or None."""
    n = X.n
    if n != Y.n:
        return None
    if Counter(X.edge_lengths()) != Counter(Y.edge_lengths()):
        return None
    sig_x = [_row_signature(r) for r in X.dist]
    sig_y = [_row_signature(r) for r in Y.dist]
    if Counter(sig_x) != Counter(sig_y):
        return None
    candidates = [[j for j in range(n) if sig_y[j] == sig_x[i]] for i in range(n)]
    # most constrained points first
    order = sorted(range(n), key=lambda i: len(candidates[i]))
    sigma = [-1] * n
    used = [False] * n

    def extend(depth: int) -> bool:
        if depth == n:
            return True
        i = order[depth]
        for j in candidates[i]:
            if used[j]:
                continue
            if all(Y.dist[j][sigma[k]] == X.dist[i][k] for k in order[:depth]):
                sigma[i] = j
                used[j] = True
                if extend(depth + 1):
                    return True
                used[j] = False
        sigma[i] = -1
        return False

    return sigma if extend(0) else None


def _rank(rows: list[list[Fraction]]) -> int:
    rows = [list(r) for r in rows]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        for r in range(rank + 1, len(rows)):
            f = rows[r][col] / p
            if f:
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


def is_generic(X: FiniteMetricSpace) -> bool:
    """Distances (i < j) linearly independent over the rationals.

    Assumes the declared symbols together with 1 are rationally independent.
    """
    lengths = X.edge_lengths()
    keys = sorted({"1", *(n for d in lengths for n in d.symbol_names())})
    if len(lengths) > len(keys):
        return False
    rows = [[d.coords().get(k, Fraction(0)) for k in keys] for d in lengths]
    return _rank(rows) == len(lengths)


def is_weak3generic(X: FiniteMetricSpace) -> bool:
    return triple_sums_unique(X.edge_lengths())


def triple_sums_unique(lengths: Sequence[ExactScalar]) -> bool:
    if len(set(lengths)) != len(lengths):
        return False
    seen = set()
    for a, b, c in combinations(lengths, 3):
        s = a + b + c
        if s in seen:
            return False
        seen.add(s)
    return True


@dataclass(frozen=True)
class LengthMultiset:
    """Multiset of exact lengths, sorted by numeric value."""

    entries: tuple[tuple[ExactScalar, int], ...]

    @classmethod
    def of(cls, values: Iterable) -> LengthMultiset:
        counts = Counter(ExactScalar.coerce(v) for v in values)
        ordered = sorted(counts.items(), key=lambda kv: _NumericKey(kv[0]))
        return cls(tuple(ordered))

    def __post_init__(self):
        if any(m < 1 for _, m in self.entries):
            raise ValidationError("multiplicities must be positive")

    def __len__(self):
        return sum(m for _, m in self.entries)

    def __iter__(self):
        for v, m in self.entries:
            for _ in range(m):
                yield v

    def values(self) -> list[ExactScalar]:
        return list(self)

    def counter(self) -> Counter:
        return Counter(dict(self.entries))

    def max(self) -> ExactScalar:
        return self.entries[-1][0]

    def min(self) -> ExactScalar:
        return self.entries[0][0]

    def total(self) -> ExactScalar:
        out = ExactScalar()
        for v, m in self.entries:
            out = out + v * m
        return out

    def scaled(self, t) -> LengthMultiset:
        return LengthMultiset.of(v * Fraction(t) for v in self)

    def __str__(self):
        return "[" + ", ".join(str(v) for v in self) + "]"

    def to_json(self) -> list:
        return [str(v) for v in self]


class _NumericKey:
    """Sort key: numeric value, guarded against unresolvable ties."""

    __slots__ = ("x",)

    def __init__(self, x: ExactScalar):
        self.x = x

    def __lt__(self, other):
        return self.x != other.x and self.x.compare(other.x) < 0


def numeric_sorted(values: Iterable[ExactScalar]) -> list[ExactScalar]:
    return sorted(values, key=_NumericKey)
