"""Example spaces, gluing constructions and the pairwise comparison harness."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations

import mpmath

from .errors import DuplicatePosition, IndexOutOfRange, InvalidGluing, SingularSimilarityMatrix, ValidationError
from .invariants import (
    adjacency_charpoly,
    charpoly,
    formal_magnitude,
    magnitude,
    stochastic_charpoly,
)
from .metric import FiniteMetricSpace, check_simple_graph, graph_to_metric, is_isometric, make_space
from .scalar import default_digits, ngon_chord

Graph = tuple[int, list[tuple[int, int]]]


# --- graphs --------------------------------------------------------------------


def path_edges(n: int) -> Graph:
    return n, [(i, i + 1) for i in range(n - 1)]


def cycle_edges(n: int) -> Graph:
    if n < 3:
        raise ValidationError("cycle needs at least 3 vertices")
    return n, [(i, (i + 1) % n) for i in range(n)]


def complete_edges(n: int) -> Graph:
    return n, list(combinations(range(n), 2))


def star_edges(leaves: int) -> Graph:
    return leaves + 1, [(0, i) for i in range(1, leaves + 1)]


def prism_edges() -> Graph:
    """Triangular prism C3 x K2."""
    return 6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]


def k33_edges() -> Graph:
    return 6, [(i, j) for i in range(3) for j in range(3, 6)]


def path_graph(n: int) -> FiniteMetricSpace:
    if n < 1:
        raise ValidationError("path needs at least one vertex")
    return graph_to_metric(*path_edges(n))


def cycle_graph(n: int) -> FiniteMetricSpace:
    return graph_to_metric(*cycle_edges(n))


def complete_graph(n: int) -> FiniteMetricSpace:
    if n < 1:
        raise ValidationError("complete graph needs at least one vertex")
    return graph_to_metric(*complete_edges(n))


def star_graph(leaves: int) -> FiniteMetricSpace:
    return graph_to_metric(*star_edges(leaves))


def prism_and_k33() -> tuple[FiniteMetricSpace, FiniteMetricSpace]:
    """The two six-vertex fibrations over a triangle with a two-point fiber."""
    return graph_to_metric(*prism_edges()), graph_to_metric(*k33_edges())


def cospectral_pair() -> tuple[Graph, Graph]:
    """C4 + K1 and the star K1,4: the smallest adjacency-cospectral pair."""
    return (5, [(0, 1), (1, 2), (2, 3), (3, 0)]), star_edges(4)


# --- metric constructions ------------------------------------------------------------


def wedge_sum(X: FiniteMetricSpace, Y: FiniteMetricSpace, x0: int, y0: int) -> FiniteMetricSpace:
    """Glue ``x0`` to ``y0``; cross distances run through the common point.

    Points of X keep their indices; points of Y other than ``y0`` follow.
    """
    if not 0 <= x0 < X.n:
        raise IndexOutOfRange(f"basepoint {x0} outside 0..{X.n - 1}")
    if not 0 <= y0 < Y.n:
        raise IndexOutOfRange(f"basepoint {y0} outside 0..{Y.n - 1}")
    ys = [j for j in range(Y.n) if j != y0]
    n = X.n + len(ys)
    D = [[0] * n for _ in range(n)]
    for i in range(X.n):
        for j in range(X.n):
            D[i][j] = X.dist[i][j]
    for a, j in enumerate(ys):
        u = X.n + a
        for b, k in enumerate(ys):
            D[u][X.n + b] = Y.dist[j][k]
        D[u][x0] = D[x0][u] = Y.dist[j][y0]
        for i in range(X.n):
            if i != x0:
                D[u][i] = D[i][u] = X.dist[i][x0] + Y.dist[y0][j]
    return make_space(D, allow_nonmetric=not (X.metric and Y.metric))


def whitney_twist(G: Graph, H: Graph, g_plus: int, g_minus: int, h_plus: int, h_minus: int) -> tuple[Graph, Graph]:
    """The two gluings of G and H along two marked vertex pairs.

    The first identifies g+ with h+ and g- with h-, the second g+ with h- and
    g- with h+.  A double edge created by the gluing is kept once.
    """
    nG, eG = G[0], check_simple_graph(*G)
    nH, eH = H[0], check_simple_graph(*H)
    if g_plus == g_minus or h_plus == h_minus:
        raise InvalidGluing("gluing points must be distinct")
    for v, n in ((g_plus, nG), (g_minus, nG), (h_plus, nH), (h_minus, nH)):
        if not 0 <= v < n:
            raise InvalidGluing(f"gluing vertex {v} out of range")

    def glue(pairing: dict[int, int]) -> Graph:
        mapping = {}
        nxt = nG
        for v in range(nH):
            if v in pairing:
                mapping[v] = pairing[v]
            else:
                mapping[v] = nxt
                nxt += 1
        edges = {tuple(sorted(e)) for e in eG}
        edges |= {tuple(sorted((mapping[u], mapping[v]))) for u, v in eH}
        return nxt, sorted(edges)

    return glue({h_plus: g_plus, h_minus: g_minus}), glue({h_minus: g_plus, h_plus: g_minus})


def regular_ngon(n: int) -> FiniteMetricSpace:
    """Vertices of a regular n-gon with unit side; chords sin(m pi/n)/sin(pi/n)."""
    if n < 3:
        raise ValidationError("regular polygon needs n >= 3")
    chords = [ngon_chord(n, m) for m in range(n // 2 + 1)]
    return make_space([[chords[_gap(i, j, n)] if i != j else 0 for j in range(n)] for i in range(n)])


def _gap(i: int, j: int, n: int) -> int:
    m = abs(i - j) % n
    return min(m, n - m)


def isomer_R9prime() -> FiniteMetricSpace:
    """Nonagon isomer: chord classes 3 and 4 swapped."""
    swap = {0: 0, 1: 1, 2: 2, 3: 4, 4: 3}
    chords = {m: ngon_chord(9, m) for m in range(5)}
    return make_space([[chords[swap[_gap(i, j, 9)]] if i != j else 0 for j in range(9)] for i in range(9)])


def circle_space(subset, n_total: int = 16) -> FiniteMetricSpace:
    """Points of ``subset`` (positions 1..n_total) on a circle of circumference n_total."""
    subset = list(subset)
    if len(set(subset)) != len(subset):
        raise DuplicatePosition("positions must be distinct")
    if any(not 1 <= p <= n_total for p in subset):
        raise ValidationError(f"positions must lie in 1..{n_total}")
    return make_space([[_gap(a, b, n_total) for b in subset] for a in subset])


# --- comparison harness ------------------------------------------------------------------


@dataclass(frozen=True)
class CompareConfig:
    digits: int | None = None
    t_samples: tuple = (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4))
    magnitude_tol: str = "1e-20"
    formal_cutoff: Fraction = Fraction(20)
    q_samples: tuple = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(3, 5), Fraction(5, 7))
    stochastic_tol: str = "1e-30"


@dataclass
class ComparisonReport:
    left: str
    right: str
    isometric: bool
    charpoly_equal: bool
    charpoly_differs_at: int | None
    magnitude_equal: bool
    magnitude_samples: list = field(default_factory=list)
    formal_magnitude_equal: bool = True
    alpha_equal: bool = True
    beta_equal: bool | None = True
    adjacency_equal: bool | None = None

    def to_json(self) -> dict:
        return asdict(self)

    def render(self) -> str:
        lines = [f"compare {self.left} vs {self.right}"]
        for key, value in asdict(self).items():
            if key in ("left", "right"):
                continue
            if key == "magnitude_samples":
                for t, a, b in value:
                    lines.append(f"  |{t}X| = {a}  |{t}Y| = {b}")
                continue
            lines.append(f"  {key}: {value}")
        return "\n".join(lines)


def _magnitude_or_none(X, t, digits):
    try:
        return magnitude(X, t, digits)
    except SingularSimilarityMatrix:
        return None


def compare(
    X: FiniteMetricSpace,
    Y: FiniteMetricSpace,
    config: CompareConfig = CompareConfig(),
    names: tuple[str, str] = ("X", "Y"),
    graphs: tuple[Graph, Graph] | None = None,
) -> ComparisonReport:
    """Run every invariant on both spaces; deterministic for a fixed config."""
    px, py = charpoly(X), charpoly(Y)
    differs = px.first_difference(py)
    tol = mpmath.mpf(config.magnitude_tol)
    samples, mag_equal = [], True
    for t in config.t_samples:
        a = _magnitude_or_none(X, t, config.digits)
        b = _magnitude_or_none(Y, t, config.digits)
        if a is None or b is None:
            ok = a is None and b is None
        else:
            ok = abs(a - b) <= tol
        mag_equal = mag_equal and ok
        samples.append((str(t), _fmt(a), _fmt(b)))
    same_size = X.n == Y.n
    stol = mpmath.mpf(config.stochastic_tol)

    def stochastic_equal(variant):
        if not same_size:
            return False
        if variant == "beta" and X.n < 2:
            return None
        return all(
            stochastic_charpoly(X, variant, q, config.digits).agrees(
                stochastic_charpoly(Y, variant, q, config.digits), stol)
            for q in config.q_samples
        )

    adjacency = None
    if graphs is not None:
        adjacency = adjacency_charpoly(*graphs[0]) == adjacency_charpoly(*graphs[1])
    return ComparisonReport(
        left=names[0],
        right=names[1],
        isometric=is_isometric(X, Y) is not None,
        charpoly_equal=differs is None,
        charpoly_differs_at=differs,
        magnitude_equal=mag_equal,
        magnitude_samples=samples,
        formal_magnitude_equal=formal_magnitude(X, config.formal_cutoff) == formal_magnitude(Y, config.formal_cutoff),
        alpha_equal=stochastic_equal("alpha"),
        beta_equal=stochastic_equal("beta"),
        adjacency_equal=adjacency,
    )


def _fmt(x) -> str | None:
    return None if x is None else mpmath.nstr(x, 30)


def compare_all(spaces: dict[str, FiniteMetricSpace], config: CompareConfig = CompareConfig(),
                workers: int = 1) -> list[ComparisonReport]:
    """Compare every unordered pair; output order follows sorted names."""
    names = sorted(spaces)
    pairs = list(combinations(names, 2))

    def run(pair):
        a, b = pair
        return compare(spaces[a], spaces[b], config, names=(a, b))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(run, pairs))
    return [run(p) for p in pairs]


# --- registry ------------------------------------------------------------------------


def _graph_entry(make):
    return lambda: (graph_to_metric(*make()), make())


CORPUS = {
    "P4": _graph_entry(lambda: path_edges(4)),
    "K1_3": _graph_entry(lambda: star_edges(3)),
    "path3": _graph_entry(lambda: path_edges(3)),
    "path2": _graph_entry(lambda: path_edges(2)),
    "prism": _graph_entry(prism_edges),
    "K3_3": _graph_entry(k33_edges),
    "C6": _graph_entry(lambda: cycle_edges(6)),
    "K4": _graph_entry(lambda: complete_edges(4)),
    "R6": lambda: (regular_ngon(6), None),
    "R9": lambda: (regular_ngon(9), None),
    "R9prime": lambda: (isomer_R9prime(), None),
    "sigma16": lambda: (circle_space(range(1, 17)), None),
    "tetrahedron": lambda: (complete_graph(4), None),
}

PAIRS = {
    "wedge": ("P4", "K1_3"),
    "fibration": ("prism", "K3_3"),
    "isomer9": ("R9", "R9prime"),
}


def corpus_space(name: str) -> tuple[FiniteMetricSpace, Graph | None]:
    try:
        return CORPUS[name]()
    except KeyError:
        raise ValidationError(f"unknown corpus entry {name!r}; try: {', '.join(sorted(CORPUS))}") from None
