"""Recovering spaces from their characteristic polynomials.

Two inverse problems are handled:

* weakly 3-generic spaces of any size, rebuilt from the edge-length multiset
  S1 and the triangle-perimeter multiset S3 by attaching triangles to a base
  edge one at a time;
* arbitrary four-point spaces, identified from S1, S3 and the multiset of
  opposite-edge sums read off ``tau_4``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product
from math import comb

from .errors import (
    InconsistentData,
    MalformedTau,
    NoRealization,
    NotAMetric,
    NotWeak3Generic,
    TheoremViolation,
    TriangleViolation,
    UnrecognizedPattern,
    ValidationError,
)
from .genpoly import GenPoly, LambdaPoly, lp_unshift
from .invariants import TauVector, tau
from .metric import FiniteMetricSpace, LengthMultiset, is_isometric, make_space, numeric_sorted
from .scalar import ExactScalar


def _positive_int(c) -> int | None:
    c = Fraction(c)
    if c.denominator != 1 or c <= 0:
        return None
    return c.numerator


def extract_S1(tau2: GenPoly) -> LengthMultiset:
    """Edge lengths from ``-tau_2 = sum_{i<j} q^{2 d_ij}``."""
    out = []
    for e, c in (-tau2).as_dict().items():
        m = _positive_int(c)
        if m is None:
            raise MalformedTau(f"-tau_2 has a non-positive-integer coefficient {c} at q^{e}")
        out.extend([e / 2] * m)
    return LengthMultiset.of(out)


def extract_S3(tau3: GenPoly) -> LengthMultiset:
    """Triangle perimeters from ``tau_3 / 2 = sum_{i<j<k} q^{d_ij + d_jk + d_ki}``."""
    out = []
    for e, c in tau3.as_dict().items():
        m = _positive_int(c)
        if m is None or m % 2:
            raise MalformedTau(f"tau_3 coefficient {c} at q^{e} is not an even positive integer")
        out.extend([e] * (m // 2))
    return LengthMultiset.of(out)


def multisets_from_tau(t: TauVector) -> tuple[LengthMultiset, LengthMultiset]:
    return extract_S1(t[2]), extract_S3(t[3])


def tau_from_charpoly(p: LambdaPoly) -> TauVector:
    """Invert ``p(lambda) -> pbar(mu) -> tau``."""
    pbar = lp_unshift(p)
    n = pbar.degree
    if pbar[n] != GenPoly.constant(1):
        raise MalformedTau("characteristic polynomial must be monic")
    vals = tuple(pbar[n - l] if l % 2 == 0 else -pbar[n - l] for l in range(1, n + 1))
    return TauVector(vals, n)


def _point_count(n_pairs: int) -> int | None:
    n = 1
    while comb(n, 2) < n_pairs:
        n += 1
    return n if comb(n, 2) == n_pairs else None


def _key(x: ExactScalar):
    return x.sort_key()


# --- weakly 3-generic reconstruction ------------------------------------------------


def reconstruct_weak3(S1: LengthMultiset, S3: LengthMultiset) -> FiniteMetricSpace:
    """Rebuild a weakly 3-generic space from its edge lengths and triangle perimeters."""
    S1 = S1 if isinstance(S1, LengthMultiset) else LengthMultiset.of(S1)
    S3 = S3 if isinstance(S3, LengthMultiset) else LengthMultiset.of(S3)
    n = _point_count(len(S1))
    if n is None or n < 3:
        raise InconsistentData(f"|S1| = {len(S1)} is not C(n, 2) for any n >= 3")
    if len(S3) != comb(n, 3):
        raise InconsistentData(f"|S3| = {len(S3)} but C({n}, 3) = {comb(n, 3)}")
    edges = S1.values()
    if len(set(edges)) != len(edges):
        raise NotWeak3Generic("edge lengths are not mutually distinct: not weakly 3-generic")
    triple_of: dict[ExactScalar, frozenset] = {}
    for tri in combinations(edges, 3):
        s = tri[0] + tri[1] + tri[2]
        if s in triple_of:
            raise NotWeak3Generic(
                f"two edge triples share the sum {s}: not weakly 3-generic"
            )
        triple_of[s] = frozenset(tri)
    perimeters = S3.values()
    if len(set(perimeters)) != len(perimeters):
        raise InconsistentData("repeated perimeter in S3 for distinct edge lengths")
    triangles = set()
    for t in perimeters:
        tri = triple_of.get(t)
        if tri is None:
            raise InconsistentData(f"perimeter {t} is not a sum of three edge lengths")
        triangles.add(tri)

    # third sides of every triangle through a pair of edges
    third: dict[frozenset, list[ExactScalar]] = {}
    for tri in triangles:
        for x, y in combinations(tri, 2):
            (u,) = tri - {x, y}
            third.setdefault(frozenset((x, y)), []).append(u)

    def closes(x, y) -> bool:
        return frozenset((x, y)) in third

    t1 = numeric_sorted(perimeters)[0]
    a, b, c = numeric_sorted(triple_of[t1])
    # base edge BC = a, AB = c, AC = b
    attached = [tri for tri in triangles if a in tri and tri != triple_of[t1]]
    if len(attached) != n - 3:
        raise InconsistentData(
            f"edge {a} lies on {len(attached) + 1} triangles, expected {n - 2}"
        )
    attached.sort(key=lambda tri: [_key(x) for x in numeric_sorted(tri)])

    # each new vertex A_i: which of its two sides meets B
    options = []
    for tri in attached:
        p, q = numeric_sorted(tri - {a})
        p_at_B, q_at_B = closes(p, c), closes(q, c)
        if p_at_B != q_at_B:
            options.append([(p, q)] if p_at_B else [(q, p)])
        else:
            options.append([(p, q), (q, p)])

    survivors = []
    for choice in product(*options):
        to_B = [None, a, c] + [pb for pb, _ in choice]
        to_C = [a, None, b] + [pc for _, pc in choice]
        try:
            Y = _assemble(n, to_B, to_C, third)
        except InconsistentData:
            continue
        if _reproduces(Y, S1, S3):
            survivors.append(Y)
    if not survivors:
        raise InconsistentData("no consistent assembly reproduces S1 and S3")
    for other in survivors[1:]:
        if is_isometric(survivors[0], other) is None:
            raise TheoremViolation("two non-isometric spaces share S1 and S3 under weak 3-genericity")
    return survivors[0]


def _assemble(n, to_B, to_C, third) -> FiniteMetricSpace:
    B, C = 0, 1
    D = [[ExactScalar() for _ in range(n)] for _ in range(n)]
    for v in range(n):
        if v != B:
            D[B][v] = D[v][B] = to_B[v]
        if v != C and v != B:
            D[C][v] = D[v][C] = to_C[v]
    for v, w in combinations(range(2, n), 2):
        cands = third.get(frozenset((to_B[v], to_B[w])), [])
        if len(cands) != 1:
            raise InconsistentData(f"no unique side for points {v}, {w}")
        D[v][w] = D[w][v] = cands[0]
    try:
        return make_space(D)
    except TriangleViolation as exc:
        raise NotAMetric(str(exc)) from exc
    except ValidationError as exc:
        raise InconsistentData(str(exc)) from exc


def _reproduces(Y: FiniteMetricSpace, S1: LengthMultiset, S3: LengthMultiset) -> bool:
    t = tau(Y, upto=3)
    return extract_S1(t[2]) == S1 and extract_S3(t[3]) == S3


def reconstruct_from_tau(t: TauVector) -> FiniteMetricSpace:
    S1, S3 = multisets_from_tau(t)
    return reconstruct_weak3(S1, S3)


# --- four-point spaces -------------------------------------------------------------------


def s_opp_from_tau4(tau4: GenPoly, s) -> LengthMultiset:
    """Opposite-edge sums ``[alpha, beta, gamma]`` from the shape of ``tau_4``.

    ``tau_4 = -2q^{a+b} - 2q^{b+g} - 2q^{a+g} + q^{2a} + q^{2b} + q^{2g}``
    before cancellation; the surviving coefficient pattern fixes the case.
    """
    s = ExactScalar.coerce(s)
    terms = tau4.as_dict()
    neg = sorted(Fraction(c) for c in terms.values() if c < 0)
    pos = numeric_sorted(e for e, c in terms.items() if c > 0)
    pos_coeffs = sorted(Fraction(c) for c in terms.values() if c > 0)
    if neg == [-2, -2, -2] and pos_coeffs == [1, 1, 1]:
        return LengthMultiset.of(e / 2 for e in pos)
    if neg == [-2, -2, -1] and pos_coeffs == [1, 1]:
        b1, b2 = pos
        return LengthMultiset.of([b1 / 2, b2 / 2, s - (b1 + b2) / 2])
    if neg == [-4] and pos_coeffs == [1]:
        (bb,) = pos
        rest = (s - bb / 2) / 2
        return LengthMultiset.of([bb / 2, rest, rest])
    if neg == [-3] and not pos_coeffs:
        (aa,) = [e for e in terms]
        return LengthMultiset.of([aa / 2] * 3)
    raise UnrecognizedPattern(f"tau_4 = {tau4} matches none of the four-point shapes")


_OPPOSITE = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))
_TRIANGLES = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))


@dataclass(frozen=True)
class Dcos:
    """Three opposite-edge pairs partitioning S1, with pair sums S_opp."""

    pairs: tuple[tuple[ExactScalar, ExactScalar], ...]

    def sums(self) -> LengthMultiset:
        return LengthMultiset.of(x + y for x, y in self.pairs)


def enumerate_dcos(S1: LengthMultiset, S_opp: LengthMultiset) -> list[Dcos]:
    edges = S1.values()
    target = S_opp.counter()
    seen = set()
    out = []
    for matching in _perfect_matchings(list(range(len(edges)))):
        pairs = tuple(sorted(
            (tuple(sorted((edges[i], edges[j]), key=_key)) for i, j in matching),
            key=lambda pr: (_key(pr[0]), _key(pr[1])),
        ))
        if pairs in seen:
            continue
        seen.add(pairs)
        if Counter(x + y for x, y in pairs) == target:
            out.append(Dcos(pairs))
    return out


def _perfect_matchings(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for k, partner in enumerate(rest):
        for m in _perfect_matchings(rest[:k] + rest[k + 1:]):
            yield [(first, partner)] + m


def _realizations(dcos: Dcos):
    """All tetrahedron labelings that put each dcos pair on opposite edges."""
    for order in permutations(dcos.pairs):
        for flips in product((False, True), repeat=3):
            D = [[ExactScalar() for _ in range(4)] for _ in range(4)]
            for (e1, e2), (x, y), flip in zip(_OPPOSITE, order, flips):
                if flip:
                    x, y = y, x
                D[e1[0]][e1[1]] = D[e1[1]][e1[0]] = x
                D[e2[0]][e2[1]] = D[e2[1]][e2[0]] = y
            yield D


def four_point_identify(S1: LengthMultiset, S3: LengthMultiset, S_opp: LengthMultiset) -> FiniteMetricSpace:
    """The unique (up to isometry) four-point space with the given invariants."""
    S1 = S1 if isinstance(S1, LengthMultiset) else LengthMultiset.of(S1)
    S3 = S3 if isinstance(S3, LengthMultiset) else LengthMultiset.of(S3)
    S_opp = S_opp if isinstance(S_opp, LengthMultiset) else LengthMultiset.of(S_opp)
    if (len(S1), len(S3), len(S_opp)) != (6, 4, 3):
        raise InconsistentData("four-point data needs |S1| = 6, |S3| = 4, |S_opp| = 3")
    if S1.total() != S_opp.total():
        raise InconsistentData("opposite-edge sums must add up to the total edge length")
    target = S3.counter()
    found: dict[tuple, FiniteMetricSpace] = {}
    for dcos in enumerate_dcos(S1, S_opp):
        for D in _realizations(dcos):
            if Counter(D[i][j] + D[j][k] + D[i][k] for i, j, k in _TRIANGLES) != target:
                continue
            try:
                X = make_space(D)
            except ValidationError:
                continue
            found.setdefault(tuple(_key(D[i][j]) for i, j in combinations(range(4), 2)), X)
    if not found:
        raise NoRealization("no tetrahedron realizes S1, S3 and S_opp")
    keys = sorted(found)
    first = found[keys[0]]
    for k in keys[1:]:
        if is_isometric(first, found[k]) is None:
            raise TheoremViolation(
                "non-isometric four-point spaces share S1, S3 and S_opp: "
                f"{first!r} vs {found[k]!r}"
            )
    return first


def identify_four_point(t: TauVector) -> FiniteMetricSpace:
    """Four-point space from its tau vector (equivalently its characteristic polynomial)."""
    if t.n != 4 or len(t) < 4:
        raise InconsistentData("need tau_1..tau_4 of a four-point space")
    S1, S3 = multisets_from_tau(t)
    S_opp = s_opp_from_tau4(t[4], S1.total())
    return four_point_identify(S1, S3, S_opp)
