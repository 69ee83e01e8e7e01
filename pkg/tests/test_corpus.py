from fractions import Fraction

import mpmath
import pytest

from magchar.corpus import (
    CORPUS,
    CompareConfig,
    compare,
    compare_all,
    complete_graph,
    corpus_space,
    cospectral_pair,
    cycle_graph,
    circle_space,
    isomer_R9prime,
    path_graph,
    prism_and_k33,
    regular_ngon,
    star_graph,
    wedge_sum,
    whitney_twist,
)
from magchar.errors import DuplicatePosition, IndexOutOfRange, InvalidGluing, ValidationError
from magchar.invariants import adjacency_charpoly, charpoly, magnitude, tau
from magchar.metric import LengthMultiset, graph_to_metric, is_isometric
from magchar.reconstruct import extract_S3
from magchar.scalar import ExactScalar, ngon_chord, sqrt

FAST = CompareConfig(t_samples=(Fraction(1, 2), 1, 2), formal_cutoff=Fraction(8))


def test_wedge_examples():
    e = path_graph(2)
    w = wedge_sum(e, e, 1, 0)
    assert is_isometric(w, path_graph(3)) is not None
    assert is_isometric(wedge_sum(path_graph(3), e, 2, 0), path_graph(4)) is not None
    assert is_isometric(wedge_sum(path_graph(3), e, 1, 0), star_graph(3)) is not None
    with pytest.raises(IndexOutOfRange):
        wedge_sum(e, e, 2, 0)


def test_wedge_magnitude_additivity():
    X, Y = path_graph(3), regular_ngon(5)
    W = wedge_sum(X, Y, 0, 2)
    with mpmath.workdps(60):
        assert abs(magnitude(W, 1) - magnitude(X, 1) - magnitude(Y, 1) + 1) < mpmath.mpf(10) ** -40


def _tri():
    return 3, [(0, 1), (1, 2), (0, 2)]


def test_whitney_trivial_on_symmetric_input():
    a, b = whitney_twist(_tri(), _tri(), 0, 1, 0, 1)
    assert a[0] == b[0] == 4 and len(a[1]) == len(b[1]) == 5
    assert is_isometric(graph_to_metric(*a), graph_to_metric(*b)) is not None
    with pytest.raises(InvalidGluing):
        whitney_twist(_tri(), _tri(), 0, 0, 0, 1)
    with pytest.raises(InvalidGluing):
        whitney_twist(_tri(), _tri(), 0, 5, 0, 1)


def test_whitney_adjacent_gluing_preserves_magnitude():
    G = (5, [(0, 1), (1, 2), (2, 3), (3, 4), (1, 3)])  # adjacent pair (0, 1)
    H = (4, [(0, 1), (1, 2), (2, 3), (0, 2)])
    a, b = whitney_twist(G, H, 0, 1, 0, 3)
    X, Y = graph_to_metric(*a), graph_to_metric(*b)
    r = compare(X, Y, FAST)
    assert r.magnitude_equal


def test_whitney_non_adjacent_asymmetric():
    G = (5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    H = (4, [(0, 1), (1, 2), (2, 3), (0, 2)])
    a, b = whitney_twist(G, H, 0, 2, 0, 3)
    r = compare(graph_to_metric(*a), graph_to_metric(*b), FAST)
    assert not r.charpoly_equal


def test_regular_polygons():
    tri = regular_ngon(3)
    assert set(tri.edge_lengths()) == {1}
    sq = regular_ngon(4)
    assert LengthMultiset.of(sq.edge_lengths()).counter() == {ExactScalar(1): 4, sqrt(2): 2}
    hexa = regular_ngon(6)
    assert set(hexa.edge_lengths()) == {ExactScalar(1), sqrt(3), ExactScalar(2)}
    with pytest.raises(ValidationError):
        regular_ngon(2)


def test_isomer_R9prime():
    R9, R9p = regular_ngon(9), isomer_R9prime()
    assert R9p.d(0, 3) == ngon_chord(9, 4)
    assert R9p.d(0, 4) == ngon_chord(9, 3)
    assert LengthMultiset.of(R9.edge_lengths()) == LengthMultiset.of(R9p.edge_lengths())
    assert extract_S3(tau(R9, upto=3)[3]).max() == ngon_chord(9, 3) * 3
    assert extract_S3(tau(R9p, upto=3)[3]).max() == ngon_chord(9, 4) * 3


def test_graph_families():
    assert LengthMultiset.of(cycle_graph(6).edge_lengths()).counter() == {1: 6, 2: 6, 3: 3}
    assert set(complete_graph(5).edge_lengths()) == {1}
    assert path_graph(2).edge_lengths() == [1]
    with pytest.raises(ValidationError):
        cycle_graph(2)


def test_prism_and_k33():
    prism, k33 = prism_and_k33()
    for X in (prism, k33):
        assert LengthMultiset.of(X.edge_lengths()).counter() == {1: 9, 2: 6}
    assert tau(prism)[2] == tau(k33)[2]
    assert extract_S3(tau(prism)[3]).max() == 5
    assert extract_S3(tau(k33)[3]).max() == 6


def test_circle_space():
    sigma = circle_space(range(1, 17))
    assert LengthMultiset.of(sigma.edge_lengths()).counter() == {**{k: 16 for k in range(1, 8)}, 8: 8}
    assert circle_space([3, 11]).d(0, 1) == 8
    assert sorted(circle_space([1, 2, 3]).edge_lengths()) == [1, 1, 2]
    with pytest.raises(DuplicatePosition):
        circle_space([1, 1])
    with pytest.raises(ValidationError):
        circle_space([0, 17])


def test_compare_self_and_symmetry():
    X, _ = corpus_space("P4")
    r = compare(X, X, FAST)
    assert r.isometric and r.charpoly_equal and r.magnitude_equal and r.formal_magnitude_equal
    assert r.alpha_equal and r.beta_equal
    Y, _ = corpus_space("K1_3")
    a, b = compare(X, Y, FAST).to_json(), compare(Y, X, FAST).to_json()
    for key in ("isometric", "charpoly_equal", "charpoly_differs_at", "magnitude_equal",
                "formal_magnitude_equal", "alpha_equal", "beta_equal"):
        assert a[key] == b[key]


@pytest.mark.parametrize("left,right", [("P4", "K1_3"), ("prism", "K3_3"), ("R9", "R9prime")])
def test_same_magnitude_pairs(left, right):
    (X, gx), (Y, gy) = corpus_space(left), corpus_space(right)
    r = compare(X, Y, FAST, names=(left, right))
    assert r.magnitude_equal and not r.isometric and not r.charpoly_equal


def test_p4_star_differs_at_lambda2():
    assert compare(path_graph(4), star_graph(3), FAST).charpoly_differs_at == 2


def test_cospectral_pair():
    g, h = cospectral_pair()
    assert adjacency_charpoly(*g) == adjacency_charpoly(*h)


def test_compare_all_order_and_workers():
    spaces = {name: corpus_space(name)[0] for name in ("P4", "K1_3", "path3")}
    seq = compare_all(spaces, FAST)
    par = compare_all(spaces, FAST, workers=3)
    assert [(r.left, r.right) for r in seq] == [("K1_3", "P4"), ("K1_3", "path3"), ("P4", "path3")]
    assert [r.to_json() for r in seq] == [r.to_json() for r in par]


def test_corpus_entries_validate():
    for name in CORPUS:
        X, graph = corpus_space(name)
        assert X.metric
        if graph is not None:
            assert graph_to_metric(*graph) == X
    with pytest.raises(ValidationError):
        corpus_space("nope")
