import json
import random

import pytest

from magchar.errors import ParseError
from magchar.formats import (
    format_edge_list,
    genpoly_from_json,
    lambdapoly_from_json,
    load_input,
    multiset_from_json,
    parse_edge_list,
    space_from_json,
    space_to_json,
    tau_from_json,
    tau_to_json,
)
from magchar.corpus import regular_ngon
from magchar.invariants import charpoly, tau
from magchar.metric import LengthMultiset

from conftest import random_rational_space


def test_space_json_round_trip():
    for X in (regular_ngon(5), regular_ngon(6), random_rational_space(random.Random(3), 4)):
        text = json.dumps(space_to_json(X))
        assert space_from_json(json.loads(text)) == X


def test_plain_decimal_matrix():
    X = space_from_json({"dist": [[0, 1.5], [1.5, 0]]})
    assert str(X.d(0, 1)) == "3/2"


def test_space_json_errors():
    with pytest.raises(ParseError):
        space_from_json({"n": 2})
    with pytest.raises(ParseError):
        space_from_json({"n": 3, "dist": [[0, 1], [1, 0]]})
    with pytest.raises(ParseError):
        load_input("{not json")


def test_declared_basis_is_used():
    value = "1.41421356237309504880168872420969807856967187537694807317667973799"
    X = space_from_json({"basis": [{"name": "r", "value": value}],
                         "dist": [[0, [["r", "1"]]], [[["r", "1"]], 0]]})
    assert X.basis.names == ("r",)


def test_edge_lists():
    n, edges = parse_edge_list("4 3\n0 1\n1 2 # comment\n2 3\n")
    assert (n, edges) == (4, [(0, 1), (1, 2), (2, 3)])
    assert parse_edge_list(format_edge_list((n, edges))) == (n, edges)
    with pytest.raises(ParseError):
        parse_edge_list("3 2\n0 1\n")
    with pytest.raises(ParseError):
        parse_edge_list("three\n")


def test_polynomial_json_round_trip():
    X = regular_ngon(5)
    p = charpoly(X)
    assert lambdapoly_from_json(json.loads(json.dumps(p.to_json()))) == p
    t = tau(X)
    assert tuple(tau_from_json(tau_to_json(t))) == tuple(t)
    assert genpoly_from_json(t[2].to_json()) == t[2]


def test_multiset_json():
    m = multiset_from_json([1, "3/2", 1])
    assert m == LengthMultiset.of([1, 1, "3/2"])
    assert multiset_from_json(m.to_json()) == m
