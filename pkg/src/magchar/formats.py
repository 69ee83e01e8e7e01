"""Space JSON, graph edge lists, and JSON encodings of polynomials and multisets.

Space JSON::

    {"basis": [{"name": "sqrt3", "value": "1.7320508075688772935..."}],
     "n": 3,
     "dist": [[[["1", "0"]], [["1", "1"]], ...], ...]}

Each distance is a list of ``[symbol, rational]`` pairs with the rational part
under ``"1"``; plain numbers and scalar strings (``"2+1*sqrt3"``) are accepted
as well.  Edge lists are ``n m`` followed by ``m`` lines ``u v`` (0-indexed).
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import ParseError
from .genpoly import GenPoly, LambdaPoly
from .invariants import TauVector
from .metric import FiniteMetricSpace, LengthMultiset, graph_to_metric, make_space
from .scalar import SymbolBasis, scalar_from_json


def space_to_json(X: FiniteMetricSpace) -> dict:
    return {
        "basis": X.basis.to_json(),
        "n": X.n,
        "dist": [[d.to_json() for d in row] for row in X.dist],
    }


def space_from_json(obj, allow_nonmetric: bool = False) -> FiniteMetricSpace:
    if not isinstance(obj, dict) or "dist" not in obj:
        raise ParseError("space JSON needs a 'dist' field")
    basis = _basis_from_json(obj.get("basis", []))
    dist = obj["dist"]
    if not isinstance(dist, list) or not all(isinstance(r, list) for r in dist):
        raise ParseError("'dist' must be a list of rows")
    if "n" in obj and obj["n"] != len(dist):
        raise ParseError(f"'n' is {obj['n']} but 'dist' has {len(dist)} rows")
    matrix = [[scalar_from_json(x) for x in row] for row in dist]
    X = make_space(matrix, allow_nonmetric=allow_nonmetric)
    return FiniteMetricSpace(X.dist, basis.merge(X.basis), X.metric)


def _basis_from_json(items) -> SymbolBasis:
    if not isinstance(items, list):
        raise ParseError("'basis' must be a list")
    pairs = []
    for item in items:
        if not isinstance(item, dict) or "name" not in item or "value" not in item:
            raise ParseError("basis entries need 'name' and 'value'")
        pairs.append((str(item["name"]), str(item["value"])))
    return SymbolBasis(tuple(pairs))


def parse_edge_list(text: str) -> tuple[int, list[tuple[int, int]]]:
    lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ParseError("empty edge list")
    try:
        n, m = (int(x) for x in lines[0].split())
        edges = []
        for ln in lines[1:]:
            u, v = (int(x) for x in ln.split())
            edges.append((u, v))
    except ValueError:
        raise ParseError("edge list must be 'n m' followed by 'u v' lines") from None
    if len(edges) != m:
        raise ParseError(f"edge list declares {m} edges but has {len(edges)}")
    return n, edges


def format_edge_list(graph) -> str:
    n, edges = graph
    return "\n".join([f"{n} {len(edges)}", *(f"{u} {v}" for u, v in edges)]) + "\n"


def load_input(text: str, allow_nonmetric: bool = False):
    """Parse a space JSON or edge list; returns ``(space, graph_or_None)``."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed JSON: {exc}") from None
        return space_from_json(obj, allow_nonmetric), None
    graph = parse_edge_list(text)
    return graph_to_metric(*graph), graph


def genpoly_from_json(obj) -> GenPoly:
    if not isinstance(obj, list):
        raise ParseError("polynomial JSON must be a list of [exponent, coefficient] terms")
    terms = []
    for term in obj:
        if not (isinstance(term, list) and len(term) == 2):
            raise ParseError(f"bad polynomial term {term!r}")
        e, c = term
        try:
            terms.append((scalar_from_json(e), Fraction(str(c))))
        except ValueError:
            raise ParseError(f"bad coefficient {c!r}") from None
    return GenPoly(terms)


def lambdapoly_from_json(obj) -> LambdaPoly:
    if not isinstance(obj, dict) or "coeffs" not in obj:
        raise ParseError("lambda-polynomial JSON needs 'coeffs'")
    return LambdaPoly([genpoly_from_json(c) for c in obj["coeffs"]], obj.get("var", "λ"))


def tau_to_json(t: TauVector) -> list:
    return [p.to_json() for p in t]


def tau_from_json(obj, n: int | None = None) -> TauVector:
    vals = tuple(genpoly_from_json(p) for p in obj)
    return TauVector(vals, n if n is not None else len(vals))


def multiset_from_json(obj) -> LengthMultiset:
    if not isinstance(obj, list):
        raise ParseError("a length multiset must be a JSON list")
    return LengthMultiset.of(scalar_from_json(x) for x in obj)
