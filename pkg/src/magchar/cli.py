"""Command-line front end.

Exit codes: 0 ok, 2 parse error, 3 validation error, 4 hypothesis violation
(input outside a theorem's assumptions, singular similarity matrix),
5 internal error or theorem violation.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath

from . import corpus
from .errors import MagcharError, ParseError, ValidationError
from .formats import (
    format_edge_list,
    lambdapoly_from_json,
    load_input,
    multiset_from_json,
    parse_edge_list,
    space_to_json,
    tau_from_json,
    tau_to_json,
)
from .invariants import (
    DEFAULT_ORACLE_LIMIT,
    adjacency_charpoly,
    charpoly,
    formal_magnitude,
    magnitude,
    render_int_poly,
    stochastic_charpoly,
    tau,
    tau_oracle,
)
from .metric import is_generic, is_weak3generic
from .reconstruct import (
    extract_S1,
    extract_S3,
    four_point_identify,
    identify_four_point,
    reconstruct_weak3,
    s_opp_from_tau4,
    tau_from_charpoly,
)
from .scalar import DEFAULT_DIGITS, set_default_digits


@dataclass
class RunConfig:
    precision_digits: int = DEFAULT_DIGITS
    oracle_limit: int = DEFAULT_ORACLE_LIMIT
    magnitude_t_samples: list = field(default_factory=lambda: [Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4)])
    formal_cutoff: Fraction = Fraction(20)
    stochastic_q_samples: list = field(default_factory=lambda: [Fraction(1, 3), Fraction(1, 2), Fraction(2, 3),
                                                                 Fraction(3, 5), Fraction(5, 7)])
    allow_nonmetric: bool = False
    output: str = "text"

    def __post_init__(self):
        if self.precision_digits < 30:
            raise ValidationError("precision must be at least 30 digits")
        if self.formal_cutoff <= 0:
            raise ValidationError("formal cutoff must be positive")
        if any(not 0 < q < 1 for q in self.stochastic_q_samples):
            raise ValidationError("q samples must lie in (0, 1)")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str, cfg: RunConfig):
    return load_input(_read(path), allow_nonmetric=cfg.allow_nonmetric)


def _read_json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from None


def _emit(obj) -> None:
    print(json.dumps(obj, ensure_ascii=False))


_LOG_T = re.compile(r"^(?:log|ln)\((\d+(?:/\d+)?)\)(?:/(\d+))?$")


def _scale(text: str):
    """A rational, or ``log(a)`` / ``log(a)/b`` with rational ``a`` (kept as text until evaluated)."""
    text = text.strip()
    if _LOG_T.match(text):
        return text
    return _rational(text)


def _scale_value(t, digits: int):
    if not isinstance(t, str):
        return t
    m = _LOG_T.match(t)
    with mpmath.workdps(digits + 20):
        value = mpmath.log(mpmath.mpf(Fraction(m.group(1)).numerator) / Fraction(m.group(1)).denominator)
        return value / int(m.group(2)) if m.group(2) else value


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


# --- commands ----------------------------------------------------------------


def cmd_charpoly(args, cfg: RunConfig) -> None:
    X, _ = _load(args.input, cfg)
    t = tau(X)
    p = charpoly(X)
    if cfg.output == "json":
        out = {"n": X.n, "charpoly": p.to_json(), "tau": tau_to_json(t)}
        if X.n >= 3:
            try:
                out["S1"] = extract_S1(t[2]).to_json()
                out["S3"] = extract_S3(t[3]).to_json()
            except MagcharError:
                pass
        _emit(out)
        return
    print(f"p(q;λ) = {p}")
    for k, tk in enumerate(t, start=1):
        print(f"tau_{k} = {tk}")


def cmd_tau(args, cfg: RunConfig) -> None:
    X, _ = _load(args.input, cfg)
    t = tau(X)
    if args.oracle:
        for k in range(1, X.n + 1):
            if tau_oracle(X, k, cfg.oracle_limit) != t[k]:
                raise MagcharError(f"tau_{k} disagrees with the cycle oracle")
    if cfg.output == "json":
        _emit({"n": X.n, "tau": tau_to_json(t), "oracle_checked": bool(args.oracle)})
        return
    for k, tk in enumerate(t, start=1):
        print(f"tau_{k} = {tk}")
    if args.oracle:
        print("cycle oracle: agrees")


def _tau_from_obj(obj):
    if "tau" in obj:
        return tau_from_json(obj["tau"], obj.get("n"))
    if "charpoly" in obj:
        return tau_from_charpoly(lambdapoly_from_json(obj["charpoly"]))
    return None


def cmd_reconstruct(args, cfg: RunConfig) -> None:
    obj = _read_json(args.input)
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object with S1/S3, tau or charpoly")
    if "S1" in obj and "S3" in obj:
        S1, S3 = multiset_from_json(obj["S1"]), multiset_from_json(obj["S3"])
    else:
        t = _tau_from_obj(obj)
        if t is None:
            raise ParseError("expected 'S1' and 'S3', 'tau', or 'charpoly'")
        S1, S3 = extract_S1(t[2]), extract_S3(t[3])
    _emit(space_to_json(reconstruct_weak3(S1, S3)))


def cmd_fourpoint(args, cfg: RunConfig) -> None:
    text = _read(args.input)
    obj = None
    if text.lstrip().startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed JSON: {exc}") from None
    if obj is not None and "dist" not in obj:
        if {"S1", "S3", "S_opp"} <= obj.keys():
            Y = four_point_identify(multiset_from_json(obj["S1"]), multiset_from_json(obj["S3"]),
                                    multiset_from_json(obj["S_opp"]))
        else:
            t = _tau_from_obj(obj)
            if t is None:
                raise ParseError("expected a space, S1/S3/S_opp, tau, or charpoly")
            Y = identify_four_point(t)
    else:
        X, _ = load_input(text, cfg.allow_nonmetric)
        if X.n != 4:
            raise ValidationError(f"fourpoint needs a four-point space, got n={X.n}")
        t = tau(X)
        S1 = extract_S1(t[2])
        S_opp = s_opp_from_tau4(t[4], S1.total())
        if cfg.output != "json":
            print(f"S1 = {S1}\nS3 = {extract_S3(t[3])}\nS_opp = {S_opp}", file=sys.stderr)
        Y = identify_four_point(t)
    _emit(space_to_json(Y))


def cmd_magnitude(args, cfg: RunConfig) -> None:
    X, _ = _load(args.input, cfg)
    if args.formal is not None:
        f = formal_magnitude(X, args.formal)
        if cfg.output == "json":
            _emit({"cutoff": str(args.formal), "formal_magnitude": f.to_json()})
        else:
            print(f)
        return
    ts = args.t or cfg.magnitude_t_samples
    digits = cfg.precision_digits
    rows = [(t, magnitude(X, _scale_value(t, digits), digits)) for t in ts]
    if cfg.output == "json":
        _emit({"samples": [{"t": str(t), "magnitude": mpmath.nstr(m, digits)} for t, m in rows]})
    elif cfg.output == "csv":
        print("t,magnitude")
        for t, m in rows:
            print(f"{t},{mpmath.nstr(m, digits)}")
    else:
        for t, m in rows:
            print(f"|{t}X| = {mpmath.nstr(m, digits)}")


def _config_for_compare(cfg: RunConfig) -> corpus.CompareConfig:
    return corpus.CompareConfig(
        digits=cfg.precision_digits,
        t_samples=tuple(cfg.magnitude_t_samples),
        formal_cutoff=cfg.formal_cutoff,
        q_samples=tuple(cfg.stochastic_q_samples),
    )


def cmd_compare(args, cfg: RunConfig) -> None:
    ccfg = _config_for_compare(cfg)
    if args.all:
        folder = Path(args.all)
        if not folder.is_dir():
            raise ParseError(f"{folder} is not a directory")
        spaces = {}
        for path in sorted(folder.iterdir()):
            if path.suffix in (".json", ".txt", ".edges"):
                spaces[path.name], _ = load_input(path.read_text(), cfg.allow_nonmetric)
        reports = corpus.compare_all(spaces, ccfg, workers=args.workers)
    else:
        if len(args.inputs) != 2:
            raise ParseError("compare needs two inputs (or --all DIR)")
        (X, gx), (Y, gy) = (_load(p, cfg) for p in args.inputs)
        graphs = (gx, gy) if gx is not None and gy is not None else None
        reports = [corpus.compare(X, Y, ccfg, names=tuple(args.inputs), graphs=graphs)]
    if cfg.output == "json":
        _emit([r.to_json() for r in reports] if args.all else reports[0].to_json())
    else:
        print("\n".join(r.render() for r in reports))


def cmd_check(args, cfg: RunConfig) -> None:
    X, _ = _load(args.input, cfg)
    result = {}
    if args.generic or not args.weak3:
        result["generic"] = is_generic(X)
    if args.weak3 or not args.generic:
        result["weak3generic"] = is_weak3generic(X)
    if cfg.output == "json":
        _emit(result)
    else:
        for k, v in result.items():
            print(f"{k}: {str(v).lower()}")


def cmd_stochastic(args, cfg: RunConfig) -> None:
    X, _ = _load(args.input, cfg)
    qs = args.q or cfg.stochastic_q_samples
    rows = []
    for q in qs:
        ps = stochastic_charpoly(X, args.variant, q, cfg.precision_digits)
        rows.append((q, ps))
    if cfg.output == "json":
        _emit([{"q": str(q), "exact": ps.exact,
                "coeffs": [str(c) if ps.exact else mpmath.nstr(c, cfg.precision_digits) for c in ps.coeffs]}
               for q, ps in rows])
    else:
        for q, ps in rows:
            print(f"q={q}: {ps.render()}")


def cmd_adjacency(args, cfg: RunConfig) -> None:
    n, edges = parse_edge_list(_read(args.input))
    coeffs = adjacency_charpoly(n, edges)
    if cfg.output == "json":
        _emit({"n": n, "coeffs": coeffs})
    else:
        print(render_int_poly(coeffs))


def cmd_corpus(args, cfg: RunConfig) -> None:
    if args.action == "list":
        for name in sorted(corpus.CORPUS):
            print(name)
        return
    if not args.name:
        raise ParseError("corpus emit needs a name")
    X, graph = corpus.corpus_space(args.name)
    if args.edges:
        if graph is None:
            raise ValidationError(f"{args.name} is not a graph")
        sys.stdout.write(format_edge_list(graph))
    else:
        _emit(space_to_json(X))


# --- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="magchar", description=__doc__.splitlines()[0])
    p.add_argument("--digits", type=int, default=int(os.environ.get("MAGCHAR_DIGITS", DEFAULT_DIGITS)),
                   help="working precision in decimal digits (env MAGCHAR_DIGITS)")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--allow-nonmetric", action="store_true",
                   help="accept symmetric positive matrices that violate the triangle inequality")
    p.add_argument("--formal-cutoff", type=_rational, default=Fraction(20))
    p.add_argument("--oracle-limit", type=int, default=DEFAULT_ORACLE_LIMIT)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("charpoly", help="characteristic polynomial and tau vector")
    s.add_argument("input")
    s.set_defaults(func=cmd_charpoly)

    s = sub.add_parser("tau", help="tau_1..tau_n")
    s.add_argument("input")
    s.add_argument("--oracle", action="store_true", help="cross-check against cycle enumeration")
    s.set_defaults(func=cmd_tau)

    s = sub.add_parser("reconstruct", help="rebuild a weakly 3-generic space from S1/S3")
    s.add_argument("input")
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("fourpoint", help="identify a four-point space from its invariants")
    s.add_argument("input")
    s.set_defaults(func=cmd_fourpoint)

    s = sub.add_parser("magnitude", help="magnitude samples or formal magnitude")
    s.add_argument("input")
    s.add_argument("--t", type=_scale, nargs="+", help="scales: rationals or log(a)/b")
    s.add_argument("--formal", type=_rational, metavar="CUTOFF")
    s.set_defaults(func=cmd_magnitude)

    s = sub.add_parser("compare", help="compare two spaces (or every pair in a directory)")
    s.add_argument("inputs", nargs="*")
    s.add_argument("--all", metavar="DIR")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("check", help="genericity predicates")
    s.add_argument("input")
    s.add_argument("--generic", action="store_true")
    s.add_argument("--weak3", action="store_true")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("stochastic", help="stochastic similarity characteristic polynomials")
    s.add_argument("input")
    s.add_argument("--variant", choices=("alpha", "beta"), default="alpha")
    s.add_argument("--q", type=_rational, nargs="+")
    s.set_defaults(func=cmd_stochastic)

    s = sub.add_parser("adjacency-spectrum", help="adjacency characteristic polynomial of an edge list")
    s.add_argument("input")
    s.set_defaults(func=cmd_adjacency)

    s = sub.add_parser("corpus", help="built-in example spaces")
    s.add_argument("action", choices=("list", "emit"))
    s.add_argument("name", nargs="?")
    s.add_argument("--edges", action="store_true", help="emit an edge list instead of space JSON")
    s.set_defaults(func=cmd_corpus)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(
            precision_digits=args.digits,
            oracle_limit=args.oracle_limit,
            formal_cutoff=args.formal_cutoff,
            allow_nonmetric=args.allow_nonmetric,
            output=args.format,
        )
        set_default_digits(cfg.precision_digits)
        args.func(args, cfg)
    except MagcharError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
