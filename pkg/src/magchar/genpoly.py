"""Generalized polynomials in q (real exponents) and polynomials in lambda over them."""

from __future__ import annotations

from fractions import Fraction
from math import comb, gcd
from typing import Iterable, Mapping, Sequence

import mpmath

from .errors import DomainError, NegativeExponent, PrecisionExhausted
from .scalar import GUARD, ExactScalar, SymbolBasis, _frac_str, default_digits

Coeff = int | Fraction


class GenPoly:
    """Finite sum ``sum c_e q^e`` with rational ``c_e`` and exact exponents ``e >= 0``."""

    __slots__ = ("_terms", "_sorted", "_hash")

    def __init__(self, terms: Mapping | Iterable = (), *, check: bool = True):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[ExactScalar, Coeff] = {}
        for e, c in items:
            e = ExactScalar.coerce(e)
            acc[e] = acc.get(e, 0) + c
        self._terms = {e: c for e, c in acc.items() if c != 0}
        if check:
            for e in self._terms:
                if not e.is_zero() and e.sign() < 0:
                    raise NegativeExponent(f"negative exponent {e}")
        self._sorted = None
        self._hash = None

    @classmethod
    def _wrap(cls, terms: dict) -> GenPoly:
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._sorted = None
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, c: Coeff) -> GenPoly:
        return cls._wrap({ExactScalar(): c} if c else {})

    @classmethod
    def monomial(cls, exponent, coeff: Coeff = 1) -> GenPoly:
        return cls({ExactScalar.coerce(exponent): coeff})

    # structure --------------------------------------------------------------

    @property
    def terms(self) -> tuple[tuple[ExactScalar, Coeff], ...]:
        """Terms in increasing exponent order."""
        if self._sorted is None:
            items = list(self._terms.items())
            keyed = sorted(items, key=lambda ec: (ec[0].numeric(), ec[0].sort_key()))
            for (e1, _), (e2, _) in zip(keyed, keyed[1:]):
                if abs(e1.numeric() - e2.numeric()) < GUARD:
                    raise PrecisionExhausted(f"exponents {e1} and {e2} are numerically indistinguishable")
            self._sorted = tuple(keyed)
        return self._sorted

    def as_dict(self) -> dict[ExactScalar, Coeff]:
        return dict(self._terms)

    def coefficient(self, exponent) -> Coeff:
        return self._terms.get(ExactScalar.coerce(exponent), 0)

    def exponents(self) -> list[ExactScalar]:
        return [e for e, _ in self.terms]

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(e.is_zero() for e in self._terms)

    def constant_term(self) -> Coeff:
        return self._terms.get(ExactScalar(), 0)

    def coefficient_sum(self) -> Coeff:
        """Value at q = 1."""
        return sum(self._terms.values(), 0)

    @property
    def basis(self) -> SymbolBasis:
        return SymbolBasis.for_scalars(self._terms)

    # arithmetic ---------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GenPoly.constant(other)
        if not isinstance(other, GenPoly):
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                del out[e]
        return GenPoly._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return GenPoly._wrap({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GenPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return GenPoly()
            return GenPoly._wrap({e: c * other for e, c in self._terms.items()})
        if not isinstance(other, GenPoly):
            return NotImplemented
        out: dict[ExactScalar, Coeff] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = e1 + e2
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    del out[e]
        return GenPoly._wrap(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GenPoly.constant(other)
        if not isinstance(other, GenPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def scale_exponents(self, t) -> GenPoly:
        t = Fraction(t)
        return GenPoly._wrap({e * t: c for e, c in self._terms.items()})

    # evaluation -----------------------------------------------------------------

    def evaluate(self, q0, digits: int | None = None) -> mpmath.mpf:
        """Numeric value at ``0 < q0 <= 1``."""
        digits = digits or default_digits()
        with mpmath.workdps(digits + 10):
            q = _to_mpf(q0)
            if q <= 0 or q > 1:
                raise DomainError(f"q must lie in (0, 1], got {q0}")
            total = mpmath.mpf(0)
            logq = mpmath.log(q)
            for e, c in self._terms.items():
                total += _to_mpf(Fraction(c)) * mpmath.exp(e.numeric(digits) * logq)
            return total

    # rendering ------------------------------------------------------------------

    def render(self) -> str:
        if not self._terms:
            return "0"
        out = ""
        for e, c in self.terms:
            text = _term_str(e, abs(c))
            if not out:
                out = ("-" if c < 0 else "") + text
            else:
                out += (" - " if c < 0 else " + ") + text
        return out

    __str__ = render

    def __repr__(self):
        return f"GenPoly({self.render()!r})"

    def to_json(self) -> list:
        return [[e.to_json(), _frac_str(Fraction(c))] for e, c in self.terms]


def _to_mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, str) and "/" in x:
        f = Fraction(x)
        return mpmath.mpf(f.numerator) / f.denominator
    return mpmath.mpf(x)


def _exp_str(e: ExactScalar) -> str:
    if e.is_rational():
        r = e.rational
        if r == 1:
            return "q"
        if r.denominator == 1:
            return f"q^{r.numerator}"
        return f"q^({r.numerator}/{r.denominator})"
    return f"q^[{e}]"


def _term_str(e: ExactScalar, c: Coeff) -> str:
    if e.is_zero():
        return _frac_str(Fraction(c))
    qs = _exp_str(e)
    if c == 1:
        return qs
    sep = "" if e.is_rational() else "*"
    cs = _frac_str(Fraction(c))
    if "/" in cs and sep == "":
        sep = "*"
    return f"{cs}{sep}{qs}"


def gp_add(f: GenPoly, g: GenPoly) -> GenPoly:
    return f + g


def gp_mul(f: GenPoly, g: GenPoly) -> GenPoly:
    return f * g


def gp_eval(f: GenPoly, q0, digits: int | None = None) -> mpmath.mpf:
    return f.evaluate(q0, digits)


class LambdaPoly:
    """Polynomial in a formal variable with GenPoly coefficients; ``coeffs[k]`` multiplies var^k."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Sequence[GenPoly | Coeff], var: str = "λ"):
        cs = [c if isinstance(c, GenPoly) else GenPoly.constant(c) for c in coeffs]
        while len(cs) > 1 and cs[-1].is_zero():
            cs.pop()
        self.coeffs: tuple[GenPoly, ...] = tuple(cs)
        self.var = var

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> GenPoly:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else GenPoly()

    def __eq__(self, other):
        if not isinstance(other, LambdaPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def first_difference(self, other: LambdaPoly) -> int | None:
        """Highest power whose coefficients differ, or None when equal."""
        for k in range(max(self.degree, other.degree), -1, -1):
            if self[k] != other[k]:
                return k
        return None

    def evaluate(self, q0, lam0, digits: int | None = None) -> mpmath.mpf:
        digits = digits or default_digits()
        with mpmath.workdps(digits + 10):
            lam = _to_mpf(lam0)
            total = mpmath.mpf(0)
            for c in reversed(self.coeffs):
                total = total * lam + c.evaluate(q0, digits)
            return total

    def at_q(self, q0, digits: int | None = None) -> list[mpmath.mpf]:
        """Scalar coefficients (low degree first) after substituting q = q0."""
        return [c.evaluate(q0, digits) for c in self.coeffs]

    def render(self) -> str:
        v = self.var
        out = ""
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c.is_zero():
                continue
            power = "" if k == 0 else (v if k == 1 else f"{v}^{k}")
            if c.is_constant():
                val = c.constant_term()
                neg = val < 0
                mag = abs(val)
                body = _frac_str(Fraction(mag)) if (mag != 1 or k == 0) else ""
                body += power
            else:
                neg = False
                body = f"({c.render()})" + power
            if not out:
                out = ("-" if neg else "") + body
            else:
                out += (" - " if neg else " + ") + body
        return out or "0"

    __str__ = render

    def __repr__(self):
        return f"LambdaPoly({self.render()!r})"

    def to_json(self) -> dict:
        return {"var": self.var, "coeffs": [c.to_json() for c in self.coeffs]}


def _binomial_substitute(p: LambdaPoly, shift: int, var: str) -> LambdaPoly:
    """Return r with r(x) = p(x + shift)."""
    n = p.degree
    out = [GenPoly() for _ in range(n + 1)]
    for k, c in enumerate(p.coeffs):
        if c.is_zero():
            continue
        for j in range(k + 1):
            out[j] = out[j] + c * (comb(k, j) * shift ** (k - j))
    return LambdaPoly(out, var)


def lp_shift(pbar: LambdaPoly) -> LambdaPoly:
    """From a polynomial in mu = lambda - 1 to the polynomial in lambda."""
    return _binomial_substitute(pbar, -1, "λ")


def lp_unshift(p: LambdaPoly) -> LambdaPoly:
    """From lambda to mu = lambda - 1: returns pbar(mu) = p(mu + 1)."""
    return _binomial_substitute(p, 1, "μ")


class ExponentLattice:
    """Packs sums of a fixed set of exact scalars into single Python ints.

    Every scalar in ``generators`` becomes an integer vector over per-coordinate
    common denominators; a vector is stored as a balanced mixed-radix integer,
    so exponent addition is integer addition.  Sums of at most ``max_terms``
    generators (and their negatives) decode correctly.
    """

    def __init__(self, generators: Iterable[ExactScalar], max_terms: int):
        gens = list(generators)
        names = sorted({n for g in gens for n in g.symbol_names()})
        self.names = ("1", *names)
        dens = [1] * len(self.names)
        for g in gens:
            coords = g.coords()
            for i, k in enumerate(self.names):
                c = coords.get(k)
                if c is not None:
                    dens[i] = dens[i] * c.denominator // gcd(dens[i], c.denominator)
        self.dens = dens
        biggest = 1
        for g in gens:
            coords = g.coords()
            for i, k in enumerate(self.names):
                c = coords.get(k)
                if c is not None:
                    biggest = max(biggest, abs(c * dens[i]).numerator)
        half = max_terms * biggest + 1
        self.radix = 2 * half + 1
        self._decoded: dict[int, ExactScalar] = {}
        self._numeric: dict[int, mpmath.mpf] = {}

    def encode(self, x: ExactScalar) -> int:
        coords = x.coords()
        key = 0
        for i in range(len(self.names) - 1, -1, -1):
            c = coords.get(self.names[i], Fraction(0)) * self.dens[i]
            if c.denominator != 1:
                raise ValueError(f"{x} is not on this exponent lattice")
            key = key * self.radix + c.numerator
        return key

    def decode(self, key: int) -> ExactScalar:
        hit = self._decoded.get(key)
        if hit is not None:
            return hit
        r, half = self.radix, self.radix // 2
        k = key
        vals = []
        for _ in self.names:
            d = k % r
            if d > half:
                d -= r
            vals.append(d)
            k = (k - d) // r
        rat = Fraction(vals[0], self.dens[0])
        irr = {n: Fraction(v, self.dens[i + 1]) for i, (n, v) in enumerate(zip(self.names[1:], vals[1:])) if v}
        x = ExactScalar(rat, irr)
        self._decoded[key] = x
        return x

    def numeric(self, key: int) -> mpmath.mpf:
        v = self._numeric.get(key)
        if v is None:
            v = self.decode(key).numeric()
            self._numeric[key] = v
        return v

    def to_genpoly(self, terms: Mapping[int, Coeff]) -> GenPoly:
        return GenPoly._wrap({self.decode(k): c for k, c in terms.items() if c})
