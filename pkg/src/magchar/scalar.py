"""Exact real scalars as rational combinations of declared irrational symbols.

A scalar is stored as ``r + c_1*s_1 + ... + c_k*s_k`` with rational ``r`` and
``c_i``.  Equality is exact (coordinate match).  Ordering falls back to
numeric evaluation at a working precision, and refuses to decide when two
exactly-distinct values land within ``GUARD`` of each other.

Symbols live in a process-wide, append-only registry so that any two scalars
can be compared without threading a basis object through every call.  The
exact model is only sound when the declared symbols together with 1 are
linearly independent over the rationals.
"""

from __future__ import annotations

import os
import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping

import mpmath

from .errors import BasisMismatch, ParseError, PrecisionExhausted, ValidationError

MIN_DECLARED_DIGITS = 50
DEFAULT_DIGITS = int(os.environ.get("MAGCHAR_DIGITS", "50"))
_working = {"digits": DEFAULT_DIGITS}


def default_digits() -> int:
    return _working["digits"]


def set_default_digits(digits: int) -> None:
    if digits < 30:
        raise ValidationError("working precision must be at least 30 digits")
    _working["digits"] = digits
GUARD = mpmath.mpf("1e-40")

RationalLike = int | Fraction


@dataclass
class _Entry:
    value: str
    generator: Callable[[int], mpmath.mpf] | None = None


_REGISTRY: dict[str, _Entry] = {}
_LOCK = threading.Lock()


def significant_digits(text: str) -> int:
    mantissa = re.split(r"[eE]", text.strip())[0].lstrip("+-").replace(".", "")
    return len(mantissa.lstrip("0"))


def _values_agree(a: str, b: str) -> bool:
    digits = min(significant_digits(a), significant_digits(b)) - 2
    with mpmath.workdps(max(digits, 15)):
        x, y = mpmath.mpf(a), mpmath.mpf(b)
        return abs(x - y) <= abs(x) * mpmath.mpf(10) ** (-digits)


def declare_symbol(name: str, value: str, generator=None) -> None:
    """Register an irrational symbol; re-declaring with the same value is a no-op."""
    if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_^]*", name) or name == "q":
        raise ValidationError(f"invalid symbol name {name!r}")
    with _LOCK:
        old = _REGISTRY.get(name)
        if old is not None:
            if not _values_agree(old.value, value):
                raise BasisMismatch(f"symbol {name!r} already declared with a different value")
            return
        if generator is None and significant_digits(value) < MIN_DECLARED_DIGITS:
            raise ValidationError(
                f"symbol {name!r} needs at least {MIN_DECLARED_DIGITS} significant digits"
            )
        with mpmath.workdps(30):
            v = mpmath.mpf(value)
        if not mpmath.isfinite(v) or v <= 0:
            raise ValidationError(f"symbol {name!r} must have a positive finite value")
        _REGISTRY[name] = _Entry(value, generator)


_VALUE_CACHE: dict[tuple[str, int], mpmath.mpf] = {}


def symbol_value(name: str, digits: int) -> mpmath.mpf:
    key = (name, digits)
    v = _VALUE_CACHE.get(key)
    if v is not None:
        return v
    try:
        entry = _REGISTRY[name]
    except KeyError:
        raise BasisMismatch(f"undeclared symbol {name!r}") from None
    with mpmath.workdps(digits):
        v = entry.generator(digits) if entry.generator is not None else mpmath.mpf(entry.value)
    _VALUE_CACHE[key] = v
    return v


def is_declared(name: str) -> bool:
    return name in _REGISTRY


class ExactScalar:
    """Immutable ``rational + sum(coeff * symbol)``."""

    __slots__ = ("_rat", "_irr", "_hash", "_num")

    def __init__(self, rational: RationalLike | str = 0, symbols: Mapping[str, RationalLike] | None = None):
        self._rat = Fraction(rational)
        if symbols:
            self._irr = tuple(sorted((k, Fraction(v)) for k, v in symbols.items() if v != 0))
        else:
            self._irr = ()
        self._hash = None
        self._num = None

    @classmethod
    def _raw(cls, rat: Fraction, irr: tuple) -> ExactScalar:
        obj = cls.__new__(cls)
        obj._rat = rat
        obj._irr = irr
        obj._hash = None
        obj._num = None
        return obj

    @classmethod
    def coerce(cls, x) -> ExactScalar:
        if isinstance(x, ExactScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return cls._raw(Fraction(x), ())
        if isinstance(x, str):
            return parse_scalar(x)
        if isinstance(x, float):
            return cls._raw(Fraction(str(x)), ())
        raise TypeError(f"cannot interpret {x!r} as an exact scalar")

    @property
    def rational(self) -> Fraction:
        return self._rat

    @property
    def symbols(self) -> dict[str, Fraction]:
        return dict(self._irr)

    def is_rational(self) -> bool:
        return not self._irr

    def is_zero(self) -> bool:
        return not self._irr and self._rat == 0

    def coords(self) -> dict[str, Fraction]:
        """Coordinates keyed by symbol name, rational part under ``"1"``."""
        out = {"1": self._rat} if self._rat else {}
        out.update(self._irr)
        return out

    def symbol_names(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self._irr)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, ExactScalar):
            if isinstance(other, (int, Fraction)):
                return ExactScalar._raw(self._rat + other, self._irr)
            return NotImplemented
        if not other._irr:
            return ExactScalar._raw(self._rat + other._rat, self._irr)
        if not self._irr:
            return ExactScalar._raw(self._rat + other._rat, other._irr)
        merged = dict(self._irr)
        for k, v in other._irr:
            s = merged.get(k, 0) + v
            if s:
                merged[k] = s
            else:
                merged.pop(k, None)
        return ExactScalar._raw(self._rat + other._rat, tuple(sorted(merged.items())))

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar._raw(-self._rat, tuple((k, -v) for k, v in self._irr))

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExactScalar._raw(Fraction(other), ())
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k):
        if isinstance(k, ExactScalar):
            if k._irr and self._irr:
                raise TypeError("product of two irrational scalars is not representable")
            if not k._irr:
                k = k._rat
            else:
                return k * self._rat
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        if k == 0:
            return ZERO
        return ExactScalar._raw(self._rat * k, tuple((n, v * k) for n, v in self._irr))

    __rmul__ = __mul__

    def __truediv__(self, k):
        if isinstance(k, ExactScalar) and not k._irr:
            k = k._rat
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        return self * (Fraction(1) / Fraction(k))

    # comparison -----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return not self._irr and self._rat == other
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return self._rat == other._rat and self._irr == other._irr

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self._rat) if not self._irr else hash((self._rat, self._irr))
            self._hash = h
        return h

    def numeric(self, digits: int | None = None) -> mpmath.mpf:
        digits = digits or _working["digits"]
        cached = self._num
        if cached is not None and cached[0] == digits:
            return cached[1]
        with mpmath.workdps(digits + 10):
            v = mpmath.mpf(self._rat.numerator) / self._rat.denominator
            for name, c in self._irr:
                v += symbol_value(name, digits + 10) * c.numerator / c.denominator
        self._num = (digits, v)
        return v

    def sign(self, digits: int | None = None) -> int:
        if not self._irr:
            return (self._rat > 0) - (self._rat < 0)
        v = self.numeric(digits)
        if abs(v) < GUARD:
            raise PrecisionExhausted(f"cannot decide the sign of {self} (|value| < 1e-40)")
        return 1 if v > 0 else -1

    def compare(self, other, digits: int | None = None) -> int:
        return (self - ExactScalar.coerce(other)).sign(digits)

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self == other or self.compare(other) < 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self == other or self.compare(other) > 0

    def sort_key(self):
        """Exact, numerically meaningless total order (for canonical layouts)."""
        return (self._rat, self._irr)

    # rendering ------------------------------------------------------------

    def __str__(self):
        if not self._irr:
            return _frac_str(self._rat)
        parts = [_frac_str(self._rat)] if self._rat else []
        for name, c in self._irr:
            s = f"{_frac_str(c)}*{name}"
            if parts and not s.startswith("-"):
                s = "+" + s
            parts.append(s)
        return "".join(parts)

    def __repr__(self):
        return f"ExactScalar({str(self)!r})"

    def to_json(self) -> list:
        return [[k, _frac_str(v)] for k, v in self.coords().items()] or [["1", "0"]]


ZERO = ExactScalar()
ONE = ExactScalar(1)


def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {text!r}") from None


_TERM = re.compile(r"\s*([+-]?)\s*([0-9./]+)?\s*\*?\s*([A-Za-z_][A-Za-z0-9_^]*)?\s*")


def parse_scalar(text: str) -> ExactScalar:
    """Parse the rendering produced by ``str(ExactScalar)``, e.g. ``2+1/2*sqrt3``.

    Builtin names (``sqrtK``, ``cN``, ``cN^j``) are declared on first use.
    """
    text = text.strip()
    if not text:
        raise ParseError("empty scalar")
    pos, rat, irr = 0, Fraction(0), {}
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise ParseError(f"cannot parse scalar {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = parse_rational(m.group(2)) if m.group(2) else Fraction(1)
        name = m.group(3)
        if name is None:
            rat += sign * coeff
        else:
            ensure_builtin(name)
            if not is_declared(name):
                raise ParseError(f"undeclared symbol {name!r}")
            irr[name] = irr.get(name, 0) + sign * coeff
        pos = m.end()
    return ExactScalar(rat, irr)


def scalar_from_json(value) -> ExactScalar:
    """Accept a list of ``[name, rational]`` pairs, a number, or a scalar string."""
    if isinstance(value, bool):
        raise ParseError("booleans are not scalars")
    if isinstance(value, int):
        return ExactScalar(value)
    if isinstance(value, float):
        return ExactScalar(Fraction(str(value)))
    if isinstance(value, str):
        return parse_scalar(value)
    if isinstance(value, list):
        rat, irr = Fraction(0), {}
        for pair in value:
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ParseError(f"scalar coordinate must be a [name, rational] pair: {pair!r}")
            name, coeff = pair
            c = parse_rational(str(coeff))
            if name == "1":
                rat += c
            else:
                ensure_builtin(name)
                if not is_declared(name):
                    raise ParseError(f"undeclared symbol {name!r}")
                irr[name] = irr.get(name, 0) + c
        return ExactScalar(rat, irr)
    raise ParseError(f"cannot interpret {value!r} as a scalar")


# --- symbol bases -----------------------------------------------------------


@dataclass(frozen=True)
class SymbolBasis:
    """The irrational symbols a space or polynomial refers to (rational unit implicit)."""

    symbols: tuple[tuple[str, str], ...] = ()
    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        names = [n for n, _ in self.symbols]
        if len(set(names)) != len(names):
            raise ValidationError("symbol names must be unique")
        if self.digits < 30:
            raise ValidationError("working precision must be at least 30 digits")
        for name, value in self.symbols:
            ensure_builtin(name)
            declare_symbol(name, value)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.symbols)

    @classmethod
    def for_scalars(cls, scalars: Iterable[ExactScalar], digits: int = DEFAULT_DIGITS) -> SymbolBasis:
        names = sorted({n for s in scalars for n in s.symbol_names()})
        return cls(tuple((n, _REGISTRY[n].value) for n in names), digits)

    def merge(self, other: SymbolBasis) -> SymbolBasis:
        if self == other or not other.symbols:
            return self
        if not self.symbols:
            return other
        mine = dict(self.symbols)
        for name, value in other.symbols:
            if name in mine and not _values_agree(mine[name], value):
                raise BasisMismatch(f"symbol {name!r} has conflicting values")
            mine[name] = value
        return SymbolBasis(tuple(sorted(mine.items())), max(self.digits, other.digits))

    def to_json(self) -> list:
        return [{"name": n, "value": v} for n, v in self.symbols]


EMPTY_BASIS = SymbolBasis()


# --- builtin symbols --------------------------------------------------------

_STORED_DIGITS = 120


def _declare_generated(name: str, gen: Callable[[int], mpmath.mpf]) -> None:
    if is_declared(name):
        return
    with mpmath.workdps(_STORED_DIGITS):
        text = mpmath.nstr(gen(_STORED_DIGITS), _STORED_DIGITS)
    declare_symbol(name, text, generator=gen)


def _squarefree_split(k: int) -> tuple[int, int]:
    """k = m*m*s with s squarefree; returns (m, s)."""
    m, s = 1, k
    p = 2
    while p * p <= s:
        while s % (p * p) == 0:
            s //= p * p
            m *= p
        p += 1
    return m, s


def sqrt(k: int) -> ExactScalar:
    """Exact square root of a positive integer as ``m * sqrt{s}``."""
    if k <= 0:
        raise ValidationError("sqrt needs a positive integer")
    m, s = _squarefree_split(k)
    if s == 1:
        return ExactScalar(m)
    name = f"sqrt{s}"

    def gen(digits, s=s):
        with mpmath.workdps(digits):
            return +mpmath.sqrt(s)

    _declare_generated(name, gen)
    return ExactScalar(0, {name: m})


@lru_cache(maxsize=None)
def _two_cos_minpoly(n: int) -> tuple[int, ...]:
    """Monic minimal polynomial of 2cos(pi/n), low degree first."""
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(sympy.minimal_polynomial(2 * sympy.cos(sympy.pi / n), x), x)
    coeffs = [int(c) for c in reversed(poly.all_coeffs())]
    assert coeffs[-1] == 1
    return tuple(coeffs)


def _reduce(poly: list[Fraction], minpoly: tuple[int, ...]) -> list[Fraction]:
    deg = len(minpoly) - 1
    poly = list(poly)
    for top in range(len(poly) - 1, deg - 1, -1):
        c = poly[top]
        if c:
            for i in range(deg):
                poly[top - deg + i] -= c * minpoly[i]
            poly[top] = Fraction(0)
    return (poly + [Fraction(0)] * deg)[:deg]


@lru_cache(maxsize=None)
def _power_basis_names(n: int) -> tuple[tuple[str, ...], tuple[int, ...]]:
    minpoly = _two_cos_minpoly(n)
    deg = len(minpoly) - 1
    if deg == 1:
        return (), minpoly
    if deg == 2 and minpoly[1] == 0:
        # 2cos(pi/n) = sqrt(s): reuse the square-root symbol
        sqrt(-minpoly[0])
        return (f"sqrt{-minpoly[0]}",), minpoly
    names = []
    for j in range(1, deg):
        name = f"c{n}" if j == 1 else f"c{n}^{j}"

        def gen(digits, n=n, j=j):
            with mpmath.workdps(digits):
                return (2 * mpmath.cos(mpmath.pi / n)) ** j

        _declare_generated(name, gen)
        names.append(name)
    return tuple(names), minpoly


def ngon_chord(n: int, m: int) -> ExactScalar:
    """sin(m*pi/n)/sin(pi/n), expressed in the power basis of 2cos(pi/n)."""
    if n < 2:
        raise ValidationError("polygon needs n >= 2")
    names, minpoly = _power_basis_names(n)
    # Chebyshev recurrence in c = 2cos(pi/n): U_1 = 1, U_2 = c, U_{k+1} = c U_k - U_{k-1}
    prev, cur = [Fraction(0)], [Fraction(1)]
    for _ in range(m - 1):
        nxt = [Fraction(0)] + cur
        for i, v in enumerate(prev):
            nxt[i] -= v
        prev, cur = cur, _reduce(nxt, minpoly)
    cur = _reduce(cur, minpoly)
    if not names:
        return ExactScalar(cur[0])
    if len(minpoly) == 3 and minpoly[1] == 0:
        return ExactScalar(cur[0], {names[0]: cur[1]})
    return ExactScalar(cur[0], {name: cur[j + 1] for j, name in enumerate(names)})


_BUILTIN = [
    (re.compile(r"sqrt(\d+)$"), lambda m: sqrt(int(m.group(1)))),
    (re.compile(r"c(\d+)(?:\^\d+)?$"), lambda m: _power_basis_names(int(m.group(1)))),
]


def ensure_builtin(name: str) -> None:
    """Declare ``name`` if it is one of the builtin symbol families."""
    if is_declared(name):
        return
    for pattern, make in _BUILTIN:
        m = pattern.match(name)
        if m:
            try:
                make(m)
            except Exception:
                return
            return
