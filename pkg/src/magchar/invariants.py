"""Similarity-matrix invariants of finite metric spaces.

The characteristic polynomial is computed with the Faddeev-LeVerrier trace
recurrence over generalized polynomials: only ring operations plus division of
rational coefficients by 1..n, so no generalized-polynomial division is ever
needed.  Exponents are packed into integers (see ``ExponentLattice``) for the
inner loops.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Iterable, Sequence

import mpmath

from .errors import DomainError, OracleLimitExceeded, SingularSimilarityMatrix, ValidationError
from .genpoly import ExponentLattice, GenPoly, LambdaPoly, _to_mpf, lp_shift
from .metric import FiniteMetricSpace, check_simple_graph
from .scalar import ExactScalar, default_digits

DEFAULT_ORACLE_LIMIT = 7


def _div(v, k: int):
    if isinstance(v, int):
        q, r = divmod(v, k)
        return q if r == 0 else Fraction(v, k)
    return v / k


def similarity_matrix(X: FiniteMetricSpace) -> list[list[GenPoly]]:
    """``z_X(q)``: entry (i, j) is ``q^{d_ij}``, diagonal 1."""
    return [[GenPoly.monomial(d) if i != j else GenPoly.constant(1) for j, d in enumerate(row)]
            for i, row in enumerate(X.dist)]


@dataclass(frozen=True)
class TauVector:
    """Elementary symmetric polynomials ``tau_1..tau_m`` of the eigenvalues of ``z_X(q) - I``."""

    values: tuple[GenPoly, ...]
    n: int

    def __getitem__(self, k: int) -> GenPoly:
        if not 1 <= k <= len(self.values):
            raise IndexError(f"tau_{k} not available (have 1..{len(self.values)})")
        return self.values[k - 1]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def _fl_packed(A: list[list[dict]], upto: int) -> list[dict]:
    """Faddeev-LeVerrier on a matrix of packed polynomials.

    Returns ``c_0..c_upto`` with ``det(mu I - A) = sum_k c_k mu^{n-k}``.
    """
    n = len(A)
    rows = [[(l, tuple(A[i][l].items())) for l in range(n) if A[i][l]] for i in range(n)]
    M = [[{0: 1} if i == j else {} for j in range(n)] for i in range(n)]
    coeffs: list[dict] = [{0: 1}]
    for k in range(1, upto + 1):
        last = k == upto
        trace: dict = {}
        P = None if last else [[None] * n for _ in range(n)]
        for i in range(n):
            cols = (i,) if last else range(n)
            for j in cols:
                acc: dict = {}
                get = acc.get
                for l, a_terms in rows[i]:
                    m = M[l][j]
                    if not m:
                        continue
                    for ka, ca in a_terms:
                        if ca == 1:
                            for km, cm in m.items():
                                key = km + ka
                                acc[key] = get(key, 0) + cm
                        else:
                            for km, cm in m.items():
                                key = km + ka
                                acc[key] = get(key, 0) + ca * cm
                acc = {key: v for key, v in acc.items() if v}
                if not last:
                    P[i][j] = acc
                if i == j:
                    for key, v in acc.items():
                        trace[key] = trace.get(key, 0) + v
        ck = {key: -_div(v, k) for key, v in trace.items() if v}
        coeffs.append(ck)
        if not last:
            for i in range(n):
                d = P[i][i]
                for key, v in ck.items():
                    s = d.get(key, 0) + v
                    if s:
                        d[key] = s
                    else:
                        d.pop(key, None)
            M = P
    return coeffs


def _packed_shifted_similarity(X: FiniteMetricSpace):
    n = X.n
    lattice = ExponentLattice(X.edge_lengths(), max_terms=max(n, 1))
    A = [[{lattice.encode(X.dist[i][j]): 1} if i != j else {} for j in range(n)] for i in range(n)]
    return lattice, A


def tau(X: FiniteMetricSpace, upto: int | None = None) -> TauVector:
    """``tau_1..tau_upto`` (default all n) via the trace recurrence on ``z_X(q) - I``.

    ``tau_k = (-1)^k * [mu^{n-k}] det(mu I - (z_X - I))``.  The recurrence is
    sequential, so a truncated run yields the leading coefficients exactly.
    """
    n = X.n
    upto = n if upto is None else min(upto, n)
    lattice, A = _packed_shifted_similarity(X)
    coeffs = _fl_packed(A, upto)
    vals = []
    for k in range(1, upto + 1):
        c = coeffs[k]
        sign = -1 if k % 2 else 1
        vals.append(lattice.to_genpoly({key: sign * v for key, v in c.items()}))
    return TauVector(tuple(vals), n)


def mu_charpoly(X: FiniteMetricSpace) -> LambdaPoly:
    """``pbar_X(q; mu) = mu^n + sum_l (-1)^l tau_l mu^{n-l}``."""
    t = tau(X)
    n = X.n
    coeffs = [GenPoly() for _ in range(n + 1)]
    coeffs[n] = GenPoly.constant(1)
    for l in range(1, n + 1):
        coeffs[n - l] = t[l] if l % 2 == 0 else -t[l]
    return LambdaPoly(coeffs, "μ")


def charpoly(X: FiniteMetricSpace) -> LambdaPoly:
    """``p_X(q; lambda) = det(lambda I - z_X(q))``."""
    return lp_shift(mu_charpoly(X))


def tau_oracle(X: FiniteMetricSpace, k: int, limit: int = DEFAULT_ORACLE_LIMIT) -> GenPoly:
    """``tau_k`` as a signed sum over k-cycles (fixed-point-free permutations of k-subsets).

    Independent of :func:`tau`; exponential cost, capped at ``limit`` points.
    """
    n = X.n
    if n > limit:
        raise OracleLimitExceeded(f"cycle oracle limited to n <= {limit}, got {n}")
    if not 1 <= k <= n:
        raise ValidationError(f"k must lie in 1..{n}")
    acc: dict[ExactScalar, int] = {}
    d = X.dist
    for subset in combinations(range(n), k):
        for image in permutations(subset):
            if any(a == b for a, b in zip(subset, image)):
                continue
            length = ExactScalar()
            for a, b in zip(subset, image):
                length = length + d[a][b]
            sign = 1 if (_cycle_count(subset, image) + k) % 2 == 0 else -1
            acc[length] = acc.get(length, 0) + sign
    return GenPoly(acc)


def _cycle_count(domain: Sequence[int], image: Sequence[int]) -> int:
    succ = dict(zip(domain, image))
    seen = set()
    cycles = 0
    for start in domain:
        if start in seen:
            continue
        cycles += 1
        x = start
        while x not in seen:
            seen.add(x)
            x = succ[x]
    return cycles


# --- magnitude ------------------------------------------------------------------


def _solve(Z: list[list[mpmath.mpf]], rhs: list[mpmath.mpf], digits: int) -> list[mpmath.mpf]:
    """Gaussian elimination with partial pivoting; raises on pivot collapse."""
    n = len(Z)
    a = [row[:] + [rhs[i]] for i, row in enumerate(Z)]
    scale = max((abs(x) for row in Z for x in row), default=mpmath.mpf(1))
    tol = scale * mpmath.mpf(10) ** (-digits)
    pivots = []
    for col in range(n):
        p = max(range(col, n), key=lambda r: abs(a[r][col]))
        if abs(a[p][col]) <= tol:
            cond = max(pivots, default=scale) / max(abs(a[p][col]), mpmath.mpf(10) ** (-2 * digits))
            raise SingularSimilarityMatrix(
                f"similarity matrix is numerically singular (condition estimate ~{mpmath.nstr(cond, 5)})",
                condition=cond,
            )
        a[col], a[p] = a[p], a[col]
        pivots.append(abs(a[col][col]))
        piv = a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / piv
            if f:
                ar, ac = a[r], a[col]
                for c in range(col, n + 1):
                    ar[c] -= f * ac[c]
    x = [mpmath.mpf(0)] * n
    for r in range(n - 1, -1, -1):
        s = a[r][n] - sum(a[r][c] * x[c] for c in range(r + 1, n))
        x[r] = s / a[r][r]
    return x


def weighting(X: FiniteMetricSpace, t, digits: int | None = None) -> list[mpmath.mpf]:
    digits = digits or default_digits()
    with mpmath.workdps(digits + 10):
        tt = _to_mpf(t)
        if tt <= 0:
            raise DomainError(f"scale t must be positive, got {t}")
        Z = [[mpmath.exp(-tt * d.numeric(digits)) if i != j else mpmath.mpf(1)
              for j, d in enumerate(row)] for i, row in enumerate(X.dist)]
        return _solve(Z, [mpmath.mpf(1)] * X.n, digits)


def magnitude(X: FiniteMetricSpace, t, digits: int | None = None) -> mpmath.mpf:
    """``|tX|``: entry sum of the weighting solving ``Z_{tX} w = 1``."""
    digits = digits or default_digits()
    w = weighting(X, t, digits)
    with mpmath.workdps(digits + 10):
        return mpmath.fsum(w)


def magnitude_csv(X: FiniteMetricSpace, ts: Iterable, digits: int | None = None) -> str:
    digits = digits or default_digits()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "magnitude"])
    for t in ts:
        writer.writerow([str(t), mpmath.nstr(magnitude(X, t, digits), digits)])
    return buf.getvalue()


def formal_magnitude(X: FiniteMetricSpace, max_exponent) -> GenPoly:
    """Truncation of ``m_X(q) = sum_k (-1)^k sum_{i_0 != ... != i_k} q^{path length}``.

    Keeps every path of length ``<= max_exponent``.  Paths are aggregated by
    (end point, length) step by step, which is the same sum as walking them one
    by one but does not grow exponentially with the step count.
    """
    cutoff = ExactScalar.coerce(max_exponent)
    if cutoff.sign() <= 0:
        raise DomainError("formal magnitude cutoff must be positive")
    n = X.n
    total: dict[ExactScalar, int] = {ExactScalar(): n}
    if n == 1:
        return GenPoly(total)
    dmin = min((d for d in X.edge_lengths()), key=lambda d: d.numeric())
    max_steps = int(mpmath.floor(cutoff.numeric() / dmin.numeric())) + 1
    lattice = ExponentLattice([*X.edge_lengths(), cutoff], max_terms=max_steps + 1)
    step = [[lattice.encode(X.dist[i][j]) for j in range(n)] for i in range(n)]
    within: dict[int, bool] = {}

    def keep(key: int) -> bool:
        ok = within.get(key)
        if ok is None:
            ok = (lattice.decode(key) - cutoff).sign() <= 0
            within[key] = ok
        return ok

    layer = [{0: 1} for _ in range(n)]
    sign = 1
    acc: dict[int, int] = {}
    while any(layer):
        sign = -sign
        nxt = [dict() for _ in range(n)]
        for i in range(n):
            src = layer[i]
            if not src:
                continue
            for j in range(n):
                if j == i:
                    continue
                dst, dk = nxt[j], step[i][j]
                for key, c in src.items():
                    nk = key + dk
                    if keep(nk):
                        dst[nk] = dst.get(nk, 0) + c
        for dst in nxt:
            for key, c in dst.items():
                acc[key] = acc.get(key, 0) + sign * c
        layer = nxt
    out = lattice.to_genpoly(acc)
    return out + GenPoly(total)


# --- scalar characteristic polynomials -----------------------------------------------


def faddeev_leverrier(mat: Sequence[Sequence]) -> list:
    """Characteristic polynomial coefficients, low degree first, leading 1."""
    n = len(mat)
    M = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    c = [1]
    for k in range(1, n + 1):
        AM = [[sum(mat[i][l] * M[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        ck = -_div(sum(AM[i][i] for i in range(n)), k)
        c.append(ck)
        for i in range(n):
            AM[i][i] += ck
        M = AM
    return list(reversed(c))


@dataclass(frozen=True)
class ScalarCharpoly:
    """Coefficients low degree first; ``exact`` when computed over the rationals."""

    coeffs: tuple
    exact: bool

    def evaluate(self, lam):
        total = 0
        for c in reversed(self.coeffs):
            total = total * lam + c
        return total

    def agrees(self, other: ScalarCharpoly, tol=mpmath.mpf("1e-30")) -> bool:
        if len(self.coeffs) != len(other.coeffs):
            return False
        if self.exact and other.exact:
            return self.coeffs == other.coeffs
        return all(abs(_to_mpf(a) - _to_mpf(b)) <= tol for a, b in zip(self.coeffs, other.coeffs))

    def render(self, var: str = "λ", digits: int = 20) -> str:
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            text = str(c) if self.exact else mpmath.nstr(c, digits)
            power = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            parts.append(f"({text}){power}" if power else f"({text})")
        return " + ".join(parts)


def _parse_q(q0):
    if isinstance(q0, (int, Fraction)):
        return Fraction(q0)
    if isinstance(q0, str):
        try:
            return Fraction(q0)
        except ValueError:
            return mpmath.mpf(q0)
    return q0


def stochastic_matrix(X: FiniteMetricSpace, variant: str, q0, digits: int | None = None):
    """Row-normalized ``alpha_X(q0)`` or ``beta_X(q0)`` (built from ``z_X - I``)."""
    digits = digits or default_digits()
    if variant not in ("alpha", "beta"):
        raise ValidationError(f"unknown stochastic variant {variant!r}")
    q = _parse_q(q0)
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q0}")
    n = X.n
    if variant == "beta" and n < 2:
        raise DomainError("beta variant needs at least two points")
    exact = isinstance(q, Fraction) and all(d.is_rational() and d.rational.denominator == 1
                                            for d in X.edge_lengths())
    if exact:
        z = [[q ** int(d.rational) if i != j else Fraction(1) for j, d in enumerate(row)]
             for i, row in enumerate(X.dist)]
    else:
        with mpmath.workdps(digits + 10):
            qm = _to_mpf(q)
            z = [[qm ** d.numeric(digits) if i != j else mpmath.mpf(1) for j, d in enumerate(row)]
                 for i, row in enumerate(X.dist)]
    off = 1 if variant == "beta" else 0
    out = []
    for i in range(n):
        r = sum(z[i]) - off
        out.append([(z[i][j] - (off if i == j else 0)) / r for j in range(n)])
    return out, exact


def stochastic_charpoly(X: FiniteMetricSpace, variant: str, q0, digits: int | None = None) -> ScalarCharpoly:
    digits = digits or default_digits()
    mat, exact = stochastic_matrix(X, variant, q0, digits)
    if exact:
        return ScalarCharpoly(tuple(faddeev_leverrier(mat)), True)
    with mpmath.workdps(digits + 10):
        return ScalarCharpoly(tuple(faddeev_leverrier(mat)), False)


def adjacency_charpoly(n: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    """Integer characteristic polynomial of the 0/1 adjacency matrix, low degree first."""
    edges = check_simple_graph(n, edges)
    A = [[0] * n for _ in range(n)]
    for u, v in edges:
        A[u][v] = A[v][u] = 1
    return faddeev_leverrier(A)


def render_int_poly(coeffs: Sequence, var: str = "λ") -> str:
    out = ""
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        power = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        mag = abs(c)
        body = (str(mag) if (mag != 1 or k == 0) else "") + power
        if not out:
            out = ("-" if c < 0 else "") + body
        else:
            out += (" - " if c < 0 else " + ") + body
    return out or "0"
