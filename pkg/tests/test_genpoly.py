from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from magchar.errors import DomainError, NegativeExponent
from magchar.genpoly import GenPoly, LambdaPoly, gp_add, gp_eval, gp_mul, lp_shift, lp_unshift
from magchar.scalar import ExactScalar, sqrt

R2, R3 = sqrt(2), sqrt(3)

exponents = st.builds(
    lambda a, b, c: ExactScalar(Fraction(a, 2)) + R2 * b + R3 * c,
    st.integers(0, 6), st.integers(0, 2), st.integers(0, 2),
)
coeffs = st.fractions(-5, 5, max_denominator=4).filter(bool)
genpolys = st.lists(st.tuples(exponents, coeffs), max_size=5).map(lambda ts: sum((GenPoly.monomial(e, c) for e, c in ts), GenPoly()))


def q(e, c=1):
    return GenPoly.monomial(e, c)


def test_add_examples():
    assert q(2) + q(3) + q(3, -1) == q(2)
    f = q(R3, 2)
    assert f + GenPoly() == f
    assert gp_add(q(R3, 2), q(R3, 3)) == q(R3, 5)


def test_mul_examples():
    assert gp_mul(q(1), q(2)) == q(3)
    d = R2 + 1
    assert (GenPoly.constant(1) - q(d)) * (GenPoly.constant(1) + q(d)) == GenPoly.constant(1) - q(d * 2)
    f = q(R3, 2) + q(1)
    assert f * GenPoly.constant(1) == f


def test_eval_examples():
    assert gp_eval(q(2), Fraction(1, 2)) == mpmath.mpf("0.25")
    assert gp_eval(GenPoly.constant(1), Fraction(1, 3)) == 1
    assert gp_eval(q(2) - q(2), Fraction(1, 3)) == 0
    with pytest.raises(DomainError):
        gp_eval(q(1), 0)


def test_negative_exponent_rejected():
    with pytest.raises(NegativeExponent):
        GenPoly.monomial(-1)
    with pytest.raises(NegativeExponent):
        GenPoly.monomial(ExactScalar(1) - R2)


def test_rendering():
    assert (q(R3 + 2, -3)).render() == "-3*q^[2+1*sqrt3]"
    assert (GenPoly.constant(2) - q(1, 2) + q(2, 2) - q(3, 2)).render() == "2 - 2q + 2q^2 - 2q^3"
    assert q(Fraction(3, 2)).render() == "q^(3/2)"


@settings(max_examples=80, deadline=None)
@given(genpolys, genpolys, genpolys)
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == GenPoly()


@settings(max_examples=80, deadline=None)
@given(genpolys, genpolys, st.fractions(Fraction(1, 10), 1))
def test_eval_is_homomorphism(f, g, q0):
    with mpmath.workdps(60):
        a = gp_eval(f * g, q0, 50)
        b = gp_eval(f, q0, 50) * gp_eval(g, q0, 50)
        s = gp_eval(f + g, q0, 50) - gp_eval(f, q0, 50) - gp_eval(g, q0, 50)
        scale = max(abs(a), abs(b), mpmath.mpf(1))
        assert abs(a - b) <= scale * mpmath.mpf(10) ** -40
        assert abs(s) <= scale * mpmath.mpf(10) ** -40


@settings(max_examples=60, deadline=None)
@given(genpolys, genpolys)
def test_mul_term_bound(f, g):
    assert len(f * g) <= len(f) * len(g)


def test_lp_shift_examples():
    assert lp_shift(LambdaPoly([0, 0, 1], "μ")) == LambdaPoly([1, -2, 1])
    assert lp_shift(LambdaPoly([0, 1], "μ")) == LambdaPoly([-1, 1])
    assert str(LambdaPoly([-1, 1])) == "λ - 1"


@settings(max_examples=40, deadline=None)
@given(st.lists(genpolys, min_size=1, max_size=5))
def test_shift_round_trip(cs):
    p = LambdaPoly(cs + [GenPoly.constant(1)], "μ")
    assert lp_unshift(lp_shift(p)) == p


@settings(max_examples=40, deadline=None)
@given(st.lists(genpolys, min_size=1, max_size=4), st.fractions(Fraction(1, 10), 1), st.fractions(-3, 3))
def test_lambda_eval_consistency(cs, q0, lam):
    p = LambdaPoly(cs + [GenPoly.constant(1)])
    with mpmath.workdps(60):
        direct = p.evaluate(q0, lam, 50)
        via = mpmath.polyval(list(reversed(p.at_q(q0, 50))), mpmath.mpf(lam.numerator) / lam.denominator)
        assert abs(direct - via) <= mpmath.mpf(10) ** -35 * max(1, abs(direct))
