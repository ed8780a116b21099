import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from qsteenrod.poly import (NonExactDivision, Polynomial, Ring, RingError, apply_permutation, binomial,
                            compose, exact_divide, monomial_basis, pack, parse_polynomial,
                            partial_derivative, poly_arith, specialize_q, transposition)
from qsteenrod.qfield import PoleError, QRatFunc, QUniPoly
from qsteenrod.symfun import VarSubset, elementary, vandermonde

from conftest import polynomials, rationals

x = lambda n, i: Polynomial.var(n, i)


def test_difference_of_squares():
    a, b = x(2, 1), x(2, 2)
    assert (a - b) * (a + b) == a * a - b * b
    assert vandermonde(2) * elementary(1, 2) == a * a - b * b


def test_expansion_example():
    x1, x2, x3 = (x(3, i) for i in (1, 2, 3))
    f = ((x2 - x3) * (x2 + x3 + x1.scale(4))).scale(mpq(1, 3))
    assert f == parse_polynomial("1/3*x2^2 - 1/3*x3^2 + 4/3*x1*x2 - 4/3*x1*x3", 3)


def test_poly_arith_ops():
    a, b = x(2, 1), x(2, 2)
    assert poly_arith(a, b, "add") == a + b
    assert poly_arith(a, b, "sub") == a - b
    assert poly_arith(a, b, "mul") == a * b
    assert poly_arith(a, 3, "scale") == a.scale(3)


def test_mixed_ring_and_arity_errors():
    with pytest.raises(RingError):
        x(2, 1) + x(2, 1).to_ring(Ring.QPOLY)
    with pytest.raises(RingError):
        x(2, 1) + x(3, 1)


def test_partial_derivatives_of_vandermonde():
    V = vandermonde(3)
    assert partial_derivative(V, 1, 2) == (x(3, 2) - x(3, 3)).scale(2)
    assert not partial_derivative(V, 1, 3)
    assert not partial_derivative(Polynomial.constant(3, 1), 1)


def test_exact_divide():
    a, b = x(2, 1), x(2, 2)
    assert exact_divide(a * a - b * b, a - b) == a + b
    with pytest.raises(NonExactDivision):
        exact_divide(a, b)


def test_exact_divide_p2_summand():
    # (d2 - d3) e2(x2,x3,x4) = x3 - x2, so the summand is -1
    n = 4
    e2 = elementary(2, VarSubset(n, (2, 3, 4)))
    num = partial_derivative(e2, 2) - partial_derivative(e2, 3)
    assert exact_divide(num, x(n, 2) - x(n, 3)) == Polynomial.constant(n, -1)


def test_specialize():
    f = Polynomial(1, {pack((1,)): QUniPoly((1, 1))}, Ring.QPOLY)
    assert not specialize_q(f, -1)
    g = Polynomial(1, {pack((1,)): QRatFunc(QUniPoly((1,)), QUniPoly((-2, 1)))}, Ring.QRAT)
    with pytest.raises(PoleError):
        specialize_q(g, 2)
    h = parse_polynomial("(q)*x1 + x2", 2)
    assert specialize_q(h, mpq(-1, 2)) == parse_polynomial("-1/2*x1 + x2", 2)


def test_permutations():
    assert apply_permutation(x(2, 1) - x(2, 2), (2, 1)) == x(2, 2) - x(2, 1)
    e2 = elementary(2, 4)
    assert apply_permutation(e2, (3, 1, 4, 2)) == e2
    assert apply_permutation(vandermonde(3), transposition(3, 1, 2)) == -vandermonde(3)


def test_monomial_basis():
    assert monomial_basis(2, 1) == [(1, 0), (0, 1)]
    assert monomial_basis(3, 0) == [(0, 0, 0)]
    assert len(monomial_basis(3, 2)) == 6
    for n in range(1, 5):
        for d in range(5):
            assert len(monomial_basis(n, d)) == binomial(d + n - 1, n - 1)


def test_zero_has_no_degree():
    assert Polynomial.zero(3).homogeneous_degree() is None


@given(polynomials(n=3), polynomials(n=3), polynomials(n=3))
def test_ring_axioms(f, g, h):
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f * g == g * f
    assert f - f == Polynomial.zero(3)


@given(polynomials(n=2, ring=Ring.QPOLY), polynomials(n=2, ring=Ring.QPOLY),
       polynomials(n=2, ring=Ring.QPOLY))
def test_ring_axioms_qpoly(f, g, h):
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h


@given(polynomials(n=3), polynomials(n=3).filter(bool))
def test_exact_divide_roundtrip(f, g):
    assert exact_divide(f * g, g) == f


@given(polynomials(n=2, ring=Ring.QPOLY), polynomials(n=2, ring=Ring.QPOLY), rationals)
def test_specialize_commutes(f, g, q0):
    assert specialize_q(f * g, q0) == specialize_q(f, q0) * specialize_q(g, q0)
    assert specialize_q(f + g, q0) == specialize_q(f, q0) + specialize_q(g, q0)


@given(polynomials(n=3), st.permutations((1, 2, 3)), st.permutations((1, 2, 3)))
def test_permutation_action(f, s, t):
    assert apply_permutation(apply_permutation(f, s), t) == apply_permutation(f, compose(s, t))


@given(polynomials())
def test_text_roundtrip(f):
    assert parse_polynomial(str(f), f.n) == f


@given(polynomials(n=2, ring=Ring.QPOLY))
def test_text_roundtrip_qpoly(f):
    assert parse_polynomial(str(f), 2, Ring.QPOLY) == f
