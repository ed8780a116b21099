import pytest
from gmpy2 import mpq
from hypothesis import given

from qsteenrod.qfield import PoleError, QRatFunc, QUniPoly, as_rational, format_rational

from conftest import rationals

q = QUniPoly.q()


def test_as_rational_forms():
    assert as_rational("3/6") == mpq(1, 2)
    assert as_rational(-2) == mpq(-2)
    assert format_rational(mpq(-4, 6)) == "-2/3"
    assert format_rational(mpq(5)) == "5"


def test_ratfunc_canonical_form():
    f = QRatFunc(q * q - 1, (q - 1).__mul__(2))
    assert f == QRatFunc(q + 1, QUniPoly((2,)))
    assert f.den.leading() == 1


def test_pole():
    with pytest.raises(PoleError):
        QRatFunc(QUniPoly((1,)), q - 2)(2)


@given(rationals, rationals, rationals)
def test_unipoly_arith(a, b, c):
    f, g = QUniPoly((a, b)), QUniPoly((c, 1))
    assert (f * g)(c) == f(c) * g(c)
    assert (f + g)(a) == f(a) + g(a)
    quo, rem = (f * g + f).divmod(g)
    assert quo * g + rem == f * g + f


@given(rationals, rationals.filter(bool))
def test_ratfunc_field(a, b):
    f = QRatFunc(QUniPoly((a, 1)), QUniPoly((b, 1)))
    if f:
        assert f * (QRatFunc(1) / f) == QRatFunc(1)
    assert f - f == QRatFunc(0)
