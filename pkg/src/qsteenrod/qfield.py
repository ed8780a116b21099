"""Exact scalars: rationals, univariate polynomials in q and rational functions in q.

Rationals are :class:`gmpy2.mpq` values throughout.  ``QUniPoly`` and
``QRatFunc`` are immutable and hashable so they can sit inside polynomial
term maps and be shared freely.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

from gmpy2 import mpq, mpz

Rational = type(mpq())

RationalLike = Union[int, str, Fraction, "mpq"]


def as_rational(value) -> mpq:
    """Coerce ints, Fractions, mpq and strings such as ``"-2/5"`` to ``mpq``."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, (int, type(mpz()))):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational literal")
        num, _, den = text.partition("/")
        try:
            if den:
                d = int(den)
                if d == 0:
                    raise ZeroDivisionError("zero denominator in rational literal")
                return mpq(int(num), d)
            return mpq(int(num))
        except ValueError:
            raise ValueError(f"not a rational literal: {value!r}") from None
    if isinstance(value, float):
        raise TypeError("floating-point values are not exact; pass a rational string")
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


def format_rational(r) -> str:
    r = as_rational(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def _trim(coeffs: Iterable) -> tuple:
    c = [as_rational(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class QUniPoly:
    """Polynomial in q with rational coefficients; ``coeffs[i]`` multiplies q**i."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Sequence = ()):
        self.coeffs = _trim(coeffs)
        self._hash = None

    @classmethod
    def constant(cls, c) -> "QUniPoly":
        return cls((c,))

    @classmethod
    def q(cls) -> "QUniPoly":
        return cls((0, 1))

    # structural
    def degree(self) -> int:
        """Degree in q; raises for the zero polynomial (its degree is undefined)."""
        if not self.coeffs:
            raise ValueError("degree of the zero polynomial is undefined")
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant_term(self) -> mpq:
        return self.coeffs[0] if self.coeffs else mpq(0)

    def leading(self) -> mpq:
        return self.coeffs[-1] if self.coeffs else mpq(0)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, QUniPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, QRatFunc):
            return other == self
        try:
            o = as_rational(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == _trim((o,))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("QUniPoly", self.coeffs)) if len(self.coeffs) > 1 else hash(self.constant_term())
        return self._hash

    # arithmetic
    @staticmethod
    def _coerce(other):
        if isinstance(other, QUniPoly):
            return other
        if isinstance(other, QRatFunc):
            return None
        return QUniPoly((as_rational(other),))

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return QUniPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return QUniPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if not a or not b:
            return QUniPoly()
        out = [mpq(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return QUniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result, base = QUniPoly((1,)), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (QUniPoly, QRatFunc)):
            return QRatFunc(self, 1) / other
        c = as_rational(other)
        if c == 0:
            raise ZeroDivisionError("division by zero")
        return QUniPoly([x / c for x in self.coeffs])

    def __rtruediv__(self, other):
        return QRatFunc(other, 1) / QRatFunc(self, 1)

    def divmod(self, other: "QUniPoly") -> tuple["QUniPoly", "QUniPoly"]:
        if not other.coeffs:
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        db = len(other.coeffs) - 1
        lead = other.coeffs[-1]
        if len(rem) - 1 < db:
            return QUniPoly(), self
        quot = [mpq(0)] * (len(rem) - db)
        for i in range(len(rem) - 1, db - 1, -1):
            c = rem[i]
            if c:
                f = c / lead
                quot[i - db] = f
                for j, y in enumerate(other.coeffs):
                    rem[i - db + j] -= f * y
        return QUniPoly(quot), QUniPoly(rem[:db])

    def monic(self) -> "QUniPoly":
        if not self.coeffs:
            return self
        lead = self.coeffs[-1]
        return self if lead == 1 else QUniPoly([c / lead for c in self.coeffs])

    def gcd(self, other: "QUniPoly") -> "QUniPoly":
        """Monic gcd (zero if both are zero)."""
        a, b = self, other
        while b.coeffs:
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def content(self) -> mpq:
        """Positive rational c with self/c primitive over Z (0 for zero)."""
        if not self.coeffs:
            return mpq(0)
        num = 0
        den = 1
        for c in self.coeffs:
            num = _gcd(num, int(c.numerator))
            den = den * int(c.denominator) // _gcd(den, int(c.denominator))
        return mpq(num, den)

    def primitive(self) -> "QUniPoly":
        """Integer-coefficient primitive part with positive leading coefficient."""
        if not self.coeffs:
            return self
        c = self.content()
        if self.coeffs[-1] < 0:
            c = -c
        return QUniPoly([x / c for x in self.coeffs])

    def __call__(self, q0) -> mpq:
        q0 = as_rational(q0)
        acc = mpq(0)
        for c in reversed(self.coeffs):
            acc = acc * q0 + c
        return acc

    def __repr__(self):
        return f"QUniPoly({format_qpoly(self)})"

    def __str__(self):
        return format_qpoly(self)


def _gcd(a: int, b: int) -> int:
    import math

    return math.gcd(a, b)


class QRatFunc:
    """Reduced fraction ``num/den`` of q-polynomials with monic denominator."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=1, *, _reduced: bool = False):
        n = num if isinstance(num, QUniPoly) else QUniPoly((as_rational(num),))
        d = den if isinstance(den, QUniPoly) else QUniPoly((as_rational(den),))
        if not d.coeffs:
            raise ZeroDivisionError("zero denominator")
        if not _reduced:
            if not n.coeffs:
                d = QUniPoly((1,))
            elif len(d.coeffs) > 1:
                g = n.gcd(d)
                if len(g.coeffs) > 1:
                    n = n.divmod(g)[0]
                    d = d.divmod(g)[0]
            lead = d.coeffs[-1]
            if lead != 1:
                n = QUniPoly([c / lead for c in n.coeffs])
                d = QUniPoly([c / lead for c in d.coeffs])
        self.num, self.den = n, d
        self._hash = None

    @classmethod
    def q(cls) -> "QRatFunc":
        return cls(QUniPoly.q())

    def is_zero(self) -> bool:
        return not self.num.coeffs

    def __bool__(self):
        return bool(self.num.coeffs)

    def is_polynomial(self) -> bool:
        return len(self.den.coeffs) == 1

    def is_constant(self) -> bool:
        return self.is_polynomial() and self.num.is_constant()

    def __eq__(self, other):
        if isinstance(other, QRatFunc):
            return self.num == other.num and self.den == other.den
        if isinstance(other, QUniPoly):
            return self.is_polynomial() and self.num == other
        try:
            o = as_rational(other)
        except TypeError:
            return NotImplemented
        return self.is_polynomial() and self.num == o

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.num) if self.is_polynomial() else hash(("QRatFunc", self.num, self.den))
        return self._hash

    @staticmethod
    def _coerce(other) -> "QRatFunc":
        if isinstance(other, QRatFunc):
            return other
        if isinstance(other, QUniPoly):
            return QRatFunc(other, _reduced=True)
        return QRatFunc(QUniPoly((as_rational(other),)), _reduced=True)

    def __add__(self, other):
        o = self._coerce(other)
        if self.den == o.den:
            return QRatFunc(self.num + o.num, self.den)
        return QRatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return QRatFunc(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if self.is_polynomial() and o.is_polynomial():
            return QRatFunc(self.num * o.num, _reduced=True)
        return QRatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if not o.num.coeffs:
            raise ZeroDivisionError("division by zero rational function")
        return QRatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return QRatFunc(1) / (self ** (-e))
        return QRatFunc(self.num ** e, self.den ** e)

    def __call__(self, q0) -> mpq:
        q0 = as_rational(q0)
        d = self.den(q0)
        if d == 0:
            raise PoleError(f"q = {format_rational(q0)} is a pole")
        return self.num(q0) / d

    def __repr__(self):
        return f"QRatFunc({format_qratfunc(self)})"

    def __str__(self):
        return format_qratfunc(self)


class PoleError(ArithmeticError):
    """Specialising a rational function at one of its poles."""


def format_qpoly(p: QUniPoly) -> str:
    if not p.coeffs:
        return "0"
    parts = []
    for i in range(len(p.coeffs) - 1, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = format_rational(mag)
        else:
            qp = "q" if i == 1 else f"q^{i}"
            body = qp if mag == 1 else f"{format_rational(mag)}*{qp}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


def format_qratfunc(f: QRatFunc) -> str:
    if f.is_polynomial():
        return format_qpoly(f.num)
    return f"({format_qpoly(f.num)})/({format_qpoly(f.den)})"
