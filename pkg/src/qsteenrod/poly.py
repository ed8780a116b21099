"""Sparse multivariate polynomials over Q, Q[q] and Q(q).

Monomials are stored packed into a single Python int, ``FIELD`` bits per
variable with x1 in the most significant field.  Integer comparison of
packed keys is therefore pure lex order with x1 > x2 > ... > xn, and monomial
multiplication is integer addition.
"""
from __future__ import annotations

import math
import re
from enum import Enum
from itertools import combinations_with_replacement
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from gmpy2 import mpq

from .qfield import (
    PoleError,
    QRatFunc,
    QUniPoly,
    Rational,
    as_rational,
    format_qpoly,
    format_qratfunc,
    format_rational,
)

FIELD = 16
MASK = (1 << FIELD) - 1

Monomial = Tuple[int, ...]


class Ring(str, Enum):
    RAT = "RAT"
    QPOLY = "QPOLY"
    QRAT = "QRAT"


class RingError(TypeError):
    """Mixed coefficient rings or variable counts."""


class NonExactDivision(ArithmeticError):
    """A polynomial division left a nonzero remainder."""


class InhomogeneousError(ValueError):
    pass


def pack(exps: Sequence[int]) -> int:
    key = 0
    for e in exps:
        if e < 0 or e > MASK:
            raise ValueError(f"exponent {e} out of range")
        key = (key << FIELD) | e
    return key


def unpack(key: int, n: int) -> Monomial:
    out = [0] * n
    for i in range(n - 1, -1, -1):
        out[i] = key & MASK
        key >>= FIELD
    return tuple(out)


def _shift(n: int, i: int) -> int:
    """Bit offset of variable index i (0-based)."""
    return FIELD * (n - 1 - i)


def key_degree(key: int) -> int:
    d = 0
    while key:
        d += key & MASK
        key >>= FIELD
    return d


_ZERO = {Ring.RAT: mpq(0), Ring.QPOLY: QUniPoly(), Ring.QRAT: QRatFunc(0)}


def coerce_scalar(c, ring: Ring):
    """Convert a scalar into the coefficient type of ``ring`` (promotion only)."""
    if ring is Ring.RAT:
        if isinstance(c, (QUniPoly, QRatFunc)):
            if not c.is_constant():
                raise RingError("q-dependent scalar in a RAT polynomial")
            return c.constant_term() if isinstance(c, QUniPoly) else c.num.constant_term()
        return as_rational(c)
    if ring is Ring.QPOLY:
        if isinstance(c, QUniPoly):
            return c
        if isinstance(c, QRatFunc):
            if not c.is_polynomial():
                raise RingError("non-polynomial rational function in a QPOLY polynomial")
            return c.num
        return QUniPoly((as_rational(c),))
    if isinstance(c, QRatFunc):
        return c
    if isinstance(c, QUniPoly):
        return QRatFunc(c, _reduced=True)
    return QRatFunc(as_rational(c), _reduced=True)


class Polynomial:
    """Immutable sparse polynomial in x1..xn.

    ``terms`` maps packed monomial keys to nonzero coefficients.  Build from
    exponent tuples with :meth:`from_terms` or via the constructors below.
    """

    __slots__ = ("n", "ring", "terms", "_hash")

    def __init__(self, n: int, terms: Optional[Dict[int, object]] = None, ring: Ring = Ring.RAT, *, _clean: bool = False):
        if n < 1:
            raise ValueError("a polynomial needs at least one variable")
        self.n = n
        self.ring = Ring(ring)
        if terms is None:
            terms = {}
        elif not _clean:
            terms = {k: coerce_scalar(v, self.ring) for k, v in terms.items()}
            terms = {k: v for k, v in terms.items() if v}
        self.terms = terms
        self._hash = None

    # construction
    @classmethod
    def from_terms(cls, n: int, items: Mapping[Sequence[int], object] | Iterable[Tuple[Sequence[int], object]], ring: Ring = Ring.RAT) -> "Polynomial":
        if isinstance(items, Mapping):
            items = items.items()
        acc: Dict[int, object] = {}
        ring = Ring(ring)
        for exps, c in items:
            if len(exps) != n:
                raise ValueError(f"monomial {tuple(exps)} does not have {n} exponents")
            k = pack(exps)
            c = coerce_scalar(c, ring)
            acc[k] = acc[k] + c if k in acc else c
        return cls(n, {k: v for k, v in acc.items() if v}, ring, _clean=True)

    @classmethod
    def zero(cls, n: int, ring: Ring = Ring.RAT) -> "Polynomial":
        return cls(n, {}, ring, _clean=True)

    @classmethod
    def constant(cls, n: int, c, ring: Ring = Ring.RAT) -> "Polynomial":
        c = coerce_scalar(c, Ring(ring))
        return cls(n, {0: c} if c else {}, ring, _clean=True)

    @classmethod
    def var(cls, n: int, i: int, ring: Ring = Ring.RAT) -> "Polynomial":
        """The variable x_i (1-based)."""
        if not 1 <= i <= n:
            raise ValueError(f"variable x{i} out of range for n={n}")
        return cls(n, {1 << _shift(n, i - 1): coerce_scalar(1, Ring(ring))}, ring, _clean=True)

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1, ring: Ring = Ring.RAT) -> "Polynomial":
        return cls.from_terms(len(exps), [(exps, c)], ring)

    # inspection
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def items(self) -> Iterator[Tuple[Monomial, object]]:
        """(exponent tuple, coefficient) pairs in descending graded-lex order."""
        n = self.n
        for k in self.sorted_keys():
            yield unpack(k, n), self.terms[k]

    def as_dict(self) -> Dict[Monomial, object]:
        n = self.n
        return {unpack(k, n): c for k, c in self.terms.items()}

    def sorted_keys(self) -> List[int]:
        return sorted(self.terms, key=lambda k: (key_degree(k), k), reverse=True)

    def coefficient(self, exps: Sequence[int]):
        return self.terms.get(pack(exps), _ZERO[self.ring])

    def degrees(self) -> set:
        return {key_degree(k) for k in self.terms}

    def total_degree(self) -> Optional[int]:
        """Maximal total degree, or ``None`` for the zero polynomial."""
        if not self.terms:
            return None
        return max(key_degree(k) for k in self.terms)

    def homogeneous_degree(self) -> Optional[int]:
        """Common degree of all terms; ``None`` for zero; raises if inhomogeneous."""
        degs = self.degrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise InhomogeneousError(f"polynomial mixes degrees {sorted(degs)}")
        return degs.pop()

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def homogeneous_component(self, d: int) -> "Polynomial":
        return Polynomial(self.n, {k: c for k, c in self.terms.items() if key_degree(k) == d}, self.ring, _clean=True)

    def variable_degree(self, i: int) -> int:
        s = _shift(self.n, i - 1)
        return max(((k >> s) & MASK for k in self.terms), default=0)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.n == other.n and self.terms == other.terms
        if not self.terms:
            try:
                return other == 0
            except Exception:
                return NotImplemented
        if set(self.terms) == {0}:
            return self.terms[0] == other
        return False

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    # ring conversion
    def to_ring(self, ring: Ring) -> "Polynomial":
        """Explicit promotion (RAT -> QPOLY -> QRAT) or exact demotion."""
        ring = Ring(ring)
        if ring is self.ring:
            return self
        return Polynomial(self.n, {k: coerce_scalar(c, ring) for k, c in self.terms.items()}, ring, _clean=True)

    def _check(self, other: "Polynomial"):
        if not isinstance(other, Polynomial):
            raise RingError(f"expected Polynomial, got {type(other).__name__}")
        if other.n != self.n:
            raise RingError(f"variable count mismatch: {self.n} vs {other.n}")
        if other.ring is not self.ring:
            raise RingError(f"coefficient ring mismatch: {self.ring.value} vs {other.ring.value}; promote explicitly")

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, Polynomial):
            return self + Polynomial.constant(self.n, other, self.ring)
        self._check(other)
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = dict(a)
        for k, c in b.items():
            if k in out:
                s = out[k] + c
                if s:
                    out[k] = s
                else:
                    del out[k]
            else:
                out[k] = c
        return Polynomial(self.n, out, self.ring, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.n, {k: -c for k, c in self.terms.items()}, self.ring, _clean=True)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            return self + (-coerce_scalar(other, self.ring))
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            if k in out:
                s = out[k] - c
                if s:
                    out[k] = s
                else:
                    del out[k]
            else:
                out[k] = -c
        return Polynomial(self.n, out, self.ring, _clean=True)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = coerce_scalar(c, self.ring)
        if not c:
            return Polynomial.zero(self.n, self.ring)
        out = {}
        for k, v in self.terms.items():
            p = v * c
            if p:
                out[k] = p
        return Polynomial(self.n, out, self.ring, _clean=True)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: Dict[int, object] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                v = get(k)
                out[k] = ca * cb if v is None else v + ca * cb
        return Polynomial(self.n, {k: v for k, v in out.items() if v}, self.ring, _clean=True)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative polynomial power")
        result = Polynomial.constant(self.n, 1, self.ring)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            return exact_divide(self, other)
        c = coerce_scalar(other, self.ring)
        if not c:
            raise ZeroDivisionError("division by zero scalar")
        inv = (QRatFunc(1) / c) if self.ring is not Ring.RAT else 1 / c
        if self.ring is Ring.QPOLY:
            inv = coerce_scalar(inv, Ring.QPOLY)
        return self.scale(inv)

    # calculus and actions
    def derivative(self, i: int, order: int = 1) -> "Polynomial":
        return partial_derivative(self, i, order)

    def permute(self, sigma: Sequence[int]) -> "Polynomial":
        return apply_permutation(self, sigma)

    def specialize(self, q0) -> "Polynomial":
        return specialize_q(self, q0)

    def map_coefficients(self, fn: Callable, ring: Optional[Ring] = None) -> "Polynomial":
        ring = self.ring if ring is None else Ring(ring)
        return Polynomial(self.n, {k: fn(c) for k, c in self.terms.items()}, ring)

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({self.n}, {format_polynomial(self)!r}, ring={self.ring.value})"


def poly_arith(a: Polynomial, b, op: str) -> Polynomial:
    """Dispatch ``add``/``sub``/``mul``/``scale`` (``b`` is a scalar for scale)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        if not isinstance(b, Polynomial):
            raise RingError("mul expects a Polynomial; use scale for scalars")
        return a * b
    if op == "scale":
        return a.scale(b)
    raise ValueError(f"unknown operation {op!r}")


def falling(e: int, k: int) -> int:
    """e (e-1) ... (e-k+1)."""
    out = 1
    for j in range(k):
        out *= e - j
    return out


def partial_derivative(f: Polynomial, i: int, order: int = 1) -> Polynomial:
    """Iterated partial derivative d^order/dx_i^order (i is 1-based)."""
    if not 1 <= i <= f.n:
        raise ValueError(f"variable index {i} out of range 1..{f.n}")
    if order < 0:
        raise ValueError("derivative order must be non-negative")
    if order == 0:
        return f
    s = _shift(f.n, i - 1)
    step = order << s
    out = {}
    for k, c in f.terms.items():
        e = (k >> s) & MASK
        if e >= order:
            out[k - step] = c * falling(e, order)
    return Polynomial(f.n, out, f.ring, _clean=True)


def apply_permutation(f: Polynomial, sigma: Sequence[int]) -> Polynomial:
    """Substitute x_i -> x_{sigma(i)}; ``sigma`` lists 1-based images of 1..n.

    ``apply_permutation(apply_permutation(f, s), t) == apply_permutation(f, compose(s, t))``.
    """
    n = f.n
    if sorted(sigma) != list(range(1, n + 1)):
        raise ValueError(f"{tuple(sigma)} is not a permutation of 1..{n}")
    shifts = [(_shift(n, i), _shift(n, sigma[i] - 1)) for i in range(n)]
    out = {}
    for k, c in f.terms.items():
        nk = 0
        for src, dst in shifts:
            nk |= ((k >> src) & MASK) << dst
        out[nk] = c
    return Polynomial(n, out, f.ring, _clean=True)


def compose(sigma: Sequence[int], tau: Sequence[int]) -> Tuple[int, ...]:
    """The permutation "sigma first, then tau": i -> tau(sigma(i))."""
    return tuple(tau[s - 1] for s in sigma)


def transposition(n: int, i: int, j: int) -> Tuple[int, ...]:
    p = list(range(1, n + 1))
    p[i - 1], p[j - 1] = p[j - 1], p[i - 1]
    return tuple(p)


def specialize_q(f: Polynomial, q0) -> Polynomial:
    """Evaluate every q-coefficient at ``q0``; result is over RAT."""
    if f.ring is Ring.RAT:
        return f
    q0 = as_rational(q0)
    out = {}
    for k, c in f.terms.items():
        try:
            v = c(q0)
        except PoleError:
            raise PoleError(f"q0 = {format_rational(q0)} is a pole of coefficient {c}") from None
        if v:
            out[k] = v
    return Polynomial(f.n, out, Ring.RAT, _clean=True)


def monomial_basis(n: int, d: int) -> List[Monomial]:
    """All degree-d exponent vectors in n variables, descending graded-lex."""
    if d < 0:
        return []
    out = []
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out


def monomial_keys(n: int, d: int) -> List[int]:
    return [pack(e) for e in monomial_basis(n, d)]


def _leading_key(f: Polynomial) -> int:
    return max(f.terms)


def exact_divide(f: Polynomial, g: Polynomial) -> Polynomial:
    """h with f == g*h; raises NonExactDivision otherwise."""
    f._check(g)
    if not g.terms:
        raise ZeroDivisionError("division by the zero polynomial")
    if not f.terms:
        return f
    binom = _as_variable_difference(g)
    if binom is not None:
        return _divide_by_difference(f, *binom)
    n = f.n
    lg = _leading_key(g)
    lc = g.terms[lg]
    inv = 1 / lc if f.ring is not Ring.QRAT else QRatFunc(1) / lc
    inv = coerce_scalar(inv, f.ring) if f.ring is not Ring.QPOLY else None
    rem = dict(f.terms)
    quot: Dict[int, object] = {}
    lg_exps = unpack(lg, n)
    while rem:
        lr = max(rem)
        lr_exps = unpack(lr, n)
        if any(a < b for a, b in zip(lr_exps, lg_exps)):
            raise NonExactDivision(f"leading term of the remainder is not divisible by that of {g}")
        if f.ring is Ring.QPOLY:
            qc, r = rem[lr].divmod(lc)
            if r:
                raise NonExactDivision("coefficient division in Q[q] is not exact")
        else:
            qc = rem[lr] * inv
        qk = lr - lg
        quot[qk] = qc
        for k, c in g.terms.items():
            kk = k + qk
            v = rem.get(kk)
            v = -(c * qc) if v is None else v - c * qc
            if v:
                rem[kk] = v
            else:
                rem.pop(kk, None)
    return Polynomial(n, quot, f.ring, _clean=True)


def _as_variable_difference(g: Polynomial):
    """(i, j, scale) if g == scale*(x_i - x_j) with 0-based i<j, else None."""
    if len(g.terms) != 2:
        return None
    (k1, c1), (k2, c2) = sorted(g.terms.items(), reverse=True)
    if c1 != -c2:
        return None
    bits = []
    for k in (k1, k2):
        if k == 0 or (k & (k - 1)) or (k.bit_length() - 1) % FIELD:
            return None
        bits.append(k.bit_length() - 1)
    n = g.n
    i = n - 1 - bits[0] // FIELD
    j = n - 1 - bits[1] // FIELD
    return i, j, c1


def _divide_by_difference(f: Polynomial, i: int, j: int, scale) -> Polynomial:
    """Synthetic division of f by scale*(x_i - x_j), in x_i over Q[x_j]."""
    n = f.n
    si, sj = _shift(n, i), _shift(n, j)
    one_i, one_j = 1 << si, 1 << sj
    groups: Dict[int, Dict[int, Dict[int, object]]] = {}
    for k, c in f.terms.items():
        a = (k >> si) & MASK
        b = (k >> sj) & MASK
        base = k - a * one_i - b * one_j
        groups.setdefault(base, {}).setdefault(a, {})[b] = c
    quot: Dict[int, object] = {}
    for base, by_a in groups.items():
        carry: Dict[int, object] = {}
        for a in range(max(by_a), 0, -1):
            cur = dict(carry)
            for b, c in by_a.get(a, {}).items():
                cur[b] = cur[b] + c if b in cur else c
            cur = {b: v for b, v in cur.items() if v}
            for b, v in cur.items():
                quot[base + (a - 1) * one_i + b * one_j] = v
            carry = {b + 1: v for b, v in cur.items()}
        for b, c in by_a.get(0, {}).items():
            carry[b] = carry[b] + c if b in carry else c
        if any(v for v in carry.values()):
            raise NonExactDivision(f"not divisible by x{i + 1} - x{j + 1}")
    q = Polynomial(n, quot, f.ring, _clean=True)
    if scale != 1:
        q = q / scale
    return q


# ---------------------------------------------------------------- text format

def _format_coeff_body(c, ring: Ring) -> Tuple[bool, str]:
    """(negative, body) for a coefficient; body '' means magnitude one."""
    if ring is Ring.RAT or (isinstance(c, QUniPoly) and c.is_constant()) or (
        isinstance(c, QRatFunc) and c.is_constant()
    ):
        r = coerce_scalar(c, Ring.RAT)
        return r < 0, ("" if abs(r) == 1 else format_rational(abs(r)))
    text = format_qpoly(c) if isinstance(c, QUniPoly) else format_qratfunc(c)
    return False, "(" + text.replace(" ", "") + ")"


def format_polynomial(f: Polynomial) -> str:
    if not f.terms:
        return "0"
    parts = []
    for exps, c in f.items():
        neg, body = _format_coeff_body(c, f.ring)
        mono = "*".join(
            f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(exps) if e
        )
        if body and mono:
            term = f"{body}*{mono}"
        elif mono:
            term = mono
        else:
            term = body or "1"
        if not parts:
            parts.append(("-" if neg else "") + term)
        else:
            parts.append((" - " if neg else " + ") + term)
    return "".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|(x)(\d+)|(q)|([-+*/^()]))")


class PolynomialSyntaxError(ValueError):
    pass


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolynomialSyntaxError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        num, _, var, q, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif var is not None:
            out.append(("var", int(var)))
        elif q is not None:
            out.append(("q", None))
        else:
            out.append(("op", op))
        pos = m.end()
    return out


class _Parser:
    """Precedence-climbing parser evaluating into QRAT polynomials."""

    def __init__(self, tokens, n: int):
        self.toks = tokens
        self.i = 0
        self.n = n

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (val and tok[1] != val):
            raise PolynomialSyntaxError(f"expected {val or kind}, got {tok}")
        self.i += 1
        return tok

    def expr(self):
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.power()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.power()
            if op == "*":
                acc = acc * rhs
            else:
                if rhs.total_degree() not in (None, 0):
                    raise PolynomialSyntaxError("division by a polynomial in x is not allowed")
                if not rhs:
                    raise PolynomialSyntaxError("division by zero")
                acc = acc.scale(QRatFunc(1) / rhs.terms[0])
        return acc

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            e = self.take("num")[1]
            base = base ** e
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return Polynomial.constant(self.n, val, Ring.QRAT)
        if kind == "var":
            self.take()
            if not 1 <= val <= self.n:
                raise PolynomialSyntaxError(f"x{val} out of range for n={self.n}")
            return Polynomial.var(self.n, val, Ring.QRAT)
        if kind == "q":
            self.take()
            return Polynomial.constant(self.n, QRatFunc.q(), Ring.QRAT)
        if (kind, val) == ("op", "("):
            self.take()
            inner = self.expr()
            self.take("op", ")")
            return inner
        if (kind, val) == ("op", "-"):
            self.take()
            return -self.atom()
        raise PolynomialSyntaxError(f"unexpected token {val or kind}")


def parse_polynomial(text: str, n: Optional[int] = None, ring: Optional[Ring] = None) -> Polynomial:
    """Parse the text format produced by :func:`format_polynomial`.

    ``n`` defaults to the largest variable index present (at least 1); ``ring``
    defaults to the smallest ring that holds every coefficient.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise PolynomialSyntaxError("empty polynomial text")
    if n is None:
        n = max([v for k, v in tokens if k == "var"], default=1)
    p = _Parser(tokens, n)
    f = p.expr()
    if p.i != len(tokens):
        raise PolynomialSyntaxError(f"trailing input at token {p.i}")
    if ring is None:
        coeffs = list(f.terms.values())
        if all(c.is_constant() for c in coeffs):
            ring = Ring.RAT
        elif all(c.is_polynomial() for c in coeffs):
            ring = Ring.QPOLY
        else:
            ring = Ring.QRAT
    return f.to_ring(ring)


def binomial(a: int, b: int) -> int:
    """C(a, b), zero outside 0 <= b <= a."""
    if b < 0 or a < 0 or b > a:
        return 0
    return math.comb(a, b)
