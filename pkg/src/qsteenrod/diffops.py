"""The differential and divided-difference operators acting on polynomials.

Operators act on all variables x1..xn unless an explicit variable subset is
given; restricting to a subset is how the identities stated for e_k(x2..xn)
are reproduced.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Optional, Sequence, Tuple, Union

from gmpy2 import mpq

from .poly import (
    MASK,
    NonExactDivision,
    Polynomial,
    Ring,
    _shift,
    apply_permutation,
    exact_divide,
    falling,
    partial_derivative,
    transposition,
)
from .qfield import QUniPoly, as_rational, format_rational

GENERIC = "generic"

QValue = Union[str, mpq, None]


class Family(str, Enum):
    NABLA = "nabla"
    DTILDE = "dtilde"
    DQ = "dq"
    NABLA1_OMIT = "nabla1-omit"
    P1 = "p1"
    P2 = "p2"
    Q2 = "q2"
    PTILDE2 = "ptilde2"


class NotSymmetricError(ValueError):
    """A divided-difference operator was applied to a non-symmetric input."""


def normalize_q(q) -> QValue:
    """``"generic"`` stays a tag; anything else becomes an exact rational."""
    if q is None:
        return None
    if isinstance(q, str) and q.strip().lower() == GENERIC:
        return GENERIC
    return as_rational(q)


@dataclass(frozen=True)
class OperatorSpec:
    family: Family
    k: Optional[int] = None
    omit: Optional[int] = None
    q: QValue = None
    variables: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "q", normalize_q(self.q))
        fam = self.family
        if fam in (Family.NABLA, Family.DTILDE, Family.DQ):
            if self.k is None or self.k < 1:
                raise ValueError(f"{fam.value} needs an index k >= 1")
        if fam is Family.DQ and self.q is None:
            raise ValueError("dq needs a value of q (rational or 'generic')")
        if fam is Family.NABLA1_OMIT and (self.omit is None or self.omit < 1):
            raise ValueError("nabla1-omit needs a variable index >= 1")
        if self.variables is not None:
            object.__setattr__(self, "variables", tuple(sorted(self.variables)))

    def __str__(self):
        fam = self.family
        if fam is Family.DQ:
            q = self.q if self.q == GENERIC else format_rational(self.q)
            return f"dq:{self.k}@q={q}"
        if fam in (Family.NABLA, Family.DTILDE):
            return f"{fam.value}:{self.k}"
        if fam is Family.NABLA1_OMIT:
            return f"nabla1-omit:{self.omit}"
        return fam.value


_SPEC_RE = re.compile(r"^(nabla|dtilde|dq|nabla1-omit|p1|p2|q2|ptilde2)(?::(\d+))?(?:@q=(\S+))?$")


def parse_operator(text: str) -> OperatorSpec:
    m = _SPEC_RE.match(text.strip().lower())
    if not m:
        raise ValueError(f"bad operator spec {text!r}")
    fam, idx, q = m.groups()
    fam = Family(fam)
    if fam is Family.NABLA1_OMIT:
        return OperatorSpec(fam, omit=int(idx) if idx else None)
    if fam in (Family.NABLA, Family.DTILDE, Family.DQ):
        if idx is None:
            raise ValueError(f"{fam.value} needs an index, e.g. {fam.value}:1")
        return OperatorSpec(fam, k=int(idx), q=q)
    if idx is not None or q is not None:
        raise ValueError(f"{fam.value} takes no parameters")
    return OperatorSpec(fam)


def _vars(f: Polynomial, variables) -> Sequence[int]:
    if variables is None:
        return range(1, f.n + 1)
    for v in variables:
        if not 1 <= v <= f.n:
            raise ValueError(f"variable x{v} out of range for n={f.n}")
    return variables


def nabla(f: Polynomial, k: int, variables=None) -> Polynomial:
    """sum_i d^k/dx_i^k."""
    return _diagonal(f, k, 0, variables)


def dtilde(f: Polynomial, k: int, variables=None) -> Polynomial:
    """sum_i x_i d^(k+1)/dx_i^(k+1)."""
    return _diagonal(f, k + 1, 1, variables)


def _diagonal(f: Polynomial, order: int, mult: int, variables) -> Polynomial:
    # sum_i x_i^mult * d^order/dx_i^order, done in one pass over the terms
    n = f.n
    out = {}
    get = out.get
    for i in _vars(f, variables):
        s = _shift(n, i - 1)
        drop = (order - mult) << s
        for key, c in f.terms.items():
            e = (key >> s) & MASK
            if e >= order:
                nk = key - drop
                v = get(nk)
                t = c * falling(e, order)
                out[nk] = t if v is None else v + t
    return Polynomial(n, {k: v for k, v in out.items() if v}, f.ring, _clean=True)


def dq(f: Polynomial, k: int, q) -> Polynomial:
    """D_{k;q} = q*dtilde_k + nabla_k.

    A generic q promotes RAT input to Q[q]; q is never inverted.
    """
    q = normalize_q(q)
    if q == GENERIC:
        if f.ring is Ring.RAT:
            f = f.to_ring(Ring.QPOLY)
        return dtilde(f, k).scale(QUniPoly.q()) + nabla(f, k)
    if q == 0:
        return nabla(f, k)
    return dtilde(f, k).scale(q) + nabla(f, k)


def nabla1_omit(f: Polynomial, j: int) -> Polynomial:
    """sum of d/dx_i over i != j."""
    return nabla(f, 1, [i for i in range(1, f.n + 1) if i != j])


def is_symmetric(f: Polynomial, variables=None) -> bool:
    """Symmetry under the adjacent transpositions of ``variables``."""
    vs = list(_vars(f, variables))
    for a, b in zip(vs, vs[1:]):
        if apply_permutation(f, transposition(f.n, a, b)) != f:
            return False
    return True


def _require_symmetric(f: Polynomial, variables, name: str):
    if not is_symmetric(f, variables):
        raise NotSymmetricError(f"{name} needs an input symmetric in its variables")


def _difference(f: Polynomial, i: int, j: int) -> Polynomial:
    return Polynomial.var(f.n, i, f.ring) - Polynomial.var(f.n, j, f.ring)


def _x_times(f: Polynomial, i: int, g: Polynomial) -> Polynomial:
    s = _shift(f.n, i - 1)
    return Polynomial(g.n, {k + (1 << s): c for k, c in g.terms.items()}, g.ring, _clean=True)


def p1(f: Polynomial, variables=None, check: bool = True) -> Polynomial:
    """sum_{i<j} (x_i d_i - x_j d_j) / (x_i - x_j)."""
    vs = list(_vars(f, variables))
    if check:
        _require_symmetric(f, vs, "P1")
    xd = {i: _x_times(f, i, partial_derivative(f, i)) for i in vs}
    out = Polynomial.zero(f.n, f.ring)
    for i, j in combinations(vs, 2):
        out = out + exact_divide(xd[i] - xd[j], _difference(f, i, j))
    return out


def p2(f: Polynomial, variables=None, check: bool = True) -> Polynomial:
    """sum_{i<j} (d_i - d_j) / (x_i - x_j)."""
    vs = list(_vars(f, variables))
    if check:
        _require_symmetric(f, vs, "P2")
    d = {i: partial_derivative(f, i) for i in vs}
    out = Polynomial.zero(f.n, f.ring)
    for i, j in combinations(vs, 2):
        out = out + exact_divide(d[i] - d[j], _difference(f, i, j))
    return out


def ptilde2(f: Polynomial, variables=None) -> Polynomial:
    """sum_{i<j} (x_i d_i^2 - x_j d_j^2) / (x_i - x_j)."""
    vs = list(_vars(f, variables))
    xd2 = {i: _x_times(f, i, partial_derivative(f, i, 2)) for i in vs}
    out = Polynomial.zero(f.n, f.ring)
    for i, j in combinations(vs, 2):
        out = out + exact_divide(xd2[i] - xd2[j], _difference(f, i, j))
    return out


def q2(f: Polynomial, variables=None) -> Polynomial:
    """sum_j sum_{i<k, i,k != j} x_j d_j / ((x_j - x_i)(x_j - x_k)).

    The three summands of each triple a<b<c share the denominator
    (x_a-x_b)(x_a-x_c)(x_b-x_c); each triple is divided exactly.
    """
    vs = list(_vars(f, variables))
    xd = {i: _x_times(f, i, partial_derivative(f, i)) for i in vs}
    x = {i: Polynomial.var(f.n, i, f.ring) for i in vs}
    out = Polynomial.zero(f.n, f.ring)
    for a, b, c in combinations(vs, 3):
        num = xd[a] * (x[b] - x[c]) - xd[b] * (x[a] - x[c]) + xd[c] * (x[a] - x[b])
        if not num:
            continue
        q = exact_divide(num, x[a] - x[b])
        q = exact_divide(q, x[a] - x[c])
        out = out + exact_divide(q, x[b] - x[c])
    return out


def apply(op: OperatorSpec, f: Polynomial) -> Polynomial:
    fam = op.family
    if op.variables is not None and fam in (Family.DQ, Family.NABLA1_OMIT):
        raise ValueError(f"{fam.value} always acts on all variables")
    if fam is Family.NABLA:
        return nabla(f, op.k, op.variables)
    if fam is Family.DTILDE:
        return dtilde(f, op.k, op.variables)
    if fam is Family.DQ:
        return dq(f, op.k, op.q)
    if fam is Family.NABLA1_OMIT:
        if op.omit > f.n:
            raise ValueError(f"omitted variable x{op.omit} out of range for n={f.n}")
        return nabla1_omit(f, op.omit)
    if fam is Family.P1:
        return p1(f, op.variables)
    if fam is Family.P2:
        return p2(f, op.variables)
    if fam is Family.Q2:
        return q2(f, op.variables)
    if fam is Family.PTILDE2:
        return ptilde2(f, op.variables)
    raise ValueError(f"unknown family {fam}")


def commutator_defect(k: int, h: int, q, f: Polynomial) -> Polynomial:
    """[D_k, D_h] f - q (k - h) D_{k+h} f; identically zero."""
    if k == h:
        raise ValueError("commutator_defect needs k != h")
    q = normalize_q(q)
    if q == GENERIC and f.ring is Ring.RAT:
        f = f.to_ring(Ring.QPOLY)
    lhs = dq(dq(f, h, q), k, q) - dq(dq(f, k, q), h, q)
    rhs = dq(f, k + h, q).scale((QUniPoly.q() if q == GENERIC else q) * (k - h))
    return lhs - rhs


def leibniz_defect(op: OperatorSpec, f: Polynomial, g: Polynomial) -> Polynomial:
    """Second-order Leibniz rule defect for nabla_2 or dtilde_1; identically zero."""
    f._check(g)
    n = f.n
    cross = Polynomial.zero(n, f.ring)
    if op.family is Family.NABLA and op.k == 2:
        for i in range(1, n + 1):
            cross = cross + partial_derivative(f, i) * partial_derivative(g, i)
    elif op.family is Family.DTILDE and op.k == 1:
        for i in range(1, n + 1):
            cross = cross + _x_times(f, i, partial_derivative(f, i) * partial_derivative(g, i))
    else:
        raise ValueError("leibniz_defect covers nabla:2 and dtilde:1 only")
    return apply(op, f * g) - apply(op, f) * g - f * apply(op, g) - cross.scale(2)


def conjugated_apply(op: OperatorSpec, g: Polynomial, variables=None) -> Polynomial:
    """(1/Delta) op (Delta g) for symmetric g, via the divided-difference operators."""
    vs = op.variables if op.variables is not None else variables
    if not is_symmetric(g, vs):
        raise NotSymmetricError("conjugated_apply needs a symmetric polynomial")
    fam, k = op.family, op.k
    if fam is Family.NABLA and k == 1:
        return nabla(g, 1, vs)
    if fam is Family.NABLA and k == 2:
        return nabla(g, 2, vs) + p2(g, vs, check=False).scale(2)
    if fam is Family.DTILDE and k == 1:
        return p1(g, vs, check=False).scale(2) + dtilde(g, 1, vs)
    if fam is Family.DTILDE and k == 2:
        return q2(g, vs).scale(6) + ptilde2(g, vs).scale(3) + dtilde(g, 2, vs)
    raise ValueError("conjugated_apply covers nabla:1, nabla:2, dtilde:1, dtilde:2")
