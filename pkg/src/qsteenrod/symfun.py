"""Elementary symmetric polynomials, Vandermonde determinants and the
closed-form action catalog for nabla_1, nabla_2, P1, P2, Q2, Ptilde_2,
Dtilde_1 and Dtilde_2 on products of elementaries.

Formulas use the convention where ``N`` is the number of variables the
elementaries live in.  For elementaries in a subset S of the ring's
variables the operators are restricted to S and ``N = |S|``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .diffops import Family, OperatorSpec, apply, dtilde, nabla, p1, p2, ptilde2, q2
from .poly import Polynomial, Ring, binomial, pack

Partition = Tuple[int, ...]


def as_partition(parts: Sequence[int]) -> Partition:
    parts = tuple(int(p) for p in parts)
    if any(p <= 0 for p in parts):
        raise ValueError(f"partition parts must be positive: {parts}")
    if any(a < b for a, b in zip(parts, parts[1:])):
        raise ValueError(f"partition parts must be weakly decreasing: {parts}")
    return parts


@dataclass(frozen=True)
class VarSubset:
    n_vars: int
    members: Tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(set(self.members)))
        if any(not 1 <= m <= self.n_vars for m in members):
            raise ValueError(f"members {members} not inside 1..{self.n_vars}")
        object.__setattr__(self, "members", members)

    @classmethod
    def all(cls, n: int) -> "VarSubset":
        return cls(n, tuple(range(1, n + 1)))

    @classmethod
    def tail(cls, n: int) -> "VarSubset":
        """x2..xn, the variables of the reduced constructions."""
        return cls(n, tuple(range(2, n + 1)))

    def __len__(self):
        return len(self.members)

    def without(self, *drop: int) -> "VarSubset":
        return VarSubset(self.n_vars, tuple(m for m in self.members if m not in drop))


def _subset(S, n: Optional[int] = None) -> VarSubset:
    if isinstance(S, VarSubset):
        return S
    if isinstance(S, int):
        return VarSubset.all(S)
    if n is None:
        raise ValueError("a bare member list needs n_vars")
    return VarSubset(n, tuple(S))


@lru_cache(maxsize=4096)
def _elementary(k: int, n: int, members: Tuple[int, ...]) -> Polynomial:
    if k < 0 or k > len(members):
        return Polynomial.zero(n)
    terms = {}
    for combo in combinations(members, k):
        e = [0] * n
        for m in combo:
            e[m - 1] = 1
        terms[pack(e)] = 1
    return Polynomial(n, terms, Ring.RAT)


def elementary(k: int, S) -> Polynomial:
    """e_k in the variables of S; zero for k < 0 or k > |S|, one for k = 0."""
    S = _subset(S)
    return _elementary(k, S.n_vars, S.members)


@lru_cache(maxsize=256)
def _vandermonde(n: int, members: Tuple[int, ...]) -> Polynomial:
    out = Polynomial.constant(n, 1)
    for a, b in combinations(members, 2):
        out = out * (Polynomial.var(n, a) - Polynomial.var(n, b))
    return out


def vandermonde(S) -> Polynomial:
    """prod_{i<j in S} (x_i - x_j)."""
    S = _subset(S)
    if not S.members:
        raise ValueError("Vandermonde of an empty variable set")
    return _vandermonde(S.n_vars, S.members)


@lru_cache(maxsize=4096)
def _e_product(parts: Tuple[int, ...], n: int, members: Tuple[int, ...]) -> Polynomial:
    if not parts:
        return Polynomial.constant(n, 1)
    if len(parts) == 1:
        return _elementary(parts[0], n, members)
    head = _e_product(parts[:-1], n, members)
    if not head:
        return head
    return head * _elementary(parts[-1], n, members)


def e_product(lam: Sequence[int], S) -> Polynomial:
    """prod_i e_{lam_i}(S).  Indices may be any integers (out-of-range factors vanish)."""
    S = _subset(S)
    parts = tuple(sorted((int(p) for p in lam), reverse=True))
    if any(p < 0 or p > len(S) for p in parts):
        return Polynomial.zero(S.n_vars)
    parts = tuple(p for p in parts if p)
    return _e_product(parts, S.n_vars, S.members)


class FormulaId(str, Enum):
    NABLA1_E = "NABLA1_E"
    NABLA2_EE = "NABLA2_EE"
    P2_E = "P2_E"
    P1_E = "P1_E"
    D1TILDE_EE = "D1TILDE_EE"
    Q2_E = "Q2_E"
    PTILDE2_EE = "PTILDE2_EE"
    D2TILDE_EEE = "D2TILDE_EEE"


ARITY = {
    FormulaId.NABLA1_E: 1,
    FormulaId.P2_E: 1,
    FormulaId.P1_E: 1,
    FormulaId.Q2_E: 1,
    FormulaId.NABLA2_EE: 2,
    FormulaId.D1TILDE_EE: 2,
    FormulaId.PTILDE2_EE: 2,
    FormulaId.D2TILDE_EEE: 3,
}

OPERATOR = {
    FormulaId.NABLA1_E: OperatorSpec(Family.NABLA, k=1),
    FormulaId.NABLA2_EE: OperatorSpec(Family.NABLA, k=2),
    FormulaId.P2_E: OperatorSpec(Family.P2),
    FormulaId.P1_E: OperatorSpec(Family.P1),
    FormulaId.D1TILDE_EE: OperatorSpec(Family.DTILDE, k=1),
    FormulaId.Q2_E: OperatorSpec(Family.Q2),
    FormulaId.PTILDE2_EE: OperatorSpec(Family.PTILDE2),
    FormulaId.D2TILDE_EEE: OperatorSpec(Family.DTILDE, k=2),
}


class ParamOrderError(ValueError):
    """Formula parameters violate k >= h >= l."""


class _Combo:
    """Accumulates sum of coeff * e_a e_b ... in a fixed variable subset."""

    def __init__(self, S: VarSubset):
        self.S = S
        self.acc: Dict[Tuple[int, ...], int] = {}

    def add(self, coeff: int, *idx: int):
        if coeff == 0 or any(i < 0 or i > len(self.S) for i in idx):
            return
        key = tuple(sorted(idx, reverse=True))
        self.acc[key] = self.acc.get(key, 0) + coeff

    def polynomial(self) -> Polynomial:
        out = Polynomial.zero(self.S.n_vars)
        for idx, c in self.acc.items():
            if c:
                out = out + e_product(idx, self.S).scale(c)
        return out


def _check_params(fid: FormulaId, params: Sequence[int]):
    if len(params) != ARITY[fid]:
        raise ValueError(f"{fid.value} takes {ARITY[fid]} parameter(s), got {len(params)}")
    if any(a < b for a, b in zip(params, params[1:])):
        raise ParamOrderError(f"{fid.value} needs weakly decreasing parameters, got {tuple(params)}")


def closed_form(fid, params: Sequence[int], n: int, subset: Optional[VarSubset] = None) -> Polynomial:
    """Right-hand side of catalog formula ``fid``, fully expanded."""
    fid = FormulaId(fid)
    params = tuple(int(p) for p in params)
    _check_params(fid, params)
    S = subset if subset is not None else VarSubset.all(n)
    N = len(S)
    out = _Combo(S)
    if fid is FormulaId.NABLA1_E:
        (k,) = params
        out.add(N - k + 1, k - 1)
    elif fid is FormulaId.P2_E:
        (k,) = params
        out.add(-binomial(N - k + 2, 2), k - 2)
    elif fid is FormulaId.P1_E:
        (k,) = params
        out.add(binomial(N - k + 1, 2), k - 1)
    elif fid is FormulaId.Q2_E:
        (k,) = params
        out.add(-binomial(N - k + 2, 3), k - 2)
    elif fid is FormulaId.NABLA2_EE:
        k, h = params
        out.add(2 * (N - k + 1), k - 1, h - 1)
        for i in range(1, h):
            out.add(-2 * (k - h + 2 * i), k + i - 1, h - i - 1)
    elif fid is FormulaId.D1TILDE_EE:
        k, h = params
        for i in range(h):
            out.add(2 * (k - h + 1 + 2 * i), k + i, h - 1 - i)
    elif fid is FormulaId.PTILDE2_EE:
        k, h = params
        out.add((N - k + 1) * (N - k), k - 1, h - 1)
        for i in range(1, h):
            out.add(-(2 * N - h - k + 1) * (k - h + 2 * i), k - 1 + i, h - 1 - i)
    elif fid is FormulaId.D2TILDE_EEE:
        k, h, l = params
        for j in range(l):
            for i in range(h):
                out.add(6 * (k - h + 1 + j + 2 * i), k + i + j, h - 1 - i, l - 1 - j)
        for j in range(l - 1):
            for i in range(1, l - j):
                out.add(-6 * (h - l + j + 2 * i), k + j, h - 1 + i, l - 1 - i - j)
    return out.polynomial()


def direct_form(fid, params: Sequence[int], n: int, subset: Optional[VarSubset] = None) -> Polynomial:
    """The catalog operator applied by brute force to the product of elementaries."""
    fid = FormulaId(fid)
    params = tuple(int(p) for p in params)
    _check_params(fid, params)
    S = subset if subset is not None else VarSubset.all(n)
    op = OPERATOR[fid]
    op = OperatorSpec(op.family, k=op.k, variables=S.members)
    return apply(op, e_product(params, S))


def catalog_params(fid, N: int) -> Iterator[Tuple[int, ...]]:
    """All weakly decreasing tuples of indices in 0..N of the formula's arity."""
    r = ARITY[FormulaId(fid)]

    def rec(prefix, top, left):
        if not left:
            yield tuple(prefix)
            return
        for v in range(top, -1, -1):
            yield from rec(prefix + [v], v, left - 1)

    yield from rec([], N, r)


@dataclass
class FormulaCheck:
    formula: FormulaId
    params: Tuple[int, ...]
    n: int
    passed: bool
    closed: Polynomial
    direct: Polynomial


def verify_formula(fid, params, n: int, subset: Optional[VarSubset] = None) -> FormulaCheck:
    c = closed_form(fid, params, n, subset)
    d = direct_form(fid, params, n, subset)
    return FormulaCheck(FormulaId(fid), tuple(params), n, c == d, c, d)


def verify_catalog(n: int, formulas: Optional[Sequence] = None, subset: Optional[VarSubset] = None) -> Dict[str, dict]:
    """Sweep every parameter tuple of every formula; counts plus first counterexample."""
    S = subset if subset is not None else VarSubset.all(n)
    ids = [FormulaId(f) for f in formulas] if formulas else list(FormulaId)
    report = {}
    for fid in ids:
        passed = failed = 0
        first = None
        for params in catalog_params(fid, len(S)):
            chk = verify_formula(fid, params, n, S)
            if chk.passed:
                passed += 1
            else:
                failed += 1
                if first is None:
                    first = {
                        "params": list(params),
                        "closed_form": str(chk.closed),
                        "direct": str(chk.direct),
                    }
        report[fid.value] = {"passed": passed, "failed": failed, "counterexample": first}
    return report


def nabla1_power_e(k: int, s: int, S) -> Polynomial:
    """(N-k+1)(N-k+2)...(N-k+s) e_{k-s}, the closed form of nabla_1^s e_k."""
    S = _subset(S)
    N = len(S)
    coeff = 1
    for j in range(1, s + 1):
        coeff *= N - k + j
    return elementary(k - s, S).scale(coeff)
