"""Exact sparse linear algebra over Q and over Q[q] / Q(q).

Rows are dicts ``{column: entry}``.  Column order is the pivot order, so
callers that number columns in graded-lex order get deterministic,
reproducible echelon forms.
"""
from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .qfield import QRatFunc, QUniPoly

Row = Dict[int, object]


class InconsistentSystem(ArithmeticError):
    pass


@dataclass
class Echelon:
    """Reduced row echelon form: ``rows[i]`` has leading 1 at ``pivots[i]``."""

    ncols: int
    pivots: List[int] = field(default_factory=list)
    rows: List[Row] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def free_columns(self) -> List[int]:
        piv = set(self.pivots)
        return [c for c in range(self.ncols) if c not in piv]


def _reduce_row(row: Row, pivot_rows: Dict[int, Row]) -> Optional[int]:
    """Eliminate pivot columns from ``row`` in increasing order, in place.

    Returns the leading column of what is left, or None if the row vanished.
    """
    heap = list(row)
    heapq.heapify(heap)
    seen = set(heap)
    while heap:
        c = heapq.heappop(heap)
        seen.discard(c)
        v = row.get(c)
        if not v:
            row.pop(c, None)
            continue
        prow = pivot_rows.get(c)
        if prow is None:
            return c
        del row[c]
        for cc, pv in prow.items():
            if cc == c:
                continue
            nv = row.get(cc)
            nv = -v * pv if nv is None else nv - v * pv
            if nv:
                row[cc] = nv
                if cc not in seen:
                    seen.add(cc)
                    heapq.heappush(heap, cc)
            else:
                row.pop(cc, None)
    return None


def rref(rows: Sequence[Row], ncols: int, stop_at_full_rank: bool = True) -> Echelon:
    """Exact reduced row echelon form over Q (entries mpq)."""
    pivot_rows: Dict[int, Row] = {}
    for r in rows:
        row = {c: v for c, v in r.items() if v}
        if not row:
            continue
        lead = _reduce_row(row, pivot_rows)
        if lead is None:
            continue
        inv = 1 / row[lead]
        if inv != 1:
            row = {c: v * inv for c, v in row.items()}
        pivot_rows[lead] = row
        if stop_at_full_rank and len(pivot_rows) == ncols:
            break
    # back substitution: clear each pivot column from the rows above it
    order = sorted(pivot_rows)
    for idx in range(len(order) - 1, -1, -1):
        p = order[idx]
        prow = pivot_rows[p]
        for other in order[:idx]:
            orow = pivot_rows[other]
            v = orow.get(p)
            if v:
                for cc, pv in prow.items():
                    nv = orow.get(cc, 0) - v * pv
                    if nv:
                        orow[cc] = nv
                    else:
                        orow.pop(cc, None)
    return Echelon(ncols, order, [pivot_rows[p] for p in order])


def rank(rows: Sequence[Row], ncols: int) -> int:
    pivot_rows: Dict[int, Row] = {}
    for r in rows:
        row = {c: v for c, v in r.items() if v}
        if not row:
            continue
        lead = _reduce_row(row, pivot_rows)
        if lead is None:
            continue
        inv = 1 / row[lead]
        pivot_rows[lead] = {c: v * inv for c, v in row.items()}
        if len(pivot_rows) == ncols:
            break
    return len(pivot_rows)


def kernel_from_rref(ech: Echelon) -> List[Row]:
    """Basis of the nullspace: one vector per free column, 1 there, 0 on other free columns."""
    basis = []
    for f in ech.free_columns():
        v = {f: mpq(1)}
        for p, row in zip(ech.pivots, ech.rows):
            x = row.get(f)
            if x:
                v[p] = -x
        basis.append(v)
    return basis


def nullspace(rows: Sequence[Row], ncols: int) -> Tuple[Echelon, List[Row]]:
    ech = rref(rows, ncols, stop_at_full_rank=False)
    return ech, kernel_from_rref(ech)


def solve(rows: Sequence[Row], rhs: Sequence, ncols: int) -> Tuple[Row, Echelon]:
    """A particular solution of A x = b with all free variables set to zero.

    Raises InconsistentSystem when b is not in the column span.
    """
    aug = []
    for r, b in zip(rows, rhs):
        row = dict(r)
        if b:
            row[ncols] = b
        aug.append(row)
    ech = rref(aug, ncols + 1, stop_at_full_rank=False)
    if ech.pivots and ech.pivots[-1] == ncols:
        raise InconsistentSystem("right-hand side is not in the column span")
    x = {}
    for p, row in zip(ech.pivots, ech.rows):
        v = row.get(ncols)
        if v:
            x[p] = v
    # rows of A alone
    a_ech = Echelon(ncols, ech.pivots, [{c: v for c, v in row.items() if c != ncols} for row in ech.rows])
    return x, a_ech


def matvec(rows: Sequence[Row], x: Row) -> List:
    out = []
    for r in rows:
        acc = 0
        for c, v in r.items():
            xv = x.get(c)
            if xv:
                acc = acc + v * xv
        out.append(acc)
    return out


# ------------------------------------------------------------ over Q[q]

def _poly_content_gcd(entries) -> QUniPoly:
    g = QUniPoly()
    for e in entries:
        g = e.monic() if g.is_zero() else g.gcd(e)
        if g.is_constant():
            return QUniPoly((1,))
    return g


def _primitive_row(row: Dict[int, QUniPoly]) -> Dict[int, QUniPoly]:
    """Divide a row by the gcd of its entries (over Q[q]) and clear rational content."""
    g = _poly_content_gcd(row.values())
    if not g.is_constant():
        row = {c: v.divmod(g)[0] for c, v in row.items()}
    # integer-primitive with the leading (smallest column) entry's sign positive
    num = 0
    den = 1
    import math

    for v in row.values():
        for x in v.coeffs:
            num = math.gcd(num, int(x.numerator))
            den = den * int(x.denominator) // math.gcd(den, int(x.denominator))
    scale = mpq(den, num) if num else mpq(1)
    lead = row[min(row)]
    if lead.leading() < 0:
        scale = -scale
    if scale != 1:
        row = {c: v * scale for c, v in row.items()}
    return row


def fraction_free_echelon(rows: Sequence[Dict[int, QUniPoly]], ncols: int) -> Tuple[List[int], Dict[int, Dict[int, QUniPoly]]]:
    """Row echelon form over Q[q] by cross-multiplication with content stripping.

    Pivot rows are primitive; no field division by a q-dependent entry occurs.
    """
    pivot_rows: Dict[int, Dict[int, QUniPoly]] = {}
    for r in rows:
        row = {c: v for c, v in r.items() if not v.is_zero()}
        while row:
            lead = min(row)
            prow = pivot_rows.get(lead)
            if prow is None:
                pivot_rows[lead] = _primitive_row(row)
                break
            p = prow[lead]
            a = row[lead]
            g = p.gcd(a)
            if not g.is_constant():
                p_red, a_red = p.divmod(g)[0], a.divmod(g)[0]
            else:
                p_red, a_red = p, a
            new = {}
            for c in set(row) | set(prow):
                if c == lead:
                    continue
                v = row.get(c, QUniPoly()) * p_red - prow.get(c, QUniPoly()) * a_red
                if not v.is_zero():
                    new[c] = v
            row = _primitive_row(new) if new else new
        if len(pivot_rows) == ncols:
            break
    order = sorted(pivot_rows)
    return order, pivot_rows


def kernel_over_qfield(rows: Sequence[Dict[int, QUniPoly]], ncols: int) -> Tuple[List[int], List[Dict[int, QRatFunc]]]:
    """Nullspace over Q(q), normalised to the identity on the free columns."""
    order, pivot_rows = fraction_free_echelon(rows, ncols)
    piv = set(order)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x: Dict[int, QRatFunc] = {f: QRatFunc(1)}
        for p in reversed(order):
            prow = pivot_rows[p]
            acc = QRatFunc(0)
            for c, v in prow.items():
                if c != p:
                    xv = x.get(c)
                    if xv is not None and xv:
                        acc = acc + xv * v
            if acc:
                x[p] = -acc / prow[p]
        basis.append({c: v for c, v in x.items() if v})
    return order, basis


def specialize_rows(rows: Sequence[Dict[int, QUniPoly]], q0) -> List[Row]:
    out = []
    for r in rows:
        row = {}
        for c, v in r.items():
            x = v(q0)
            if x:
                row[c] = x
        out.append(row)
    return out


def random_rational(rng: random.Random, bound: int = 10 ** 4) -> mpq:
    """Nonzero random rational with numerator and denominator up to ``bound``."""
    while True:
        num = rng.randint(-bound, bound)
        den = rng.randint(1, bound)
        if num:
            return mpq(num, den)
