"""Matrices of nabla_k, Dtilde_k and D_{k;q} on homogeneous monomial bases.

Both operators send x^e to multiples of x^{e - k v_i}:
    nabla_k    : falling(e_i, k)
    Dtilde_k   : falling(e_i, k) (e_i - k)
so D_{k;q} x^e = sum_i falling(e_i, k) (1 + q (e_i - k)) x^{e - k v_i}.
Entries are stored as pairs (a, b) meaning a + b q and specialised by callers.
"""
from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

from .poly import MASK, Polynomial, _shift, falling, monomial_keys

Pair = Tuple[int, int]


def monomial_image(n: int, key: int, k: int) -> Dict[int, Pair]:
    """D_{k;q} x^key as {target key: (nabla part, Dtilde part)}."""
    out = {}
    for i in range(n):
        s = _shift(n, i)
        e = (key >> s) & MASK
        if e >= k:
            f = falling(e, k)
            out[key - (k << s)] = (f, f * (e - k))
    return out


def operator_blocks(n: int, d: int, ks: Sequence[int]):
    """Column keys of degree d and, per k, the row keys of degree d-k plus row dicts of pairs.

    Rows are indexed by target monomials in descending graded-lex order and
    the blocks are stacked in the order of ``ks``.
    """
    cols = monomial_keys(n, d)
    blocks = []
    for k in ks:
        targets = monomial_keys(n, d - k)
        tindex = {t: r for r, t in enumerate(targets)}
        rows: List[Dict[int, Pair]] = [dict() for _ in targets]
        for c, key in enumerate(cols):
            for t, pair in monomial_image(n, key, k).items():
                rows[tindex[t]][c] = pair
        blocks.append((k, targets, rows))
    return cols, blocks


def coefficient_vector(f: Polynomial, keys: Sequence[int]) -> List:
    return [f.terms.get(k, 0) for k in keys]


def polynomial_from_vector(n: int, keys: Sequence[int], vec, ring) -> Polynomial:
    if isinstance(vec, dict):
        terms = {keys[c]: v for c, v in vec.items()}
    else:
        terms = {k: v for k, v in zip(keys, vec)}
    return Polynomial(n, terms, ring)
