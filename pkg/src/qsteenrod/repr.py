"""Partitions, standard tableaux, cocharge and symmetric-group characters."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

Partition = Tuple[int, ...]


def partitions(d: int, max_part: Optional[int] = None) -> List[Partition]:
    """All partitions of d in reverse-lex order, optionally with parts bounded by max_part."""
    if d < 0:
        raise ValueError("d must be non-negative")
    top = d if max_part is None else min(d, max_part)
    return list(_partitions(d, top))


@lru_cache(maxsize=None)
def _partitions(d: int, top: int) -> Tuple[Partition, ...]:
    if d == 0:
        return ((),)
    out = []
    for p in range(min(d, top), 0, -1):
        out.extend((p,) + rest for rest in _partitions(d - p, p))
    return tuple(out)


def conjugate(lam: Sequence[int]) -> Partition:
    lam = tuple(lam)
    return tuple(sum(1 for r in lam if r > i) for i in range(lam[0] if lam else 0))


def hook_length_count(lam: Sequence[int]) -> int:
    """f^lambda by the hook length formula."""
    lam = tuple(lam)
    conj = conjugate(lam)
    prod = 1
    for i, r in enumerate(lam):
        for j in range(r):
            prod *= (r - j - 1) + (conj[j] - i - 1) + 1
    return factorial(sum(lam)) // prod


@dataclass(frozen=True)
class StandardTableau:
    shape: Partition
    rows: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if tuple(len(r) for r in self.rows) != tuple(self.shape):
            raise ValueError("rows do not match the shape")
        n = sum(self.shape)
        if sorted(x for r in self.rows for x in r) != list(range(1, n + 1)):
            raise ValueError("entries must be 1..n")
        for r in self.rows:
            if any(a >= b for a, b in zip(r, r[1:])):
                raise ValueError("rows must increase")
        for upper, lower in zip(self.rows, self.rows[1:]):
            if any(lower[j] <= upper[j] for j in range(len(lower))):
                raise ValueError("columns must increase")

    @property
    def size(self) -> int:
        return sum(self.shape)

    def reading_word(self) -> List[int]:
        """Rows read left to right, from the bottom row up."""
        return [x for r in reversed(self.rows) for x in r]


def standard_tableaux(lam: Sequence[int]) -> List[StandardTableau]:
    lam = tuple(lam)
    n = sum(lam)
    out: List[StandardTableau] = []
    rows: List[List[int]] = [[] for _ in lam]

    def place(k: int) -> None:
        if k > n:
            out.append(StandardTableau(lam, tuple(tuple(r) for r in rows)))
            return
        for i, r in enumerate(rows):
            if len(r) < lam[i] and (i == 0 or len(rows[i - 1]) > len(r)):
                r.append(k)
                place(k + 1)
                r.pop()

    place(1)
    return out


def charge_of_word(word: Sequence[int]) -> int:
    """Charge of a standard word: 1 has index 0 and k+1 gains one when it sits right of k."""
    pos = {x: i for i, x in enumerate(word)}
    idx = 0
    total = 0
    for k in range(2, len(word) + 1):
        if pos[k] > pos[k - 1]:
            idx += 1
        total += idx
    return total


def charge(T: StandardTableau) -> int:
    return charge_of_word(T.reading_word())


def cocharge(T: StandardTableau) -> int:
    n = T.size
    return n * (n - 1) // 2 - charge(T)


def cocharge_generating(lam: Sequence[int]) -> List[int]:
    """Coefficients of sum_{T in ST(lam)} t^{co(T)}."""
    n = sum(lam)
    out = [0] * (n * (n - 1) // 2 + 1)
    for T in standard_tableaux(lam):
        out[cocharge(T)] += 1
    return out


def cocharge_frobenius(n: int) -> Dict[int, Dict[Partition, int]]:
    """F_n(t) = sum_lam s_lam sum_T t^{co(T)}, as degree -> {lam: multiplicity}."""
    out: Dict[int, Dict[Partition, int]] = {}
    for lam in partitions(n):
        for d, m in enumerate(cocharge_generating(lam)):
            if m:
                out.setdefault(d, {})[lam] = m
    return out


# ------------------------------------------------------------------ characters

def z_mu(mu: Sequence[int]) -> int:
    out = 1
    for part, mult in Counter(mu).items():
        out *= part ** mult * factorial(mult)
    return out


def class_size(mu: Sequence[int]) -> int:
    return factorial(sum(mu)) // z_mu(mu)


def mn_character(lam: Sequence[int], mu: Sequence[int]) -> int:
    """chi^lam(mu) by Murnaghan-Nakayama on beta-sets."""
    lam, mu = tuple(lam), tuple(mu)
    if sum(lam) != sum(mu):
        raise ValueError("lambda and mu must have the same size")
    L = len(lam)
    beta = frozenset(lam[i] + (L - 1 - i) for i in range(L))
    return _mn(beta, tuple(sorted(mu, reverse=True)))


@lru_cache(maxsize=None)
def _mn(beta: frozenset, mu: Tuple[int, ...]) -> int:
    if not mu:
        return 1
    r, rest = mu[0], mu[1:]
    total = 0
    for b in beta:
        t = b - r
        if t >= 0 and t not in beta:
            height = sum(1 for x in beta if t < x < b)
            total += (-1) ** height * _mn((beta - {b}) | {t}, rest)
    return total


def cycle_type(perm: Sequence[int]) -> Partition:
    """Cycle type of a 0-based permutation given as an image list."""
    seen = [False] * len(perm)
    out = []
    for i in range(len(perm)):
        if not seen[i]:
            length = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            out.append(length)
    return tuple(sorted(out, reverse=True))


def representative(mu: Sequence[int]) -> List[int]:
    """A 0-based permutation of cycle type mu, cycles on consecutive blocks."""
    perm = []
    start = 0
    for part in mu:
        perm.extend(start + (j + 1) % part for j in range(part))
        start += part
    return perm
