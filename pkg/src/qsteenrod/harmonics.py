"""Graded q-harmonic spaces: kernels, Hilbert series, characters and the singular-value scan.

A polynomial is q-harmonic when D_{1;q} f = D_{2;q} f = 0; for q != 0 these two
generate every D_{k;q} through [D_k, D_h] = q (k - h) D_{k+h}.  At q = 0 that
generation fails, so the classical space is cut out by nabla_1..nabla_n.
"""
from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from math import factorial, gcd
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from . import linalg
from .diffops import GENERIC, dq
from .opmatrix import operator_blocks, polynomial_from_vector
from .poly import Polynomial, Ring, apply_permutation, transposition
from .qfield import QRatFunc, QUniPoly, as_rational, format_rational
from .repr import Partition, class_size, cocharge_frobenius, mn_character, partitions, representative
from .symfun import elementary, vandermonde

WORKERS_ENV = "QSTEENROD_WORKERS"


class Mode(str, Enum):
    GENERIC = "GENERIC"
    RATIONAL = "RATIONAL"


class TraceInconsistent(ArithmeticError):
    """A permuted kernel vector fell outside the kernel span."""


class NonIntegralMultiplicity(ArithmeticError):
    """A Schur multiplicity came out non-integral or negative."""


@dataclass(frozen=True)
class QSpec:
    mode: Mode
    value: Optional[mpq] = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.mode is Mode.RATIONAL:
            if self.value is None:
                raise ValueError("RATIONAL mode needs a value")
            object.__setattr__(self, "value", as_rational(self.value))
        elif self.value is not None:
            raise ValueError("GENERIC mode takes no value")

    @classmethod
    def generic(cls) -> "QSpec":
        return cls(Mode.GENERIC)

    @classmethod
    def rational(cls, value) -> "QSpec":
        return cls(Mode.RATIONAL, as_rational(value))

    @classmethod
    def parse(cls, text) -> "QSpec":
        if isinstance(text, QSpec):
            return text
        if isinstance(text, str) and text.strip().lower() == GENERIC:
            return cls.generic()
        return cls.rational(text)

    @property
    def is_generic(self) -> bool:
        return self.mode is Mode.GENERIC

    def label(self) -> str:
        return GENERIC if self.is_generic else format_rational(self.value)

    def dq_arg(self):
        return GENERIC if self.is_generic else self.value


@dataclass
class GradedSeries:
    dims: List[int]
    cutoff: int

    def total(self) -> int:
        return sum(self.dims)


@dataclass
class KernelBasis:
    n: int
    degree: int
    q: QSpec
    keys: List[int]
    free: List[int]
    coordinates: List[Dict[int, object]]
    basis: List[Polynomial] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.coordinates)


@dataclass
class SchurExpansion:
    n: int
    q: QSpec
    cutoff: int
    degrees: Dict[int, Dict[Partition, int]]


# ------------------------------------------------------------------ kernels

def _operator_ks(n: int, q: QSpec) -> Tuple[int, ...]:
    if not q.is_generic and q.value == 0:
        return tuple(range(1, n + 1))
    return (1, 2)


def _rational_rows(n: int, d: int, q0: mpq):
    cols, blocks = operator_blocks(n, d, _operator_ks(n, QSpec.rational(q0)))
    rows = []
    for _, _, brows in blocks:
        for r in brows:
            row = {c: a + b * q0 for c, (a, b) in r.items()}
            rows.append({c: mpq(v) for c, v in row.items() if v})
    return cols, rows


def _generic_rows(n: int, d: int):
    cols, blocks = operator_blocks(n, d, (1, 2))
    rows = []
    for _, _, brows in blocks:
        for r in brows:
            rows.append({c: QUniPoly((a, b)) for c, (a, b) in r.items() if a or b})
    return cols, rows


def kernel_basis(n: int, q, d: int, seed: int = 0) -> KernelBasis:
    """Exact basis of the degree-d q-harmonics, normalised to the identity on free monomials.

    In GENERIC mode the rank is taken over Q(q) by fraction-free elimination;
    a full rank at one random point already proves the kernel is zero.
    """
    if d < 0:
        raise ValueError("degree must be non-negative")
    q = QSpec.parse(q)
    if q.is_generic:
        cols, rows = _generic_rows(n, d)
        q0 = linalg.random_rational(random.Random(seed))
        if linalg.rank(linalg.specialize_rows(rows, q0), len(cols)) == len(cols):
            order, coords = list(range(len(cols))), []
        else:
            order, coords = linalg.kernel_over_qfield(rows, len(cols))
        ring = Ring.QRAT
    else:
        cols, rows = _rational_rows(n, d, q.value)
        ech, coords = linalg.nullspace(rows, len(cols))
        order = list(ech.pivots)
        ring = Ring.RAT
    pivots = set(order)
    free = [c for c in range(len(cols)) if c not in pivots]
    basis = [polynomial_from_vector(n, cols, v, ring) for v in coords]
    return KernelBasis(n, d, q, list(cols), free, coords, basis)


def _dim_worker(args) -> int:
    n, label, d, seed = args
    return kernel_basis(n, QSpec.parse(label), d, seed).dim


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def hilbert_series(n: int, q, D: int, seed: int = 0) -> GradedSeries:
    if D < 0:
        raise ValueError("cutoff must be non-negative")
    q = QSpec.parse(q)
    jobs = [(n, q.label(), d, seed) for d in range(D + 1)]
    w = _workers()
    if w > 1 and D > 0:
        with ProcessPoolExecutor(max_workers=w) as pool:
            dims = list(pool.map(_dim_worker, jobs))
    else:
        dims = [_dim_worker(j) for j in jobs]
    return GradedSeries(dims, D)


def t_factorial(n: int) -> GradedSeries:
    """Coefficients of prod_{k=1}^{n} (1 + t + ... + t^{k-1})."""
    if n < 1:
        raise ValueError("n must be positive")
    coeffs = [1]
    for k in range(2, n + 1):
        out = [0] * (len(coeffs) + k - 1)
        for i, c in enumerate(coeffs):
            for j in range(k):
                out[i + j] += c
        coeffs = out
    return GradedSeries(coeffs, len(coeffs) - 1)


def in_kernel_span(kb: KernelBasis, f: Polynomial) -> bool:
    """Exact membership of a homogeneous polynomial of degree kb.degree in the kernel span."""
    index = {k: c for c, k in enumerate(kb.keys)}
    if any(k not in index for k in f.terms):
        return False
    vec = {index[k]: v for k, v in f.terms.items()}
    return _express(kb, vec) is not None


def _express(kb: KernelBasis, vec: Dict[int, object]) -> Optional[List]:
    """Coordinates of vec in the basis, or None if vec is outside the span."""
    coords = [vec.get(fc, 0) for fc in kb.free]
    rest = dict(vec)
    for a, basis_vec in zip(coords, kb.coordinates):
        if not a:
            continue
        for c, v in basis_vec.items():
            rest[c] = rest.get(c, 0) - a * v
    if any(v for v in rest.values()):
        return None
    return coords


# ------------------------------------------------------------------ characters

def _permute_vector(kb: KernelBasis, vec: Dict[int, object], sigma: Sequence[int]) -> Dict[int, object]:
    ring = Ring.QRAT if kb.q.is_generic else Ring.RAT
    f = polynomial_from_vector(kb.n, kb.keys, vec, ring)
    g = apply_permutation(f, sigma)
    index = {k: c for c, k in enumerate(kb.keys)}
    return {index[k]: v for k, v in g.terms.items()}


def _trace(kb: KernelBasis, mu: Sequence[int]):
    sigma = [i + 1 for i in representative(mu)]
    total = 0
    for j, vec in enumerate(kb.coordinates):
        coords = _express(kb, _permute_vector(kb, vec, sigma))
        if coords is None:
            raise TraceInconsistent(f"permutation of type {tuple(mu)} leaves the kernel span")
        total = total + coords[j]
    return total


def _as_exact(v) -> mpq:
    if isinstance(v, QRatFunc):
        if not v.is_constant():
            raise TraceInconsistent("trace depends on q")
        return v.num.constant_term() / v.den.constant_term()
    return as_rational(v)


def character_trace(n: int, q, d: int, mu: Sequence[int], kb: Optional[KernelBasis] = None) -> mpq:
    """Trace of a permutation of cycle type mu on the degree-d harmonics."""
    if sum(mu) != n:
        raise ValueError("cycle type must be a partition of n")
    if kb is None:
        kb = kernel_basis(n, q, d)
    return _as_exact(_trace(kb, mu))


def schur_multiplicities(kb: KernelBasis) -> Dict[Partition, int]:
    n = kb.n
    if not kb.dim:
        return {}
    traces = {mu: _as_exact(_trace(kb, mu)) for mu in partitions(n)}
    out = {}
    for lam in partitions(n):
        m = sum(class_size(mu) * mn_character(lam, mu) * t for mu, t in traces.items()) / factorial(n)
        m = mpq(m)
        if m.denominator != 1 or m < 0:
            raise NonIntegralMultiplicity(f"multiplicity of {lam} is {m}")
        if m:
            out[lam] = int(m)
    return out


def frobenius(n: int, q, D: int) -> SchurExpansion:
    q = QSpec.parse(q)
    degrees = {}
    for d in range(D + 1):
        mult = schur_multiplicities(kernel_basis(n, q, d))
        if mult:
            degrees[d] = mult
    return SchurExpansion(n, q, D, degrees)


def classical_frobenius(n: int) -> Dict[int, Dict[Partition, int]]:
    """F_n(t) from cocharge."""
    return cocharge_frobenius(n)


# ------------------------------------------------------------------ special harmonics

@dataclass
class Certificate:
    q0: mpq
    witness: Polynomial
    degree: int
    annihilated: bool
    relations: Dict[str, bool]

    @property
    def passed(self) -> bool:
        return self.annihilated and all(self.relations.values())


def _qscale(f: Polynomial, coeffs) -> Polynomial:
    """f times the polynomial in q with the given coefficients, over Q[q]."""
    c = QUniPoly(coeffs)
    return f.map_coefficients(lambda v: c * v, Ring.QPOLY)


def _annihilated(f: Polynomial, q0) -> bool:
    return not dq(f, 1, q0) and not dq(f, 2, q0)


def delta_ek(n: int, k: int) -> Polynomial:
    return vandermonde(n) * elementary(k, n)


def special_harmonic_delta_ek(n: int, k: int) -> Certificate:
    """Δ e_k is harmonic at q0 = -1/(n-k).

    The eigen-relations checked at generic q are
    D_1 Δe_k = (n-k+1)(1 + q(n-k)) Δe_{k-1} and
    D_2 Δe_k = -(n-k+2)(n-k+1)(1 + q(n-k)) Δe_{k-2}.
    """
    if not 1 <= k <= n - 1:
        raise ValueError("need 1 <= k <= n-1")
    q0 = mpq(-1, n - k)
    f = delta_ek(n, k)
    V = vandermonde(n)
    r = n - k
    rel1 = dq(f, 1, GENERIC) == _qscale(V * elementary(k - 1, n), (r + 1, (r + 1) * r))
    rel2 = dq(f, 2, GENERIC) == _qscale(V * elementary(k - 2, n), (-(r + 2) * (r + 1), -(r + 2) * (r + 1) * r))
    return Certificate(q0, f, f.homogeneous_degree() or 0, _annihilated(f, q0),
                       {"d1_eigen": rel1, "d2_eigen": rel2})


def e1m_witness(n: int, k: int, m: int) -> Polynomial:
    """e_1(x_1..x_k)^m (x_1 - x_2)."""
    x = [Polynomial.var(n, i) for i in range(1, n + 1)]
    s = Polynomial.zero(n)
    for i in range(k):
        s = s + x[i]
    return s ** m * (x[0] - x[1])


def special_harmonic_e1m(n: int, k: int, m: int) -> Certificate:
    if not 2 <= k <= n or m < 1:
        raise ValueError("need 2 <= k <= n and m >= 1")
    q0 = mpq(-k, m + 1)
    f = e1m_witness(n, k, m)
    base = [e1m_witness(n, k, m - j) if m - j >= 0 else Polynomial.zero(n) for j in (1, 2)]
    c1 = QUniPoly((k * m, m * (m + 1)))
    c2 = QUniPoly((m * (m - 1) * k, (m + 1) * m * (m - 1)))
    rel1 = dq(f, 1, GENERIC) == _qscale(base[0], c1.coeffs)
    rel2 = dq(f, 2, GENERIC) == (_qscale(base[1], c2.coeffs) if m >= 2 else Polynomial.zero(n, Ring.QPOLY))
    return Certificate(q0, f, m + 1, _annihilated(f, q0),
                       {"d1_eigen": rel1, "d2_eigen": rel2, "d1_vanishes": c1(q0) == 0, "d2_vanishes": c2(q0) == 0})


def _subsets_containing(n: int, k: int, required: Sequence[int]):
    from itertools import combinations
    req = set(required)
    others = [i for i in range(1, n + 1) if i not in req]
    for extra in combinations(others, k - len(req)):
        yield sorted(req | set(extra))


def p_ij(n: int, k: int, m: int, i: int, j: int) -> Polynomial:
    """sum_h ( sum_{S ⊇ {i,h}} e1(x_S)^m (x_i - x_h) - sum_{S ⊇ {j,h}} e1(x_S)^m (x_j - x_h) ), |S| = k."""
    x = [None] + [Polynomial.var(n, t) for t in range(1, n + 1)]
    cache: Dict[Tuple[int, ...], Polynomial] = {}

    def e1m(S):
        key = tuple(S)
        if key not in cache:
            s = Polynomial.zero(n)
            for t in S:
                s = s + x[t]
            cache[key] = s ** m
        return cache[key]

    out = Polynomial.zero(n)
    for h in range(1, n + 1):
        for a in (i, j):
            if a == h:
                continue
            sign = 1 if a == i else -1
            for S in _subsets_containing(n, k, {a, h}):
                out = out + (e1m(S) * (x[a] - x[h])).scale(sign)
    return out


@dataclass
class PijReport:
    q0: mpq
    nonzero: bool
    harmonic: bool
    cocycle: bool
    equivariant: bool

    @property
    def passed(self) -> bool:
        return self.nonzero and self.harmonic and self.cocycle and self.equivariant


def pij_module_check(n: int, k: int, m: int, i: int, j: int) -> PijReport:
    if i == j or not (1 <= i <= n and 1 <= j <= n):
        raise ValueError("need distinct indices in 1..n")
    if not 2 <= k <= n or m < 1:
        raise ValueError("need 2 <= k <= n and m >= 1")
    q0 = mpq(-k, m + 1)
    p = p_ij(n, k, m, i, j)
    harmonic = _annihilated(p, q0)
    others = [l for l in range(1, n + 1) if l not in (i, j)]
    cocycle = all(p + p_ij(n, k, m, j, l) == p_ij(n, k, m, i, l) for l in others)
    equivariant = True
    for t in range(1, n):
        sigma = transposition(n, t, t + 1)
        img = {a: sigma[a - 1] for a in range(1, n + 1)}
        if apply_permutation(p, sigma) != p_ij(n, k, m, img[i], img[j]):
            equivariant = False
            break
    return PijReport(q0, bool(p), harmonic, cocycle, equivariant)


# ------------------------------------------------------------------ singular scan

NOT_REFUTED = "not refuted up to D"
SINGULAR = "singular"


@dataclass
class ScanRow:
    q0: mpq
    a: int
    b: int
    witness_degree: Optional[int]
    excess_dim: Optional[int]
    status: str


def classical_series(n: int, D: int) -> List[int]:
    dims = t_factorial(n).dims
    return (dims + [0] * (D + 1))[: D + 1]


def singular_scan(n: int, a_max: int, b_max: int, D: int, compare_frobenius: bool = False) -> List[ScanRow]:
    """Scan q0 = -a/b in lowest terms; a value is SINGULAR once some graded dimension differs from q = 0.

    With ``compare_frobenius`` a degree of equal dimension is also compared
    as an S_n-module; such a witness has excess_dim 0.
    """
    if not 1 <= a_max <= n:
        raise ValueError("need 1 <= a_max <= n")
    if b_max < 1 or D < 0:
        raise ValueError("need b_max >= 1 and D >= 0")
    classical = classical_series(n, D)
    reference = classical_frobenius(n) if compare_frobenius else {}
    seen = set()
    rows = []
    for b in range(1, b_max + 1):
        for a in range(1, a_max + 1):
            if gcd(a, b) != 1:
                continue
            q0 = mpq(-a, b)
            if q0 in seen:
                continue
            seen.add(q0)
            witness = excess = None
            for d in range(D + 1):
                kb = kernel_basis(n, QSpec.rational(q0), d)
                if kb.dim != classical[d]:
                    witness, excess = d, kb.dim - classical[d]
                    break
                if compare_frobenius and kb.dim and schur_multiplicities(kb) != reference.get(d, {}):
                    witness, excess = d, 0
                    break
            rows.append(ScanRow(q0, a, b, witness, excess, SINGULAR if witness is not None else NOT_REFUTED))
    rows.sort(key=lambda r: (r.q0, r.a))
    return rows
