"""Explicit lifts of the harmonic ``∂1 Δ`` and the machinery around them.

Notation: ``Δ1`` is the Vandermonde determinant of x2..xn and ``e_k`` are
elementary symmetric polynomials in x2..xn.  A lift ``f1`` of ``∂1 Δ`` solves
``nabla_k f1 = ∂1^{k+1} Δ`` for k = 1, 2; every construction here is written
as ``Δ1 * sum_s g_s x1^s`` with ``g_s`` symmetric in x2..xn.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from . import linalg
from .diffops import dtilde, nabla, p1, p2, ptilde2, q2
from .opmatrix import monomial_image, operator_blocks
from .poly import Polynomial, Ring, apply_permutation, binomial, partial_derivative, transposition
from .qfield import as_rational
from .repr import partitions
from .symfun import VarSubset, e_product, vandermonde


class SingularMatrixError(ArithmeticError):
    pass


class LiftInfeasible(ArithmeticError):
    """The system nabla_k f = -Dtilde_k f_prev (k = 1, 2) has no solution."""


def _sign(m: int) -> int:
    return -1 if m % 2 else 1


def _tail(n: int) -> VarSubset:
    return VarSubset.tail(n)


def _x1_power(n: int, s: int) -> Polynomial:
    e = [0] * n
    e[0] = s
    return Polynomial.monomial(e)


def vandermonde_tail(n: int) -> Polynomial:
    return vandermonde(_tail(n))


def assemble(n: int, gs: Sequence[Polynomial]) -> Polynomial:
    """Δ1 * sum_s gs[s] * x1^s."""
    inner = Polynomial.zero(n)
    for s, g in enumerate(gs):
        if g:
            inner = inner + g * _x1_power(n, s)
    return vandermonde_tail(n) * inner


def _ecomb(n: int, terms: Sequence[Tuple[object, Sequence[int]]]) -> Polynomial:
    S = _tail(n)
    out = Polynomial.zero(n)
    for coeff, idx in terms:
        coeff = as_rational(coeff)
        if coeff:
            out = out + e_product(idx, S).scale(coeff)
    return out


def vandermonde_derivative_target(n: int, k: int) -> Polynomial:
    """∂1^{k+1} Δ, the right-hand side of the first lift equations."""
    return partial_derivative(vandermonde(n), 1, k + 1)


# ------------------------------------------------------------------ first construction

def g_section2(n: int, s: int) -> Polynomial:
    """Coefficient of x1^s in the first explicit f1 (divided by Δ1)."""
    sg = mpq(_sign(n - 2 - s), n)
    return _ecomb(n, [
        (sg * (n + 1) * binomial(s + 1, 2), (n - 2 - s,)),
        (-sg * binomial(s + 2, 2), (n - 3 - s, 1)),
    ])


def f1_section2(n: int) -> Polynomial:
    if n < 3:
        raise ValueError("the explicit f1 needs n >= 3")
    return assemble(n, [g_section2(n, s) for s in range(n - 1)])


# ------------------------------------------------------------------ one-parameter family

def _K(n: int, c) -> mpq:
    return (_sign(n - 1) - as_rational(c) * n) / mpq(n * n - 7)


def gsc_coefficients(n: int, s: int, c) -> Tuple[mpq, mpq, mpq, mpq]:
    """(a_s, b_s, c_s, d_s): g_{s;c} = a e_{n-s-2} + b e_{n-s-3}e1 + c e_{n-s-4}e1^2 + d e_{n-s-4}e2."""
    c = as_rational(c)
    K = _K(n, c)
    sg = _sign(s)
    a = sg * (K * mpq(s * (s - 1), 2) * mpq(n - 1, n) + c * mpq(s * (n - 1), 2) + s * _sign(n)) * (s + 1)
    b = sg * (s * K / n + c / 2) * (s + 2) * (s + 1)
    cc = sg * (n - 1) * K / (2 * n) * (s + 3) * (s + 2) * (s + 1)
    d = -sg * K * (s + 3) * (s + 2) * (s + 1)
    return a, b, cc, d


def g_sc(n: int, s: int, c) -> Polynomial:
    a, b, cc, d = gsc_coefficients(n, s, c)
    return _ecomb(n, [
        (a, (n - s - 2,)),
        (b, (n - s - 3, 1)),
        (cc, (n - s - 4, 1, 1)),
        (d, (n - s - 4, 2)),
    ])


def g0_family(n: int, c) -> Polynomial:
    """g_{0;c}; the e_{n-4} e2 and e_{n-4} e1^2 parts are fixed by c, the e_{n-3} e1 part is c itself."""
    if n < 5:
        raise ValueError("g0_family needs n >= 5")
    return g_sc(n, 0, c)


def g_from_g0(n: int, s: int, g0: Polynomial) -> Polynomial:
    """g_s = (-1)^{n-2-s}(s+1)s e_{n-2-s} + (-1)^s/s! nabla_1^s g0 (integration of the first system)."""
    S = _tail(n)
    h = g0
    for _ in range(s):
        h = nabla(h, 1, S.members)
    fact = 1
    for j in range(2, s + 1):
        fact *= j
    out = h.scale(mpq(_sign(s), fact))
    return out + e_product((n - 2 - s,), S).scale(_sign(n - 2 - s) * (s + 1) * s)


def f1_family(n: int, c) -> Polynomial:
    if n < 5:
        raise ValueError("f1_family needs n >= 5")
    return assemble(n, [g_sc(n, s, c) for s in range(n - 1)])


def system_defects(n: int, gs: Sequence[Polynomial]) -> Tuple[List[Polynomial], List[Polynomial]]:
    """Defects of the two coefficient systems a family (g_s) must satisfy.

    first[s]  = nabla_1 g_s + (s+1) g_{s+1} - (-1)^{n-3-s}(s+2)(s+1) e_{n-3-s}
    second[s] = (nabla_2 + 2 P_2) g_s + (s+2)(s+1) g_{s+2} - (-1)^{n-4-s}(s+3)(s+2)(s+1) e_{n-4-s}
    """
    S = _tail(n)
    v = S.members
    g = list(gs) + [Polynomial.zero(n)] * 2
    first = []
    for s in range(n - 2):
        lhs = nabla(g[s], 1, v) + g[s + 1].scale(s + 1)
        first.append(lhs - e_product((n - 3 - s,), S).scale(_sign(n - 3 - s) * (s + 2) * (s + 1)))
    second = []
    for s in range(n - 3):
        lhs = nabla(g[s], 2, v) + p2(g[s], v).scale(2) + g[s + 2].scale((s + 2) * (s + 1))
        second.append(lhs - e_product((n - 4 - s,), S).scale(_sign(n - 4 - s) * (s + 3) * (s + 2) * (s + 1)))
    return first, second


def lift_defects(f: Polynomial, target_prev: Optional[Polynomial] = None) -> Tuple[Polynomial, Polynomial]:
    """nabla_k f + Dtilde_k f_prev for k = 1, 2; with no f_prev the targets are ∂1^{k+1} Δ."""
    n = f.n
    out = []
    for k in (1, 2):
        if target_prev is None:
            rhs = vandermonde_derivative_target(n, k)
        else:
            rhs = -dtilde(target_prev, k)
        out.append(nabla(f, k) - rhs)
    return out[0], out[1]


# ------------------------------------------------------------------ affine ansatz

def f1_affine_coefficients(n: int, c, d) -> Tuple[mpq, mpq]:
    """Solution of a + (n-1) b = c, 2(a - b) = d (determinant -2n)."""
    c, d = as_rational(c), as_rational(d)
    b = (c - d / 2) / n
    return b + d / 2, b


def f1_affine(n: int, j: int, c, d, alpha: Sequence[int]) -> Polynomial:
    """(a x_j + b e1^{(j)}) ∂^alpha Δ with nabla_1 f = c ∂^alpha Δ and nabla_2 f = d ∂_j ∂^alpha Δ."""
    if n < 2:
        raise ValueError("f1_affine needs n >= 2")
    if not 1 <= j <= n:
        raise ValueError(f"variable index {j} out of range")
    alpha = tuple(alpha)
    if len(alpha) != n or any(a < 0 for a in alpha):
        raise ValueError("alpha must be a length-n vector of non-negative integers")
    a, b = f1_affine_coefficients(n, c, d)
    if not a and not b:
        return Polynomial.zero(n)
    lin = Polynomial.zero(n)
    for i in range(1, n + 1):
        lin = lin + Polynomial.var(n, i).scale(a if i == j else b)
    return lin * multi_derivative(vandermonde(n), alpha)


def multi_derivative(f: Polynomial, alpha: Sequence[int]) -> Polynomial:
    for i, a in enumerate(alpha, start=1):
        if a:
            f = partial_derivative(f, i, a)
    return f


def f2_ansatz_matrix(n: int) -> List[List[mpq]]:
    m = [[2, n - 1, 0, 0], [0, 1, 2 * (n - 1), n - 2], [4, -2, 0, 2], [0, 2, -4, 2]]
    m = [[mpq(x) for x in row] for row in m]
    if determinant(m) == 0:
        raise SingularMatrixError(f"the f2 ansatz matrix is singular at n = {n}")
    return m


def determinant(m: Sequence[Sequence]) -> mpq:
    """Exact determinant by Gaussian elimination over Q."""
    a = [[as_rational(x) for x in row] for row in m]
    size = len(a)
    det = mpq(1)
    for col in range(size):
        piv = next((r for r in range(col, size) if a[r][col]), None)
        if piv is None:
            return mpq(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, size):
            f = a[r][col] / a[col][col]
            if f:
                for cc in range(col, size):
                    a[r][cc] -= f * a[col][cc]
    return det


# ------------------------------------------------------------------ multi-index reduction

def f1_for_variable(n: int, i: int, f1: Optional[Polynomial] = None) -> Polynomial:
    """Lift of ∂_i Δ obtained from a lift of ∂1 Δ by the transposition (1 i) (which negates Δ)."""
    if f1 is None:
        f1 = f1_section2(n) if n >= 3 else Polynomial.zero(n)
    if i == 1:
        return f1
    return -apply_permutation(f1, transposition(n, 1, i))


def reduce_multiindex(alpha: Sequence[int], f1_per_variable: Sequence[Polynomial]) -> Polynomial:
    """f1^alpha = sum_{alpha_i != 0} alpha_i ∂^{alpha - v_i} f1^{(i)}: a lift of ∂^alpha Δ."""
    alpha = tuple(alpha)
    if not f1_per_variable:
        raise ValueError("need one lift per variable")
    n = f1_per_variable[0].n
    if len(alpha) != n or len(f1_per_variable) != n:
        raise ValueError("alpha and the lift list must both have length n")
    out = Polynomial.zero(n)
    for i, a in enumerate(alpha):
        if a:
            beta = list(alpha)
            beta[i] -= 1
            out = out + multi_derivative(f1_per_variable[i], beta).scale(a)
    return out


# ------------------------------------------------------------------ generic lift solver

@dataclass
class LiftSolution:
    particular: Polynomial
    kernel_dim: int
    kernel_basis: List[Polynomial] = field(default_factory=list)
    adjusted_prev: Optional[Polynomial] = None


def lift_step(n: int, f_prev: Polynomial, q_mode=None, with_kernel: bool = True,
              prev_kernel: Sequence[Polynomial] = ()) -> LiftSolution:
    """Solve nabla_k f = -Dtilde_k f_prev (k = 1, 2) for f homogeneous of the degree of f_prev.

    Both sides lower degree by k, so f has the same degree as f_prev.  Free
    variables of the reduced echelon form (columns in graded-lex order) are
    set to zero in the particular solution.

    ``prev_kernel`` lists polynomials killed by nabla_1 and nabla_2 (the
    freedom left in f_prev by the previous step).  When given, f_prev may be
    replaced by f_prev + sum t_j K_j; the chosen replacement is returned as
    ``adjusted_prev``.  Without that freedom a second step is usually infeasible.
    ``q_mode`` is accepted for interface stability and ignored.
    """
    if f_prev.ring is not Ring.RAT:
        raise ValueError("lift_step works over Q")
    if f_prev.n != n:
        raise ValueError("f_prev lives in a different number of variables")
    if not f_prev:
        return LiftSolution(Polynomial.zero(n), 0, [], f_prev)
    d = f_prev.homogeneous_degree()
    if d is None:
        raise ValueError("f_prev must be homogeneous")
    cols, blocks = operator_blocks(n, d, (1, 2))
    ncols = len(cols)
    extra = [[-dtilde(K, k) for k in (1, 2)] for K in prev_kernel]
    rows, rhs = [], []
    for bi, (k, targets, brows) in enumerate(blocks):
        image = -dtilde(f_prev, k)
        for t, r in zip(targets, brows):
            row = {c: mpq(p[0]) for c, p in r.items() if p[0]}
            for j, imgs in enumerate(extra):
                v = imgs[bi].terms.get(t)
                if v:
                    row[ncols + j] = -v
            rows.append(row)
            rhs.append(image.terms.get(t, mpq(0)))
    try:
        x, ech = linalg.solve(rows, rhs, ncols + len(extra))
    except linalg.InconsistentSystem:
        raise LiftInfeasible(f"no lift exists in degree {d}") from None
    particular = Polynomial(n, {cols[c]: v for c, v in x.items() if c < ncols})
    adjusted = f_prev
    for j, K in enumerate(prev_kernel):
        t = x.get(ncols + j)
        if t:
            adjusted = adjusted + K.scale(t)
    kernel = []
    if extra:
        # freedom in f alone: kernel of the nabla block without the adjustment columns
        sub = [{c: v for c, v in r.items() if c < ncols} for r in rows]
        ech = linalg.rref(sub, ncols, stop_at_full_rank=False)
    if with_kernel:
        kernel = [Polynomial(n, {cols[c]: v for c, v in vec.items()}) for vec in linalg.kernel_from_rref(ech)]
        dim = len(kernel)
    else:
        dim = ncols - ech.rank
    return LiftSolution(particular, dim, kernel, adjusted)


def lift_chain(n: int, f0: Polynomial, steps: int) -> List[Polynomial]:
    """f_1..f_steps solving nabla_k f_i = -Dtilde_k f_{i-1} for all i at once.

    Solving the block system jointly lets later steps constrain earlier
    choices, which step-by-step solving cannot do.
    """
    if steps < 1:
        return []
    d = f0.homogeneous_degree()
    if d is None:
        raise ValueError("f0 must be homogeneous and nonzero")
    cols, blocks = operator_blocks(n, d, (1, 2))
    N = len(cols)
    rows, rhs = [], []
    for i in range(steps):
        for k, targets, brows in blocks:
            tpos = {t: r for r, t in enumerate(targets)}
            # Dtilde_k couples f_{i-1} (unknown for i >= 1) into the same target rows
            coupling = [dict() for _ in targets]
            if i:
                for c, key in enumerate(cols):
                    for t, (a, b) in monomial_image(n, key, k).items():
                        coupling[tpos[t]][(i - 1) * N + c] = mpq(b)
            image = -dtilde(f0, k) if i == 0 else None
            for r, (t, brow) in enumerate(zip(targets, brows)):
                row = {i * N + c: mpq(p[0]) for c, p in brow.items() if p[0]}
                row.update(coupling[r])
                rows.append(row)
                rhs.append(image.terms.get(t, mpq(0)) if image is not None else mpq(0))
    try:
        x, _ = linalg.solve(rows, rhs, steps * N)
    except linalg.InconsistentSystem:
        raise LiftInfeasible(f"no chain of {steps} lifts exists in degree {d}") from None
    out = []
    for i in range(steps):
        out.append(Polynomial(n, {cols[c]: x[i * N + c] for c in range(N) if x.get(i * N + c)}))
    return out



# ------------------------------------------------------------------ appendix: the f2 for f_{1;c}

def special_c(n: int) -> mpq:
    """The unique c for which the f2 system collapses to a single equation."""
    if n < 2:
        raise ValueError("special_c needs n >= 2")
    return _sign(n - 1) * mpq(2 * (2 * n ** 3 - 2 * n - 3), 3 * n * (n - 1) * (n * n + n + 2))


class Which(str, Enum):
    A_TILDE = "A_TILDE"
    B_TILDE = "B_TILDE"
    C_TILDE = "C_TILDE"
    D_TILDE = "D_TILDE"
    A_HAT = "A_HAT"
    B_HAT = "B_HAT"
    C_HAT = "C_HAT"
    D_HAT = "D_HAT"


def _rising(s: int, lo: int, hi: int) -> int:
    """(s+lo)(s+lo+1)...(s+hi)."""
    out = 1
    for j in range(lo, hi + 1):
        out *= s + j
    return out


def appendix_coefficient_definition(n: int, c, s: int, which, as_printed: bool = False) -> mpq:
    """The coefficient written through a_s..d_s of g_{s;c} (collecting terms of -Dtilde_k f_{1;c}).

    The printed A_HAT drops -6(n-s-4) c_s, which comes from Dtilde_2(e_m e1^2) = 6m e_m;
    ``as_printed=True`` reproduces that omission.
    """
    which = Which(which)
    co = lambda t: gsc_coefficients(n, t, c)
    a, b, cc, d = co(s)
    if which is Which.A_TILDE:
        return -(s + 1) * s * co(s + 1)[0] - 2 * (n - s - 3) * b - 2 * (n - s - 3) * d - (s + 2) * (s + 1) * a - (n - 1) * (n - 2) * b
    if which is Which.B_TILDE:
        return (-(s + 1) * s * co(s + 1)[1] - (4 * (n - s - 4) + 2) * cc - 2 * (n - s - 5) * d
                - (s + 3) * (s + 2) * b - 2 * (n - 1) * (n - 2) * cc - (n - 2) * (n - 3) * d)
    if which is Which.C_TILDE:
        return -(s + 1) * s * co(s + 1)[2] - (s + 4) * (s + 3) * cc
    if which is Which.D_TILDE:
        return -(s + 1) * s * co(s + 1)[3] - (s + 4) * (s + 3) * d
    if which is Which.A_HAT:
        return (-(s + 2) * (s + 1) * s * co(s + 2)[0] + (s + 3) * (s + 2) * (s + 1) * a
                + (n - 1) * (n - 2) * (n - 3) * d - 3 * (s + 3) * (s + 2) * b
                - 3 * (n - 1) * (n - 2) * cc + 3 * (n - s - 4) * (n + s + 1) * d
                - (0 if as_printed else 6 * (n - s - 4) * cc))
    if which is Which.B_HAT:
        return (-(s + 2) * (s + 1) * s * co(s + 2)[1] + (s + 4) * (s + 3) * (s + 2) * b
                - 6 * (s + 4) * (s + 3) * cc - 3 * (s + 4) * (s + 3) * d)
    if which is Which.C_HAT:
        return -(s + 2) * (s + 1) * s * co(s + 2)[2] + (s + 5) * (s + 4) * (s + 3) * cc
    return -(s + 2) * (s + 1) * s * co(s + 2)[3] + (s + 5) * (s + 4) * (s + 3) * d


def appendix_coefficients(n: int, c, s: int, which, source: str = "corrected") -> mpq:
    """Closed forms of the coefficients of -Dtilde_1 f_{1;c} (tilde) and -Dtilde_2 f_{1;c} (hat).

    ``source="published"`` gives the forms as printed; A_TILDE is then right
    only for even n and A_HAT is wrong for every n.  ``"corrected"`` repairs both.
    """
    if n < 5:
        raise ValueError("appendix coefficients need n >= 5")
    if source not in ("corrected", "published"):
        raise ValueError(f"unknown coefficient source {source!r}")
    which = Which(which)
    c = as_rational(c)
    sg = _sign(n)
    E = c * n + sg
    W = n * n - 7
    ss = _sign(s)
    if which is Which.A_TILDE and source == "corrected":
        inner = (3 * (n - 1) * E * s * s
                 + (21 * n * (n - 1) * c - sg * (2 * n * n - 21 * n + 7)) * s
                 - n * (n - 1) * (n ** 3 + n - 28) * c - 12 * sg * n * (n - 3))
        return ss * _rising(s, 1, 2) * inner / (2 * n * W)
    if which is Which.A_HAT and source == "corrected":
        inner = (-3 * (n - 1) * E * s * s
                 + (-n * (n - 1) * (n * n + 3 * n + 29) * c + sg * (-2 * n ** 3 - 19 * n + 15)) * s
                 + n * (n - 1) * (2 * n ** 3 - n * n - 9 * n - 60) * c
                 + sg * (2 * n ** 4 - 3 * n ** 3 - 2 * n * n - 51 * n + 18))
        return ss * _rising(s, 1, 3) * inner / (2 * n * W)
    if which is Which.A_TILDE:
        inner = (3 * (n - 1) * E * s * s
                 - sg * (21 * n * (sg - n) * c + 2 * n * n - 21 * n + 7) * s
                 - n * (n - 1) * (n ** 3 + n - 28) * c - sg * 12 * n * (n - 3))
        return ss * _rising(s, 1, 2) * inner / (2 * n * W)
    if which is Which.B_TILDE:
        inner = 6 * E * s + (24 * c * n + 2 * sg * n * n + 10 * sg)
        return ss * _rising(s, 1, 3) * inner / (2 * n * W)
    if which is Which.C_TILDE:
        return ss * _rising(s, 1, 4) * 3 * (n - 1) * E / (2 * n * W)
    if which is Which.D_TILDE:
        return ss * _rising(s, 1, 4) * (-3 * E) / W
    if which is Which.A_HAT:
        inner = ((n - 1) * E * s * s
                 + (-n * (n - 1) * (n * n + 3 * n + 23) * c + sg * (-13 * n - 2 * n ** 3 + 9)) * s
                 + n * (n - 1) * (2 * n ** 3 - n * n - 15 * n - 36) * c
                 + sg * (-3 * n ** 3 - 8 * n * n - 6 + 2 * n ** 4 - 21 * n))
        return ss * _rising(s, 1, 3) * inner / (2 * n * W)
    if which is Which.B_HAT:
        inner = -6 * E * s + 18 * _sign(1 + n) + 2 * c * n ** 3 - 32 * c * n
        return ss * _rising(s, 1, 4) * inner / (2 * n * W)
    if which is Which.C_HAT:
        return ss * _rising(s, 1, 5) * (-3 * (n - 1) * E) / (2 * n * W)
    return ss * _rising(s, 1, 5) * 3 * E / W


_TILDE = (Which.A_TILDE, Which.B_TILDE, Which.C_TILDE, Which.D_TILDE)
_HAT = (Which.A_HAT, Which.B_HAT, Which.C_HAT, Which.D_HAT)


def appendix_expansion(n: int, c, k: int, coefficients=appendix_coefficients) -> Polynomial:
    """Δ1 * sum_s (coefficient-weighted e-products) x1^s; should equal -Dtilde_k f_{1;c}."""
    if k == 1:
        whiches, top, shift = _TILDE, n - 2, 3
    elif k == 2:
        whiches, top, shift = _HAT, n - 4, 4
    else:
        raise ValueError("k must be 1 or 2")
    gs = []
    for s in range(top + 1):
        ca, cb, cc, cd = (coefficients(n, c, s, w) for w in whiches)
        m = n - s - shift
        gs.append(_ecomb(n, [(ca, (m,)), (cb, (m - 1, 1)), (cc, (m - 2, 1, 1)), (cd, (m - 2, 2))]))
    return assemble(n, gs)


def gsc_special(n: int, s: int) -> Polynomial:
    """g_{s;c} at c = special_c(n), from its own four-term closed form."""
    if n < 5 or not 0 <= s <= n - 2:
        raise ValueError("gsc_special needs n >= 5 and 0 <= s <= n-2")
    sg = _sign(s + n)
    P = n * n + n + 2
    return _ecomb(n, [
        (sg * mpq(s + 1, 6 * n * P) * (n * s * s + (2 * n ** 3 + 6 * n * n + 15 * n + 6) * s), (n - s - 2,)),
        (sg * mpq((s + 2) * (s + 1), 3 * n * (n - 1) * P) * (n * s + (-2 * n ** 3 + 2 * n + 3)), (n - s - 3, 1)),
        (sg * mpq(_rising(s, 1, 3), 6 * P), (n - s - 4, 1, 1)),
        (-sg * mpq(_rising(s, 1, 3) * n, 3 * (n - 1) * P), (n - s - 4, 2)),
    ])


def rhs_constants(n: int) -> Dict[str, mpq]:
    """alpha, beta, gamma, delta of the final equation at c = special_c(n)."""
    sg = _sign(n)
    P = n * n + n + 2
    return {
        "alpha": sg * mpq(6 * n ** 4 + 7 * n ** 3 + 11 * n * n - 86 * n - 36, 6 * n * P),
        "beta": sg * mpq((n + 2) * (2 * n * n - 4 * n - 3), 3 * n * (n - 1) * P),
        "gamma": -sg * mpq(1, 2 * P),
        "delta": sg * mpq(n, (n - 1) * P),
    }


def g0_u_published(n: int, u) -> Dict[str, mpq]:
    """v, w, y, z as printed for the g0 ansatz (kept for comparison; they do not solve the equation)."""
    u = as_rational(u)
    sg = _sign(n)
    P = n * n + n + 2
    W = n * n - 7
    return {
        "u": u,
        "z": sg * mpq(-6, n * P),
        "y": sg * mpq(-2, n * n * P),
        "w": -(-12 * n * n * P * u + (12 * n ** 4 + 7 * n ** 3 + 31 * n * n - 168 * n - 48)) / (2 * P * W),
        "v": (-6 * n * n * P * (n - 1) ** 2 * u + (6 * n ** 6 - 5 * n ** 5 + 10 * n ** 4 - 138 * n ** 3 + 179 * n * n - 22 * n + 60))
        / (2 * (n - 1) * W * P * n * n),
    }


def g0_u_derived(n: int, u) -> Dict[str, mpq]:
    """v, w, y, z solving the coefficient equations of the g0 ansatz exactly."""
    u = as_rational(u)
    sg = _sign(n)
    P = n * n + n + 2
    W = n * n - 7
    z = sg * mpq(12, (n - 1) * P)
    y = -sg * mpq(6, n * P)
    w = (12 * n * n * P * u + sg * (-12 * n ** 4 - 7 * n ** 3 - 22 * n * n + 129 * n + 60)) / (2 * n * W * P)
    v = -(6 * n * n * (n - 1) ** 2 * P * u
          + sg * (-6 * n ** 6 + 5 * n ** 5 - 10 * n ** 4 + 129 * n ** 3 - 104 * n * n - 146 * n - 12)) / (2 * n * n * (n - 1) * W * P)
    return {"u": u, "v": v, "w": w, "y": y, "z": z}


def g0_ansatz(n: int, coeffs: Dict[str, mpq]) -> Polynomial:
    return _ecomb(n, [
        (coeffs["u"], (n - 3, 1)),
        (coeffs["v"], (n - 4, 1, 1)),
        (coeffs["w"], (n - 4, 2)),
        (coeffs["y"], (n - 5, 1, 1, 1)),
        (coeffs["z"], (n - 5, 2, 1)),
    ])


def reduced_operator(g: Polynomial) -> Polynomial:
    """(nabla_2 + 2 P_2 + nabla_1^2) g on x2..xn."""
    v = _tail(g.n).members
    return nabla(g, 2, v) + p2(g, v).scale(2) + nabla(nabla(g, 1, v), 1, v)


@dataclass
class F2Check:
    n: int
    u: mpq
    source: str
    passed: bool
    coefficients: Dict[str, mpq]
    defect: Polynomial


def f2_rhs_check(n: int, u, source: str = "derived", perturb: Optional[Dict[str, object]] = None) -> F2Check:
    """Check (nabla_2 + 2P_2 + nabla_1^2) g0 = 3! alpha e_{n-4} + 4! beta e_{n-5}e1 + 5! gamma e_{n-6}e1^2 + 5! delta e_{n-6}e2.

    ``source`` picks the ansatz coefficients: "derived" (exact solution of the
    coefficient equations) or "published" (as printed).  ``perturb`` adds
    offsets to named coefficients for negative controls.
    """
    if n < 6:
        raise ValueError("f2_rhs_check needs n >= 6")
    table = {"derived": g0_u_derived, "published": g0_u_published}
    if source not in table:
        raise ValueError(f"unknown coefficient source {source!r}")
    coeffs = table[source](n, u)
    for name, delta in (perturb or {}).items():
        coeffs[name] = coeffs[name] + as_rational(delta)
    k = rhs_constants(n)
    rhs = _ecomb(n, [
        (6 * k["alpha"], (n - 4,)),
        (24 * k["beta"], (n - 5, 1)),
        (120 * k["gamma"], (n - 6, 1, 1)),
        (120 * k["delta"], (n - 6, 2)),
    ])
    defect = reduced_operator(g0_ansatz(n, coeffs)) - rhs
    return F2Check(n, as_rational(u), source, not defect, coeffs, defect)


# ------------------------------------------------------------------ f2 over f_{1;c}, solved in the reduced space

def admissible_c(n: int) -> mpq:
    """The c for which f_{1;c} admits a lift f2; found by exact solves for n = 5..10 and fitted."""
    if n < 2:
        raise ValueError("admissible_c needs n >= 2")
    return _sign(n - 1) * mpq(2 * (2 * n * n - 5), 3 * n * (n * n - 1))


def conjugated_targets(n: int, c) -> Tuple[List[Polynomial], List[Polynomial]]:
    """A_s, B_s with -Dtilde_k f_{1;c} = Δ1 sum_s (A_s, B_s) x1^s, computed on the g_{s;c}."""
    v = _tail(n).members
    z = Polynomial.zero(n)
    g = [g_sc(n, s, c) for s in range(n - 1)] + [z, z]
    A = [-g[s + 1].scale((s + 1) * s) - p1(g[s], v, check=False).scale(2) - dtilde(g[s], 1, v)
         for s in range(n - 1)]
    B = [-g[s + 2].scale((s + 2) * (s + 1) * s)
         - (q2(g[s], v).scale(6) + ptilde2(g[s], v).scale(3) + dtilde(g[s], 2, v))
         for s in range(n - 1)]
    return A, B


def _reduced_defects(n: int, h0: Polynomial, A, B) -> List[Polynomial]:
    """Integrate the nabla_1 system from h0, then return what is left of both systems."""
    v = _tail(n).members
    h = [h0]
    for s in range(n - 2):
        h.append((A[s] - nabla(h[s], 1, v)).scale(mpq(1, s + 1)))
    z = Polynomial.zero(n)
    h += [z, z]
    out = [nabla(h[n - 2], 1, v) - A[n - 2]]
    for s in range(n - 1):
        out.append(nabla(h[s], 2, v) + p2(h[s], v, check=False).scale(2) + h[s + 2].scale((s + 2) * (s + 1)) - B[s])
    return out


def _h_sequence(n: int, h0: Polynomial, A) -> List[Polynomial]:
    v = _tail(n).members
    h = [h0]
    for s in range(n - 2):
        h.append((A[s] - nabla(h[s], 1, v)).scale(mpq(1, s + 1)))
    return h


@dataclass
class F2Solution:
    n: int
    c: mpq
    f1: Polynomial
    f2: Polynomial


def solve_f2(n: int, c=None) -> F2Solution:
    """A lift f2 of f_{1;c}, written as Δ1 sum_s h_s x1^s with h_0 symmetric in x2..xn.

    With ``c=None`` the parameter is an unknown too and the unique admissible
    value is returned.  Raises LiftInfeasible when no such f2 exists.
    """
    if n < 5:
        raise ValueError("solve_f2 needs n >= 5")
    S = _tail(n)
    lams = partitions(n - 2, n - 1)
    zero = [Polynomial.zero(n)] * (n - 1)
    if c is None:
        A0, B0 = conjugated_targets(n, 0)
        A1, B1 = conjugated_targets(n, 1)
        Ac = [a - b for a, b in zip(A1, A0)]
        Bc = [a - b for a, b in zip(B1, B0)]
    else:
        A0, B0 = conjugated_targets(n, as_rational(c))
    cols = [_reduced_defects(n, e_product(lam, S), zero, zero) for lam in lams]
    if c is None:
        cols.append(_reduced_defects(n, Polynomial.zero(n), Ac, Bc))
    base = _reduced_defects(n, Polynomial.zero(n), A0, B0)
    rows, rhs = [], []
    for i in range(len(base)):
        keys = set(base[i].terms)
        for col in cols:
            keys |= set(col[i].terms)
        for key in sorted(keys):
            rows.append({j: col[i].terms[key] for j, col in enumerate(cols) if key in col[i].terms})
            rhs.append(-base[i].terms.get(key, 0))
    try:
        x, _ = linalg.solve(rows, rhs, len(cols))
    except linalg.InconsistentSystem as exc:
        raise LiftInfeasible(f"f_(1;c) admits no lift of this shape at n={n}, c={c}") from exc
    cval = x.get(len(lams), mpq(0)) if c is None else as_rational(c)
    A, _ = conjugated_targets(n, cval)
    h0 = Polynomial.zero(n)
    for j, lam in enumerate(lams):
        if x.get(j):
            h0 = h0 + e_product(lam, S).scale(x[j])
    f2 = assemble(n, _h_sequence(n, h0, A))
    return F2Solution(n, cval, f1_family(n, cval), f2)
