"""Acceptance gates 1-10, one printed PASS/FAIL line each.

Every comparison is exact equality over Q.  Run with ``pytest -v -s`` to see
the lines inline; without ``-s`` they are still written through capsys.disabled().
"""
import random
from math import comb

from gmpy2 import mpq

from qsteenrod import linalg
from qsteenrod.constructions import (LiftInfeasible, appendix_coefficient_definition, appendix_expansion,
                                     f1_family, f1_section2, f2_rhs_check, lift_defects, lift_step, special_c)
from qsteenrod.diffops import (GENERIC, Family, OperatorSpec, commutator_defect, dtilde, leibniz_defect,
                               nabla, p2)
from qsteenrod.harmonics import (SINGULAR, _generic_rows, _annihilated, classical_frobenius, frobenius,
                                 hilbert_series, kernel_basis, pij_module_check, singular_scan,
                                 special_harmonic_delta_ek, special_harmonic_e1m, t_factorial)
from qsteenrod.poly import partial_derivative
from qsteenrod.repr import partitions
from qsteenrod.symfun import e_product, elementary, vandermonde, verify_catalog

from conftest import random_poly

SEED = 20240101


def report(capsys, number, passed, detail):
    with capsys.disabled():
        print(f"\ncriterion {number}: {'PASS' if passed else 'FAIL'} {detail}")
    assert passed, detail


def test_criterion_01_formula_catalog(capsys):
    checked = failed = 0
    for n in range(1, 7):
        for entry in verify_catalog(n).values():
            checked += entry["passed"] + entry["failed"]
            failed += entry["failed"]
    report(capsys, 1, failed == 0 and checked > 0, f"{checked} closed forms checked for n <= 6, {failed} failures")


def test_criterion_02_f1_contracts(capsys):
    rng = random.Random(SEED)
    bad = []
    cases = 0
    for n in range(3, 8):
        cases += 1
        if any(lift_defects(f1_section2(n))):
            bad.append(("section2", n))
    for n in range(5, 8):
        cs = [special_c(n), mpq(0), mpq(1), mpq(-2, 3), mpq(rng.randint(-50, 50), rng.randint(1, 50))]
        for c in cs:
            cases += 1
            if any(lift_defects(f1_family(n, c))):
                bad.append(("family", n, c))
    report(capsys, 2, not bad, f"{cases} cases, failures {bad}")


def test_criterion_03_appendix(capsys):
    bad = []
    for n in (6, 7, 8):
        for u in (mpq(0), mpq(1), mpq(-2, 3)):
            if not f2_rhs_check(n, u).passed:
                bad.append(("rhs", n, u))
    printed_fail = 0
    for n in (6, 7):
        c = special_c(n)
        f = f1_family(n, c)
        for k in (1, 2):
            if appendix_expansion(n, c, k) != -dtilde(f, k):
                bad.append(("expansion", n, k))
            printed = lambda nn, cc, s, w: appendix_coefficient_definition(nn, cc, s, w, as_printed=True)
            if appendix_expansion(n, c, k, coefficients=printed) != -dtilde(f, k):
                printed_fail += 1
    detail = (f"derived coefficients: failures {bad}; "
              f"as-printed coefficient set reproduces {4 - printed_fail}/4 expansions (documented errata)")
    report(capsys, 3, not bad, detail)


def test_criterion_04_classical_hilbert(capsys):
    bad = [n for n in range(1, 6) if hilbert_series(n, "0", comb(n, 2)).dims != t_factorial(n).dims]
    n4 = hilbert_series(4, "0", 6).dims
    report(capsys, 4, not bad and n4 == [1, 3, 5, 6, 5, 3, 1], f"n=4 series {n4}, mismatches at n in {bad}")


def test_criterion_05_generic_bound(capsys):
    ok = True
    equal = []
    for n in (2, 3, 4):
        top = comb(n, 2)
        dims = hilbert_series(n, "generic", top + 2).dims
        ref = t_factorial(n).dims
        ok &= all(a <= b for a, b in zip(dims, ref)) and dims[top + 1:] == [0, 0]
        equal.append((n, dims[: top + 1] == ref))
    report(capsys, 5, ok, f"bound holds; equality with [n]_t! observed for {equal}")


def test_criterion_06_frobenius(capsys):
    bad = []
    for n in range(1, 5):
        f = frobenius(n, "0", comb(n, 2)).degrees
        if f != classical_frobenius(n):
            bad.append(n)
        if f.get(0) != {(n,): 1} or f.get(comb(n, 2)) != {(1,) * n: 1}:
            bad.append(("ends", n))
    report(capsys, 6, not bad, f"n <= 4 against cocharge, failures {bad}")


def test_criterion_07_special_harmonics(capsys):
    bad = []
    count = 0
    for n in range(2, 6):
        for k in range(1, n):
            c = special_harmonic_delta_ek(n, k)
            count += 1
            if not c.passed or _annihilated(c.witness, c.q0 - 1):
                bad.append(("delta", n, k))
        for k in range(2, n + 1):
            for m in range(1, 7):
                c = special_harmonic_e1m(n, k, m)
                count += 1
                if not c.passed or _annihilated(c.witness, c.q0 + mpq(1, 7)):
                    bad.append(("e1m", n, k, m))
    for n in range(2, 5):
        for k in range(2, n + 1):
            for m in range(1, 4):
                for i in range(1, n + 1):
                    for j in range(1, n + 1):
                        if i != j:
                            count += 1
                            if not pij_module_check(n, k, m, i, j).passed:
                                bad.append(("pij", n, k, m, i, j))
    report(capsys, 7, not bad, f"{count} certificates with negative controls, failures {bad}")


def test_criterion_08_singular_scan(capsys):
    rows = {r.q0: r for r in singular_scan(3, 3, 6, 6)}
    flagged = {q for q, r in rows.items() if r.status == SINGULAR}
    # lowest certificate degree per q0 within reach of D = 6
    certified = {}
    for k in (1, 2):
        c = special_harmonic_delta_ek(3, k)
        if c.passed and c.degree <= 6:
            certified[c.q0] = min(certified.get(c.q0, c.degree), c.degree)
    for k in (2, 3):
        for m in range(1, 6):
            c = special_harmonic_e1m(3, k, m)
            if c.passed:
                certified[c.q0] = min(certified.get(c.q0, c.degree), c.degree)
    required = {mpq(-1, 2): 4, mpq(-2, 5): 5, mpq(-1, 3): 6}
    ok = all(q in flagged and rows[q].witness_degree == d and certified.get(q, 99) <= d
             for q, d in required.items())
    ok &= mpq(-1) in flagged and rows[mpq(-1)].witness_degree <= 3 and certified[mpq(-1)] <= 3
    ok &= all(q in certified and certified[q] <= rows[q].witness_degree for q in flagged)
    silent = sorted(q for q in certified if q not in flagged)
    detail = (f"flagged {[(str(q), rows[q].witness_degree) for q in sorted(flagged)]}; "
              f"certified but dimension-regular {[str(q) for q in silent]}")
    report(capsys, 8, ok, detail)


def test_criterion_09_properties(capsys):
    rng = random.Random(SEED)
    bad = []
    for i in range(100):
        n = rng.randint(1, 4)
        k, h = rng.sample(range(1, 4), 2)
        q = GENERIC if i % 4 == 0 else mpq(rng.randint(-20, 20), rng.randint(1, 9))
        if commutator_defect(k, h, q, random_poly(rng, n, rng.randint(1, 6))):
            bad.append(("commutator", i))
    ops = [OperatorSpec(Family.NABLA, k=2), OperatorSpec(Family.DTILDE, k=1)]
    for i in range(100):
        n = rng.randint(1, 4)
        f = random_poly(rng, n, rng.randint(0, 4))
        g = random_poly(rng, n, rng.randint(0, 4))
        if leibniz_defect(ops[i % 2], f, g):
            bad.append(("leibniz", i))
    for n in range(2, 6):
        for d in range(1, 5):
            g = sum((e_product(lam, n).scale(mpq(rng.randint(-5, 5), rng.randint(1, 3)))
                     for lam in partitions(d, n)), elementary(0, n).scale(0))
            if nabla(p2(g), 1) != p2(nabla(g, 1)):
                bad.append(("nabla1-p2", n, d))
    for n in range(1, 7):
        for k in range(0, n + 1):
            e = elementary(k, n)
            if nabla(nabla(e, 1), 1) + p2(e).scale(2):
                bad.append(("e_k", n, k))
        V = vandermonde(n)
        for k in range(1, n + 2):
            if nabla(V, k) or dtilde(V, k):
                bad.append(("vandermonde", n, k))
    pairs = 0
    for n in (2, 3, 4):
        for d in range(comb(n, 2) + 3):
            cols, rows = _generic_rows(n, d)
            generic_rank = len(cols) - kernel_basis(n, "generic", d).dim
            for _ in range(2):
                pairs += 1
                q0 = linalg.random_rational(rng)
                if linalg.rank(linalg.specialize_rows(rows, q0), len(cols)) != generic_rank:
                    bad.append(("generic-rank", n, d, q0))
    report(capsys, 9, not bad, f"{pairs} rank cross-checks plus 200 random identities, failures {bad}")


def test_criterion_10_lift(capsys):
    bad = []
    firsts = {}
    for n in range(3, 6):
        f0 = partial_derivative(vandermonde(n), 1)
        try:
            sol = lift_step(n, f0)
        except LiftInfeasible:
            bad.append(("first", n))
            continue
        firsts[n] = (f0, sol)
        diff = sol.particular - f1_section2(n)
        if any(lift_defects(sol.particular, f0)) or nabla(diff, 1) or nabla(diff, 2):
            bad.append(("first-check", n))
    for n in (3, 4):
        if n not in firsts:
            continue
        f0, first = firsts[n]
        try:
            second = lift_step(n, first.particular, prev_kernel=first.kernel_basis)
        except LiftInfeasible:
            bad.append(("second", n))
            continue
        f1 = second.adjusted_prev
        if any(lift_defects(f1, f0)) or any(lift_defects(second.particular, f1)):
            bad.append(("second-check", n))
    report(capsys, 10, not bad,
           f"first step n = 3..5, second step n = 3..4 (using the first step's kernel freedom), failures {bad}")
