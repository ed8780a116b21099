import random
from math import comb, factorial

import pytest
from gmpy2 import mpq

from qsteenrod import linalg
from qsteenrod.diffops import dq
from qsteenrod.harmonics import (NOT_REFUTED, SINGULAR, QSpec, _generic_rows, character_trace,
                                 classical_frobenius, delta_ek, e1m_witness, frobenius, hilbert_series,
                                 in_kernel_span, kernel_basis, p_ij, pij_module_check, singular_scan,
                                 special_harmonic_delta_ek, special_harmonic_e1m, t_factorial)
from qsteenrod.poly import Polynomial, apply_permutation, parse_polynomial, transposition
from qsteenrod.repr import partitions


def test_qspec():
    assert QSpec.parse("generic").is_generic
    assert QSpec.parse("-1/2").value == mpq(-1, 2)
    with pytest.raises(ValueError):
        QSpec("RATIONAL")
    with pytest.raises(ValueError):
        QSpec("GENERIC", mpq(1))


def test_kernel_examples():
    kb = kernel_basis(2, "generic", 1)
    assert kb.dim == 1
    b = kb.basis[0]
    assert b.scale(-1).specialize(0) == parse_polynomial("x1 - x2", 2) or b.specialize(0) == parse_polynomial("x1 - x2", 2)
    for n in (1, 2, 3, 4):
        for q in ("generic", "0", "-1/3", "5"):
            assert kernel_basis(n, q, 0).dim == 1
    kb = kernel_basis(3, "-1/2", 4)
    assert in_kernel_span(kb, delta_ek(3, 1))


@pytest.mark.parametrize("n,q,d", [(2, "generic", 1), (3, "generic", 2), (3, "-1/2", 4), (4, "-2/5", 3), (4, "0", 4)])
def test_kernel_elements_are_harmonic(n, q, d):
    kb = kernel_basis(n, q, d)
    qarg = QSpec.parse(q).dq_arg()
    for b in kb.basis:
        if qarg == "generic":
            b = b.specialize(mpq(7, 3))
            qarg_eval = mpq(7, 3)
        else:
            qarg_eval = qarg
        assert not dq(b, 1, qarg_eval) and not dq(b, 2, qarg_eval)


def test_hilbert_examples():
    assert hilbert_series(2, "generic", 3).dims == [1, 1, 0, 0]
    assert hilbert_series(3, "generic", 4).dims == [1, 2, 2, 1, 0]
    assert hilbert_series(3, "0", 3).dims == [1, 2, 2, 1]


def test_t_factorial():
    assert t_factorial(2).dims == [1, 1]
    assert t_factorial(3).dims == [1, 2, 2, 1]
    assert t_factorial(4).dims == [1, 3, 5, 6, 5, 3, 1]
    for n in range(1, 7):
        assert sum(t_factorial(n).dims) == factorial(n)


def test_hilbert_workers(monkeypatch):
    monkeypatch.setenv("QSTEENROD_WORKERS", "2")
    assert hilbert_series(3, "-1/2", 5).dims == [1, 2, 2, 1, 3, 0]


def test_character_examples():
    assert character_trace(2, "generic", 1, (2,)) == -1
    assert character_trace(3, "0", 3, (1, 1, 1)) == 1
    assert character_trace(3, "0", 3, (2, 1)) == -1
    kb = kernel_basis(3, "-1/2", 4)
    assert character_trace(3, "-1/2", 4, (1, 1, 1), kb) == kb.dim


def test_frobenius_examples():
    f = frobenius(3, "0", 3).degrees
    assert f[0] == {(3,): 1} and f[3] == {(1, 1, 1): 1}
    totals = {}
    for mult in f.values():
        for lam, m in mult.items():
            totals[lam] = totals.get(lam, 0) + m
    assert totals == {(3,): 1, (2, 1): 2, (1, 1, 1): 1}
    assert frobenius(2, "generic", 2).degrees == {0: {(2,): 1}, 1: {(1, 1): 1}}


@pytest.mark.parametrize("n", [2, 3, 4])
def test_frobenius_matches_cocharge(n):
    assert frobenius(n, "0", comb(n, 2)).degrees == classical_frobenius(n)


@pytest.mark.parametrize("n,q,d", [(3, "-1/2", 4), (3, "generic", 2), (4, "-1/3", 5), (4, "0", 3)])
def test_sn_stability(n, q, d):
    kb = kernel_basis(n, q, d)
    for b in kb.basis:
        for t in range(1, n):
            assert in_kernel_span(kb, apply_permutation(b, transposition(n, t, t + 1)))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_generic_rank_cross_validation(n):
    rng = random.Random(n)
    for d in range(comb(n, 2) + 3):
        cols, rows = _generic_rows(n, d)
        generic_rank = len(cols) - kernel_basis(n, "generic", d).dim
        for _ in range(2):
            q0 = linalg.random_rational(rng)
            assert linalg.rank(linalg.specialize_rows(rows, q0), len(cols)) == generic_rank


@pytest.mark.parametrize("n", [2, 3, 4])
def test_generic_bound(n):
    dims = hilbert_series(n, "generic", comb(n, 2) + 2).dims
    ref = t_factorial(n).dims + [0, 0]
    assert all(a <= b for a, b in zip(dims, ref))
    assert dims[comb(n, 2) + 1:] == [0, 0]


def test_total_dimension_bound():
    for q in ("-1/2", "-1/3", "-2/5", "-1", "3/7"):
        assert hilbert_series(3, q, 8).total() <= factorial(4)


def test_delta_ek():
    c = special_harmonic_delta_ek(3, 1)
    assert c.q0 == mpq(-1, 2) and c.passed
    c = special_harmonic_delta_ek(3, 2)
    assert c.q0 == -1 and c.passed
    c = special_harmonic_delta_ek(4, 2)
    assert c.q0 == mpq(-1, 2) and c.passed
    f = delta_ek(4, 2)
    assert dq(f, 1, mpq(-1, 3)) or dq(f, 2, mpq(-1, 3))


def test_e1m():
    c = special_harmonic_e1m(3, 2, 3)
    assert c.q0 == mpq(-1, 2) and c.passed
    assert c.witness == parse_polynomial("x1 + x2", 3) ** 3 * parse_polynomial("x1 - x2", 3)
    c = special_harmonic_e1m(3, 2, 1)
    assert c.q0 == -1 and c.degree == 2 and c.passed
    f = e1m_witness(3, 2, 3)
    assert dq(f, 1, mpq(-1, 3)) or dq(f, 2, mpq(-1, 3))


def test_certificates_sit_in_kernels():
    for n, k in [(3, 1), (3, 2), (4, 3)]:
        c = special_harmonic_delta_ek(n, k)
        assert in_kernel_span(kernel_basis(n, c.q0, c.degree), c.witness)
    for n, k, m in [(3, 2, 3), (3, 3, 2), (4, 2, 2)]:
        c = special_harmonic_e1m(n, k, m)
        assert in_kernel_span(kernel_basis(n, c.q0, c.degree), c.witness)


def test_pij():
    r = pij_module_check(3, 2, 3, 1, 2)
    assert r.passed
    assert p_ij(3, 2, 3, 2, 1) == -p_ij(3, 2, 3, 1, 2)
    assert pij_module_check(4, 3, 2, 1, 2).passed


def test_scan_n3():
    rows = {r.q0: r for r in singular_scan(3, 3, 6, 6)}
    expected = {mpq(-1, 2): 4, mpq(-2, 5): 5, mpq(-1, 3): 6}
    for q0, d in expected.items():
        assert rows[q0].status == SINGULAR and rows[q0].witness_degree == d
    assert rows[mpq(-1)].status == SINGULAR and rows[mpq(-1)].witness_degree <= 3
    assert rows[mpq(-3, 2)].status == NOT_REFUTED
    assert rows[mpq(-3, 2)].witness_degree is None


def test_scan_frobenius_mode_agrees():
    a = singular_scan(3, 2, 3, 5)
    b = singular_scan(3, 2, 3, 5, compare_frobenius=True)
    assert [r.status for r in a] == [r.status for r in b]
