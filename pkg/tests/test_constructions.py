import pytest
from gmpy2 import mpq

from qsteenrod import linalg
from qsteenrod.constructions import (LiftInfeasible, SingularMatrixError, Which, admissible_c,
                                     appendix_coefficient_definition, appendix_coefficients,
                                     appendix_expansion, determinant, f1_affine, f1_family,
                                     f1_for_variable, f1_section2, f2_ansatz_matrix, f2_rhs_check,
                                     g0_family, g_sc, gsc_special, lift_chain, lift_defects, lift_step,
                                     multi_derivative, reduce_multiindex, reduced_operator, solve_f2,
                                     special_c, system_defects)
from qsteenrod.diffops import dtilde, nabla
from qsteenrod.opmatrix import operator_blocks
from qsteenrod.poly import Polynomial, parse_polynomial, partial_derivative
from qsteenrod.symfun import VarSubset, e_product, elementary, vandermonde


def sign(m):
    return -1 if m % 2 else 1


def test_f1_section2_n3():
    expected = parse_polynomial("1/3*x2^2 - 1/3*x3^2 + 4/3*x1*x2 - 4/3*x1*x3", 3)
    assert f1_section2(3) == expected
    V = vandermonde(3)
    assert nabla(expected, 1) == partial_derivative(V, 1, 2) == parse_polynomial("2*x2 - 2*x3", 3)
    assert not nabla(expected, 2)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_f1_section2_contracts(n):
    d1, d2 = lift_defects(f1_section2(n))
    assert not d1 and not d2


@pytest.mark.parametrize("n", [5, 6, 7])
def test_g0_family(n):
    S = VarSubset.tail(n)
    c0 = mpq(sign(n - 1), n)
    assert g0_family(n, c0) == e_product((n - 3, 1), S).scale(c0)
    for c in (0, 1, mpq(-2, 3)):
        target = elementary(n - 4, S).scale(6 * sign(n - 1))
        assert reduced_operator(g0_family(n, c)) == target


@pytest.mark.parametrize("n,c", [(5, 7), (6, mpq(-3, 2)), (5, 0), (6, 1)])
def test_f1_family_contracts(n, c):
    d1, d2 = lift_defects(f1_family(n, c))
    assert not d1 and not d2


@pytest.mark.parametrize("n", [5, 6])
def test_family_contains_section2(n):
    assert f1_family(n, mpq(sign(n - 1), n)) == f1_section2(n)


@pytest.mark.parametrize("n", [5, 6, 7])
def test_coefficient_systems(n):
    for c in (special_c(n), 0, mpq(5, 2)):
        first, second = system_defects(n, [g_sc(n, s, c) for s in range(n - 1)])
        assert not any(first) and not any(second)


def test_f1_affine():
    f = f1_affine(2, 1, 1, 0, (1, 0))
    V = vandermonde(2)
    assert nabla(f, 1) == partial_derivative(V, 1)
    assert not nabla(f, 2)
    assert not f1_affine(3, 2, 0, 0, (0, 1, 0))
    alpha = (0, 1, 0, 0)
    f = f1_affine(4, 2, 1, 2, alpha)
    target = multi_derivative(vandermonde(4), alpha)
    assert nabla(f, 1) == target
    assert nabla(f, 2) == partial_derivative(target, 2).scale(2)


def test_f2_ansatz_matrix():
    assert determinant(f2_ansatz_matrix(3)) == 192
    assert determinant(f2_ansatz_matrix(2)) == 64
    for n in range(2, 10):
        assert determinant(f2_ansatz_matrix(n)) == 32 * (n * n - n)
    with pytest.raises(SingularMatrixError):
        f2_ansatz_matrix(1)


def _general_f2_feasible(n, k, t):
    """Is there any f with nabla_1 f = (t1 x1 + t2 e1') ∂1^k Δ and nabla_2 f = (t3 x1 + t4 e1') ∂1^{k+1} Δ?"""
    V = vandermonde(n)
    x1 = Polynomial.var(n, 1)
    e1 = elementary(1, VarSubset.tail(n))
    r = [(x1.scale(t[0]) + e1.scale(t[1])) * partial_derivative(V, 1, k),
         (x1.scale(t[2]) + e1.scale(t[3])) * partial_derivative(V, 1, k + 1)]
    cols, blocks = operator_blocks(n, n * (n - 1) // 2 - k + 2, (1, 2))
    rows, rhs = [], []
    for (_, targets, brows), target in zip(blocks, r):
        for key, b in zip(targets, brows):
            rows.append({c: mpq(p[0]) for c, p in b.items() if p[0]})
            rhs.append(mpq(target.terms.get(key, 0)))
    try:
        linalg.solve(rows, rhs, len(cols))
        return True
    except linalg.InconsistentSystem:
        return False


def test_f2_target_system_is_not_solvable_for_all_targets():
    # an invertible 4x4 matrix would make every target reachable; general f cannot reach (1,0,0,0)
    assert not _general_f2_feasible(4, 1, (1, 0, 0, 0))
    assert _general_f2_feasible(4, 1, (1, 1, 0, 0))


def test_reduce_multiindex():
    n = 4
    f1s = [f1_for_variable(n, i) for i in range(1, n + 1)]
    assert reduce_multiindex((1, 0, 0, 0), f1s) == f1s[0]
    V = vandermonde(n)
    for alpha in [(2, 0, 0, 0), (1, 1, 0, 0), (0, 1, 0, 1)]:
        f = reduce_multiindex(alpha, f1s)
        target = multi_derivative(V, alpha)
        for k in (1, 2):
            assert nabla(f, k) == -dtilde(target, k)


def test_lift_step_examples():
    x1, x2 = Polynomial.var(2, 1), Polynomial.var(2, 2)
    assert not lift_step(2, x1 - x2).particular
    f0 = partial_derivative(vandermonde(3), 1)
    sol = lift_step(3, f0)
    diff = sol.particular - f1_section2(3)
    assert not nabla(diff, 1) and not nabla(diff, 2)
    d1, d2 = lift_defects(sol.particular, f0)
    assert not d1 and not d2
    second = lift_step(3, sol.particular)
    assert not any(lift_defects(second.particular, sol.particular))


def test_kernel_elements_are_killed():
    sol = lift_step(4, partial_derivative(vandermonde(4), 1))
    assert sol.kernel_dim == len(sol.kernel_basis) == 11
    for K in sol.kernel_basis:
        assert not nabla(K, 1) and not nabla(K, 2)


def test_second_step_needs_adjustment_at_n4():
    f0 = partial_derivative(vandermonde(4), 1)
    first = lift_step(4, f0)
    with pytest.raises(LiftInfeasible):
        lift_step(4, first.particular)
    second = lift_step(4, first.particular, prev_kernel=first.kernel_basis)
    f1 = second.adjusted_prev
    assert not any(lift_defects(f1, f0))
    assert not any(lift_defects(second.particular, f1))


def test_lift_chain():
    f0 = partial_derivative(vandermonde(3), 1)
    chain = lift_chain(3, f0, 4)
    prev = f0
    for f in chain:
        assert not any(lift_defects(f, prev))
        prev = f


def test_special_c_values():
    assert special_c(3) == mpq(5, 14)
    assert special_c(5) == mpq(79, 320)
    assert special_c(2) == mpq(-3, 8)


def test_c_tilde_closed_form():
    for n in (5, 6, 7):
        for c in (0, mpq(1, 3)):
            for s in range(4):
                expected = (sign(s) * (s + 4) * (s + 3) * (s + 2) * (s + 1) * 3 * (n - 1) * (c * n + sign(n))
                            / mpq(2 * n * (n * n - 7)))
                assert appendix_coefficients(n, c, s, Which.C_TILDE) == expected


@pytest.mark.parametrize("n", [5, 6, 7])
def test_coefficients_vanish_at_degenerate_c(n):
    c = mpq(sign(n - 1), n)
    for s in range(n - 1):
        for w in (Which.C_TILDE, Which.D_TILDE, Which.C_HAT, Which.D_HAT):
            assert appendix_coefficients(n, c, s, w) == 0


@pytest.mark.parametrize("n", [5, 6, 7])
def test_corrected_coefficients_reproduce_operators(n):
    for c in (special_c(n), 0, 1):
        f = f1_family(n, c)
        for k in (1, 2):
            assert appendix_expansion(n, c, k) == -dtilde(f, k)
            assert appendix_expansion(n, c, k, coefficients=appendix_coefficient_definition) == -dtilde(f, k)


def test_published_coefficient_errata():
    for n in (5, 6, 7, 8):
        for s in range(n - 3):
            for c in (0, 1):
                pub = lambda w: appendix_coefficients(n, c, s, w, source="published")
                cor = lambda w: appendix_coefficients(n, c, s, w)
                for w in (Which.B_TILDE, Which.C_TILDE, Which.D_TILDE, Which.B_HAT, Which.C_HAT, Which.D_HAT):
                    assert pub(w) == cor(w)
                if n % 2 == 0:
                    assert pub(Which.A_TILDE) == cor(Which.A_TILDE)
    assert (appendix_coefficients(7, 1, 1, Which.A_TILDE, source="published")
            != appendix_coefficients(7, 1, 1, Which.A_TILDE))
    assert (appendix_coefficients(6, 0, 0, Which.A_HAT, source="published")
            != appendix_coefficients(6, 0, 0, Which.A_HAT))


def test_printed_hat_definition_drops_a_term():
    n, c = 6, special_c(6)
    printed = lambda nn, cc, s, w: appendix_coefficient_definition(nn, cc, s, w, as_printed=True)
    assert appendix_expansion(n, c, 2, coefficients=printed) != -dtilde(f1_family(n, c), 2)


def test_d_hat_matches_direct_expansion():
    n = 6
    c = special_c(n)
    assert (appendix_coefficients(n, c, 0, Which.D_HAT)
            == appendix_coefficient_definition(n, c, 0, Which.D_HAT))


@pytest.mark.parametrize("n,u", [(6, 0), (7, 1), (8, mpq(-2, 3))])
def test_f2_rhs_check(n, u):
    assert f2_rhs_check(n, u).passed
    assert not f2_rhs_check(n, u, source="published").passed
    bad = f2_rhs_check(n, u, perturb={"w": 1})
    assert not bad.passed and bad.defect


@pytest.mark.parametrize("n", [5, 6, 7])
def test_gsc_special(n):
    c = special_c(n)
    for s in range(n - 1):
        assert gsc_special(n, s) == g_sc(n, s, c)


def test_admissible_c():
    values = {5: mpq(1, 4), 6: mpq(-67, 315), 7: mpq(31, 168), 8: mpq(-41, 252), 9: mpq(157, 1080),
              10: mpq(-13, 99)}
    for n, v in values.items():
        assert admissible_c(n) == v


@pytest.mark.parametrize("n", [5, 6])
def test_solve_f2(n):
    sol = solve_f2(n)
    assert sol.c == admissible_c(n)
    assert not any(lift_defects(sol.f2, sol.f1))
    with pytest.raises(LiftInfeasible):
        solve_f2(n, special_c(n))
