from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from uqsl2.qfield import NUMERIC, InvalidParameterError, QError
from uqsl2.repsl2 import ModuleId, TensorElement
from uqsl2.fusion import (
    boundary_apply, check_abrr, check_abrr_recursion, check_boundary_factorized,
    check_boundary_inverse, check_cocycle, check_fusion_defining, check_fusion_inverse,
    check_r0_terms, check_sb1, check_sb20, check_coproduct_twist, fusion_apply, fusion_block, fusion_elem,
    fusion_inv_apply, fusion_inv_elem,
)

M = ModuleId.verma
V = ModuleId.finite_dim


def zero(res):
    assert res.ok, (res.worst, res.max_abs)


def pair(delta, gamma, a, b):
    return TensorElement.basis((M(delta), M(gamma)), (a, b))


# --- matrix elements --------------------------------------------------------------

def test_diagonal_is_one():
    for s in range(5):
        for m in range(s + 1):
            assert fusion_elem(-4, -3, s, m, m, -25) == 1
            assert fusion_inv_elem(-4, -3, s, m, m, -25) == 1


def test_inverse_example_lambda_is_a_pole():
    with pytest.raises(QError):
        check_fusion_inverse(-4, -3, 6, -9)


@pytest.mark.parametrize("delta,gamma,lam", [(-4, -3, -25), (-2, -5, -31), (-6, -4, Fraction(-21, 2))])
def test_inverse_relation(delta, gamma, lam):
    for s in range(7):
        zero(check_fusion_inverse(delta, gamma, s, lam))
        zero(check_fusion_inverse(delta, gamma, s, lam, NUMERIC))


@given(st.integers(-9, -1), st.integers(-9, -1), st.integers(-100, -52), st.integers(0, 8))
def test_inverse_relation_property(delta, gamma, twice_lam, s):
    lam = Fraction(twice_lam, 2)
    zero(check_fusion_inverse(delta, gamma, s, lam))


def test_constraint_violation():
    with pytest.raises(InvalidParameterError):
        fusion_elem(-4, -3, 2, 0, 2, 1)  # lam - gamma + 2n = 8
    with pytest.raises(InvalidParameterError):
        fusion_elem(-4, -3, 2, 2, 1, -25)


def test_elements_match_universal_action():
    # J(lam) on x^delta_{delta-2s+2n} (x) x^gamma_{gamma-2n}, read in the same basis
    delta, gamma, lam = -4, -3, -25
    for s in range(5):
        for n in range(s + 1):
            out = fusion_apply(pair(delta, gamma, s - n, n), lam)
            for m in range(s + 1):
                got = out.coeff((s - m, m))
                assert got == (fusion_elem(delta, gamma, s, m, n, lam) if m <= n else 0)


def test_inverse_series_matches_elements():
    delta, gamma, lam = -5, -2, -31
    for s in range(4):
        for n in range(s + 1):
            out = fusion_inv_apply(pair(delta, gamma, s - n, n), lam)
            for m in range(n + 1):
                assert out.coeff((s - m, m)) == fusion_inv_elem(delta, gamma, s, m, n, lam)


def test_block_shape():
    block = fusion_block(-4, -3, 3, -25)
    assert all(block[m][n] == 0 for m in range(4) for n in range(m))


# --- the operator -------------------------------------------------------------------

def test_highest_weight_pair_unchanged():
    t = pair(-4, -3, 2, 0)
    assert fusion_apply(t, -25).coeffs == t.coeffs


@given(st.integers(-9, -1), st.integers(-9, -1), st.integers(0, 3), st.integers(0, 3))
def test_weight_preserved(delta, gamma, a, b):
    t = pair(delta, gamma, a, b)
    out = fusion_apply(t, -31)
    assert all(out.weight(i) == t.weight((a, b)) for i in out.coeffs)


@pytest.mark.parametrize("lam", [-25, -31])
def test_defining_property(lam):
    for a in range(3):
        for b in range(3):
            w = TensorElement.basis((M(-3),), (a,))
            v = TensorElement.basis((M(-4),), (b,))
            zero(check_fusion_defining(lam, w, v, n_max=3, depth=8))


def test_defining_property_finite_dim():
    w = TensorElement.basis((V(2),), (1,))
    v = TensorElement.basis((V(1),), (0,))
    zero(check_fusion_defining(-21, w, v, n_max=3, depth=8))


# --- cocycle and coproduct twist ------------------------------------------------------------------

def test_cocycle_depth_zero():
    zero(check_cocycle(-31, (M(-3), M(-4), M(-5)), depth=0))


def test_cocycle_example_lambda_is_a_pole():
    with pytest.raises(QError):
        check_cocycle(-11, (M(-3), M(-4), M(-5)), depth=4)


@pytest.mark.parametrize("lam", [-31, Fraction(-21, 2)])
def test_cocycle(lam):
    zero(check_cocycle(lam, (M(-3), M(-4), M(-5)), depth=4))


def test_cocycle_numeric_and_finite():
    zero(check_cocycle(-31, (M(-3), M(-4), M(-5)), depth=3, ctx=NUMERIC))
    zero(check_cocycle(-9, (V(1), V(2), V(1))))


def test_coproduct_twist():
    for m in range(3):
        for n in range(3):
            zero(check_coproduct_twist(-25, (M(-3), M(-4)), m, n, depth=5))


# --- ABRR ----------------------------------------------------------------------------------

def test_abrr_terms():
    x = pair(-3, -4, 1, 1)
    assert fusion_apply(x, -7, terms=[0]).coeffs == x.coeffs
    for n in range(2):
        zero(check_abrr_recursion(n, -7, (M(-3), M(-4)), depth=1))
    for n in range(4):
        zero(check_abrr_recursion(n, -31, (M(-3), M(-4)), depth=4))
    zero(check_r0_terms((M(-3), M(-4)), depth=4))


def test_abrr_example_lambda_is_a_pole():
    with pytest.raises(QError):
        check_abrr(-9, (M(-3), M(-4)), depth=6)


@pytest.mark.parametrize("lam,mods", [(-31, (M(-3), M(-4))), (Fraction(-41, 2), (M(-2), M(-5)))])
def test_abrr(lam, mods):
    zero(check_abrr(lam, mods, depth=6))


def test_abrr_finite_dim():
    zero(check_abrr(-21, (V(2), V(3))))


# --- shifted boundary -------------------------------------------------------------------

def test_boundary_leading_term():
    x = TensorElement.basis((V(2),), (0,))
    out = boundary_apply(x, -9)
    assert out.coeff((0,)) == 1


@pytest.mark.parametrize("hw", range(7))
def test_boundary_inverse(hw):
    zero(check_boundary_inverse(-9, V(hw)))


@pytest.mark.parametrize("hw", range(5))
def test_boundary_factorized(hw):
    zero(check_boundary_factorized(-9, V(hw)))


def test_boundary_coproduct_example_lambda_is_a_pole():
    with pytest.raises(QError):
        check_sb1(-11, (M(-4), M(-5)), depth=5)


def test_boundary_coproduct():
    zero(check_sb1(-31, (M(-4), M(-5)), depth=5))
    zero(check_sb1(-9, (V(2), V(1))))
    zero(check_sb1(-31, (M(-3), M(-4)), depth=0))


def test_boundary_gauge_freedom():
    gauge = lambda lam, ctx: ctx.qpow(lam)  # noqa: E731
    zero(check_sb1(-9, (V(2), V(1)), gauge=gauge))
    zero(check_sb1(-31, (M(-3), M(-4)), depth=4, gauge=gauge))


def test_conjugation():
    zero(check_sb20(-9, V(4)))
    for hw in range(7):
        zero(check_sb20(-9, V(hw)))
    zero(check_sb20(-20, M(-3), depth=5))


@given(st.integers(-60, -12), st.integers(0, 3))
def test_boundary_inverse_property(lam, hw):
    zero(check_boundary_inverse(lam, V(hw)))
