from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from uqsl2.qfield import EXACT, NUMERIC, InvalidParameterError, bracket, qpoch_bracket
from uqsl2.repsl2 import (
    GenElement, GenTerm, ModuleId, TensorElement, act_e, act_f, act_h, act_iterated, act_pow, act_qh,
    basis_indices, casimir_act, compare_elements, flip, gen_apply, hf_inv_poch, normal_order,
    normalized_basis, permute, r_act, shapovalov,
)

M = ModuleId.verma
V = ModuleId.finite_dim


def basis(mods, idx, ctx=EXACT):
    return TensorElement.basis(mods, idx, ctx)


def zero_residual(a, b, ctx=EXACT):
    res = compare_elements(a, b, ctx)
    assert res.ok, (res.worst, res.max_abs)


def random_element(draw, mods, depth):
    idxs = [i for i in basis_indices(mods, depth)]
    chosen = draw(st.lists(st.sampled_from(idxs), min_size=1, max_size=4, unique=True))
    coefs = draw(st.lists(st.integers(-3, 3).filter(bool), min_size=len(chosen), max_size=len(chosen)))
    return TensorElement(mods, {i: EXACT.const(c) for i, c in zip(chosen, coefs)})


modules = st.one_of(st.integers(-7, -1).map(M), st.integers(0, 4).map(V))


# --- examples ------------------------------------------------------------------

def test_single_factor_actions():
    lam = -5
    top = basis((M(lam),), (0,))
    assert not act_e(top)
    assert act_e(basis((M(lam),), (1,))).coeff((0,)) == bracket(lam)
    assert not act_f(basis((V(2),), (2,)))
    # e^2 on x_{lam-4}: (-1)^2 ([-2])_2 ([lam-1])_2 x_lam
    got = act_pow("e", 2, basis((M(lam),), (2,))).coeff((0,))
    assert got == qpoch_bracket(-2, 2) * qpoch_bracket(lam - 1, 2)
    assert act_pow("f", 3, top).coeffs == {(3,): 1}


def test_finite_module_is_killed_by_high_powers_of_e():
    for hw in range(7):
        for k in range(hw + 1):
            assert not act_pow("e", hw + 1, basis((V(hw),), (k,)))
            assert not act_pow("f", hw + 1, basis((V(hw),), (k,)))


def test_normal_ordering_example():
    x = basis((M(-5),), (0,))
    direct = act_pow("e", 2, act_pow("f", 2, x))
    zero_residual(gen_apply(normal_order(2, 2), x), direct)
    assert gen_apply(GenElement.identity(), x).coeffs == x.coeffs


def test_h_function_example():
    x = basis((M(-5),), (1,))
    g = GenElement([GenTerm(EXACT.one, 0, 0, hf_inv_poch(5, 1))])  # 1/([-lam + h])_1 at lam = -5
    assert gen_apply(g, x).coeff((1,)) == 1 / bracket(-2)


def test_coproduct_examples():
    t = basis((M(-3), M(-4)), (0, 0))
    assert not act_e(t)
    t2 = basis((M(-3), M(-4)), (1, 2))
    assert act_h(t2).coeff((1, 2)) == -3 - 4 - 6
    zero_residual(act_pow("f", 2, t), act_iterated("f", 2, t))


def test_r_matrix_on_highest_weights():
    t = basis((M(-3), M(-4)), (0, 0))
    assert r_act(t).coeffs == {(0, 0): EXACT.qpow(Fraction(12, 4))}


def test_casimir_examples():
    assert not casimir_act(basis((V(0),), (0,)))
    for k in range(3):
        got = casimir_act(basis((V(2),), (k,))).coeff((k,))
        assert got == bracket(1) * bracket(2)
    x = basis((M(-5),), (0,))
    for k in range(8):
        zero_residual(casimir_act(act_f(x)), act_f(casimir_act(x)))
        x = act_f(x)


def test_shapovalov_examples():
    lam = -5
    x = basis((M(lam),), (0,))
    assert shapovalov(x, x) == 1
    assert shapovalov(act_f(x), act_f(x)) == -bracket(-lam)
    assert shapovalov(act_f(x), act_f(x)) == bracket(lam)


def test_normalized_basis():
    assert normalized_basis(1, 1).coeffs == {(0,): 1}
    # scale of e^{1/2}_{-1/2}: ([j+m+1])_{j-m} [j-m]! = [1][1]! = 1
    v = normalized_basis(Fraction(1, 2), Fraction(-1, 2))
    assert list(v.coeffs.values())[0] == 1
    for j2 in range(5):
        j = Fraction(j2, 2)
        ms = [j - k for k in range(j2 + 1)]
        for m in ms:
            for mp in ms:
                val = shapovalov(normalized_basis(j, m), normalized_basis(j, mp))
                assert val == (1 if m == mp else 0)
    with pytest.raises(InvalidParameterError):
        normalized_basis(1, 2)


def test_module_validation():
    with pytest.raises(InvalidParameterError):
        V(-1)
    with pytest.raises(InvalidParameterError):
        ModuleId.spin(Fraction(1, 3))
    with pytest.raises(InvalidParameterError):
        basis((V(2),), (3,))


# --- algebra relations (properties) ---------------------------------------------------

@given(st.lists(modules, min_size=1, max_size=3), st.data())
def test_commutator_relation(mods, data):
    # e f - f e = [h] on single factors and through the coproduct
    x = random_element(data.draw, tuple(mods), 3)
    lhs = act_e(act_f(x)) - act_f(act_e(x))
    rhs = TensorElement(x.modules, {i: c * bracket(x.weight(i)) for i, c in x.items()})
    zero_residual(lhs, rhs)


@given(st.lists(modules, min_size=1, max_size=3), st.data())
def test_weight_conjugation(mods, data):
    # q^{h/4} e q^{-h/4} = q^{1/2} e
    x = random_element(data.draw, tuple(mods), 3)
    lhs = act_qh(Fraction(1, 4), act_e(act_qh(Fraction(-1, 4), x)))
    zero_residual(lhs, act_e(x).scale(EXACT.qpow(Fraction(1, 2))))


@given(st.lists(modules, min_size=2, max_size=3), st.integers(0, 4), st.data())
def test_closed_power_matches_iteration(mods, j, data):
    x = random_element(data.draw, tuple(mods), 3)
    for gen in ("e", "f"):
        zero_residual(act_pow(gen, j, x), act_iterated(gen, j, x))


@given(modules, modules, st.data())
def test_flip_r_intertwines_coproduct(a, b, data):
    t = random_element(data.draw, (a, b), 4)
    pr = lambda u: flip(r_act(u))  # noqa: E731
    for act in (act_e, act_f):
        zero_residual(pr(act(t)), act(pr(t)))


@given(modules, modules, modules, st.data())
def test_yang_baxter(a, b, c, data):
    t = random_element(data.draw, (a, b, c), 3)
    lhs = r_act(r_act(r_act(t, factors=(1, 2)), factors=(0, 2)), factors=(0, 1))
    rhs = r_act(r_act(r_act(t, factors=(0, 1)), factors=(0, 2)), factors=(1, 2))
    zero_residual(lhs, rhs)


@given(modules, modules, st.data())
def test_r_preserves_weight(a, b, data):
    t = random_element(data.draw, (a, b), 4)
    ws = {t.weight(i) for i in t.coeffs}
    out = r_act(t)
    assert {out.weight(i) for i in out.coeffs} <= ws


@given(st.lists(modules, min_size=1, max_size=2), st.data())
def test_shapovalov_adjointness(mods, data):
    u = random_element(data.draw, tuple(mods), 4)
    w = random_element(data.draw, tuple(mods), 4)
    assert shapovalov(act_e(u), w) == shapovalov(u, act_f(w))


@given(st.integers(0, 3), st.integers(0, 3), st.integers(-7, -1), st.integers(0, 3))
def test_normal_ordering(m, n, lam, k):
    x = basis((M(lam),), (k,))
    zero_residual(gen_apply(normal_order(m, n), x), act_pow("e", m, act_pow("f", n, x)))


@given(modules, modules, st.data())
def test_exact_and_numeric_agree(a, b, data):
    t = random_element(data.draw, (a, b), 3)
    ex = r_act(act_f(t))
    tn = TensorElement(t.modules, {i: complex(c.at_q()) for i, c in t.items()})
    nu = r_act(act_f(tn, NUMERIC), NUMERIC)
    for i in set(ex.coeffs) | set(nu.coeffs):
        assert abs(ex.coeff(i).at_q() - nu.coeff(i, NUMERIC)) <= 1e-9 * max(1, abs(nu.coeff(i, NUMERIC)))


def test_permute_roundtrip():
    t = basis((M(-3), V(2), M(-5)), (1, 2, 0))
    assert permute(permute(t, (2, 0, 1)), (1, 2, 0)).coeffs == t.coeffs
