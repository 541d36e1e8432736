import math
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, strategies as st

from uqsl2.qfield import (
    EXACT, NUMERIC, EvalContext, InvalidParameterError, PoleError, QFrac, Radical,
    UnsupportedParameterError, bracket, bracket_binom, compare, qbinom, qfact,
    qpoch_bracket, qpoch_exp, qpoch_std, quarter_units,
)
from conftest import V, exact_at, to_sympy

Q = Fraction(1, 16)  # q at v = 1/2


def qp(x):
    """q**x for quarter-integer x, exactly."""
    k = Fraction(x) * 4
    assert k.denominator == 1
    return Fraction(1, 2) ** int(k)


def q_std(x, k, q=Q):
    out = Fraction(1)
    for j in range(k):
        out *= 1 - x * q**j
    return out


def bracket_ref(a, q=Q):
    # v = q^(1/4) = 1/2, so q^(a/2) = v^(2a) stays rational for integer 2a
    v = Fraction(1, 2)
    return (v ** (2 * a) - v ** (-2 * a)) / (v**2 - v**-2)


# --- examples ---------------------------------------------------------------

def test_bracket_examples():
    assert not bracket(0)
    assert bracket(1) == 1
    assert to_sympy(bracket(2)) == V**2 + V**-2
    assert str(bracket(2)) == str(QFrac.laurent({2: 1, -2: 1}))


def test_qfact_examples():
    assert qfact(0) == 1
    assert to_sympy(qfact(2)) - (V**2 + V**-2) == 0


def test_pochhammer_conversion_numeric_example():
    # [a]_k = q^{-k(a-1)/2} q^{-k(k-1)/4} (q^a;q)_k / (1-q)^k at a=3, k=2
    q = 0.3
    lhs = complex(qpoch_bracket(3, 2, NUMERIC))
    rhs = q ** (-2 * 2 / 2) * q ** (-2 / 4) * (1 - q**3) * (1 - q**4) / (1 - q) ** 2
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_std_pochhammer_and_binomial_examples():
    assert qpoch_std(QFrac.const(7), 0) == 1
    for n in range(7):
        assert qbinom(n, 0) == 1
        for k in range(n + 1):
            assert qbinom(n, k) == qbinom(n, n - k)


def test_binomial_conversion_example():
    # [n]!/([k]![n-k]!) = q^{-k(n-k)/2} qbinom(n, k) at n=4, k=2
    lhs = qfact(4) / (qfact(2) * qfact(2))
    assert lhs == EXACT.qpow(Fraction(-2 * 2, 2)) * qbinom(4, 2)


def test_infinite_pochhammer_needs_numeric():
    with pytest.raises(UnsupportedParameterError):
        qpoch_std(QFrac.const(Fraction(1, 2)), math.inf, EXACT)
    got = qpoch_std(0.5, math.inf, NUMERIC)
    assert got.real == pytest.approx(float(mpmath.qp(0.5, 0.3)), rel=1e-14)


def test_exact_mode_rejects_non_quarter_exponents():
    with pytest.raises(UnsupportedParameterError):
        bracket(Fraction(1, 3))
    with pytest.raises(UnsupportedParameterError):
        quarter_units(Fraction(1, 8))


def test_context_validation():
    for bad in (dict(mode="symbolic"), dict(q=1.0), dict(q=0.0), dict(tol=0), dict(depth=0),
                dict(pole_guard=-1)):
        with pytest.raises(InvalidParameterError):
            EvalContext(**bad)


def test_nonzero_guard():
    with pytest.raises(PoleError):
        EXACT.nonzero(bracket(0))
    with pytest.raises(PoleError):
        NUMERIC.nonzero(1e-14)


# --- canonical form ----------------------------------------------------------

def test_canonical_form_is_syntactic():
    a = QFrac.laurent({1: 1, -1: 1})
    b = (a * a) / a
    assert str(a) == str(b) and a == b and hash(a) == hash(b)
    # denominator normalised: lowest coefficient 1
    x = QFrac.const(3) / QFrac.laurent({0: 6, 4: 2})
    assert sympy.simplify(to_sympy(x) - sympy.Rational(1, 2) / (1 + V**4 / 3)) == 0
    assert str(x).endswith("/(1/3*v^(4) + 1)")


laurent = st.dictionaries(st.integers(-6, 6), st.integers(-5, 5), max_size=4).map(QFrac.laurent)


@given(laurent, laurent, laurent)
def test_field_operations_match_sympy(a, b, c):
    expr = to_sympy(a) * to_sympy(b) + to_sympy(c)
    assert sympy.simplify(to_sympy(a * b + c) - expr) == 0
    if b:
        assert sympy.simplify(to_sympy(a / b) - to_sympy(a) / to_sympy(b)) == 0
        assert (a / b) * b == a


@given(laurent, laurent)
def test_equal_values_have_equal_strings(a, b):
    # (a+b)^2 built two ways
    x = (a + b) * (a + b)
    y = a * a + 2 * a * b + b * b
    assert x == y and str(x) == str(y)


# --- q-numbers against direct evaluation ---------------------------------------

@given(st.integers(-12, 12))
def test_bracket_matches_definition(a):
    assert exact_at(bracket(a)) == bracket_ref(a)
    assert bracket(-a) == -bracket(a)


@given(st.integers(-12, 12).map(lambda k: Fraction(k, 2)))
def test_bracket_half_integer_numeric_agreement(a):
    q = 0.3
    ref = (q ** (float(a) / 2) - q ** (-float(a) / 2)) / (q**0.5 - q**-0.5)
    assert complex(bracket(a, NUMERIC)).real == pytest.approx(ref, rel=1e-12, abs=1e-15)
    assert bracket(a).at_q(q).real == pytest.approx(ref, rel=1e-12, abs=1e-15)


@given(st.integers(-10, 10), st.integers(0, 10))
def test_pochhammer_conversion_exact(a, k):
    # bracket Pochhammer vs the standard one
    lhs = qpoch_bracket(a, k)
    ref = qp(Fraction(-k * (a - 1), 2)) * qp(Fraction(-k * (k - 1), 4)) * q_std(qp(a), k) / (1 - Q) ** k
    assert exact_at(lhs) == ref
    assert (not lhs) == (a <= 0 and -a <= k - 1)


@given(st.integers(0, 10), st.data())
def test_binomial_conversion_exact(n, data):
    k = data.draw(st.integers(0, n))
    lhs = qfact(n) / (qfact(k) * qfact(n - k))
    ref = qp(Fraction(-k * (n - k), 2)) * q_std(Q, n) / (q_std(Q, k) * q_std(Q, n - k))
    assert exact_at(lhs) == ref
    assert lhs == bracket_binom(n, k)


@given(st.integers(-10, 10), st.integers(-10, 10), st.integers(0, 8))
def test_pochhammer_ratio_identity(a, b, k):
    den = qpoch_bracket(b, k)
    if not den or not qpoch_exp(b, k):
        return
    lhs = qpoch_bracket(a, k) / den
    rhs = EXACT.qpow(Fraction(-k * (a - b), 2)) * qpoch_exp(a, k) / qpoch_exp(b, k)
    assert lhs == rhs


@given(st.integers(-8, 8), st.integers(0, 8))
def test_exact_and_numeric_modes_agree(a, k):
    ex = qpoch_bracket(a, k, EXACT).at_q(0.3)
    nu = qpoch_bracket(a, k, NUMERIC)
    assert abs(ex - nu) <= 1e-10 * max(1, abs(nu))


# --- radicals and residuals ----------------------------------------------------------

def test_radical_arithmetic():
    r = EXACT.sqrt(bracket(3))
    assert r * r == bracket(3)
    assert (r * 2 - r) == r
    assert r.at_q(0.3) == pytest.approx(math.sqrt(bracket(3).at_q(0.3).real))
    s = EXACT.sqrt(bracket(2))
    with pytest.raises(UnsupportedParameterError):
        r + s
    assert isinstance(r / s, Radical) and (r / s) * s == r


def test_compare_reports():
    res = compare([("a", QFrac.const(1), QFrac.const(1)), ("b", bracket(2), bracket(2))], EXACT)
    assert res.ok and res.magnitude() == "0" and res.count == 2
    bad = compare([("x", bracket(2), bracket(3))], EXACT)
    assert not bad.ok and bad.worst == "x" and bad.magnitude() != "0"
    num = compare([("y", 1.0, 1.0 + 1e-12)], NUMERIC)
    assert num.ok and 0 < float(num.magnitude()) < 1e-9
    assert not compare([("z", 1.0, 1.001)], NUMERIC).ok
