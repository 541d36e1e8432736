from fractions import Fraction

import sympy
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

V = sympy.Symbol("v")


def to_sympy(x):
    """Parse the canonical string of an exact scalar into a sympy expression in v."""
    return sympy.sympify(str(x).replace("^", "**"), locals={"v": V})


def exact_at(x, v=Fraction(1, 2)):
    """Exact rational value of an exact scalar at ``v`` (so ``q = v**4``)."""
    val = sympy.Rational(to_sympy(x).subs(V, sympy.Rational(v.numerator, v.denominator)))
    return Fraction(int(val.p), int(val.q))
