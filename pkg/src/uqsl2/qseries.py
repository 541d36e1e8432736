"""Basic hypergeometric series and the classical identities they satisfy."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .qfield import (
    EXACT,
    InvalidParameterError,
    PoleError,
    QFrac,
    UnsupportedParameterError,
    qpoch_exp,
    qpoch_std,
)

MAX_TERMS = 10_000


@dataclass(frozen=True)
class PhiSpec:
    """Parameters of ``r phi s (upper; lower; q, z)``."""

    upper: tuple
    lower: tuple
    z: object

    @classmethod
    def from_exponents(cls, upper, lower, z, ctx=EXACT):
        """Build a spec whose parameters are ``q**a`` for the given exponents."""
        return cls(tuple(ctx.qpow(a) for a in upper),
                   tuple(ctx.qpow(b) for b in lower), z)


def _negative_qpower(x, ctx):
    """``n`` if ``x == q**(-n)`` for an integer ``n >= 0``, else ``None``."""
    if ctx.exact:
        if (isinstance(x, QFrac) and x.is_laurent() and x.num.degree() == 0
                and x.num.coeffs()[0] == 1 and x.e <= 0 and x.e % 4 == 0):
            return -x.e // 4
        return None
    x = complex(x)
    if x == 0:
        return None
    n = round((cmath.log(x) / math.log(ctx.q)).real)
    if n > 0:
        return None
    n = -n
    if abs(x - ctx.q ** -n) <= ctx.pole_guard * max(1.0, ctx.q ** -n):
        return n
    return None


def termination_order(spec, ctx=EXACT):
    orders = [n for n in (_negative_qpower(a, ctx) for a in spec.upper) if n is not None]
    return min(orders) if orders else None


def phi(spec, ctx=EXACT):
    """Sum the basic hypergeometric series described by ``spec``."""
    r, s = len(spec.upper), len(spec.lower)
    n = termination_order(spec, ctx)
    for b in spec.lower:
        m = _negative_qpower(b, ctx)
        if m is not None and (n is None or n > m):
            raise PoleError(f"lower parameter q^(-{m}) is not admissible")
    if n is None:
        if ctx.exact:
            raise UnsupportedParameterError("non-terminating series needs numeric mode")
        if r == s + 1 and abs(complex(spec.z)) >= 1:
            raise UnsupportedParameterError("series diverges for |z| >= 1")
    one = ctx.one
    qq = ctx.qpow(1)
    extra = s + 1 - r
    total = one
    term = one
    qk = one
    k = 0
    limit = n if n is not None else MAX_TERMS
    while k < limit:
        ratio = spec.z
        for a in spec.upper:
            ratio = ratio * (one - a * qk)
        den = one - qk * qq
        for b in spec.lower:
            den = den * ctx.nonzero(one - b * qk, "lower Pochhammer factor")
        if extra:
            ratio = ratio * (-qk) ** extra if extra > 0 else ratio / (-qk) ** -extra
        term = term * ratio / den
        total = total + term
        k += 1
        qk = qk * qq
        if n is None and abs(term) < ctx.tol * 1e-3 * max(abs(total), 1e-300):
            return total
        if n is not None and not term and ctx.exact:
            break
    if n is None:
        raise UnsupportedParameterError("series did not converge within the term cap")
    return total


def phi_exp(upper, lower, z_exp, ctx=EXACT):
    """``phi`` with every parameter and the argument given as exponents of q.

    Numeric terminating sums are evaluated at raised working precision from
    the exponents themselves: their terms can exceed the result by many orders
    of magnitude, so double-precision parameters alone lose the answer.
    """
    spec = PhiSpec.from_exponents(upper, lower, ctx.qpow(z_exp), ctx)
    if ctx.exact:
        return phi(spec, ctx)
    n = termination_order(spec, ctx)
    if n is None:
        phi(spec, ctx)  # argument checks and a first estimate
        return _phi_precise_infinite(upper, lower, z_exp, ctx)
    for b in spec.lower:
        m = _negative_qpower(b, ctx)
        if m is not None and n > m:
            raise PoleError(f"lower parameter q^(-{m}) is not admissible")
    return _phi_precise(upper, lower, z_exp, n, ctx)


def _phi_precise_infinite(upper, lower, z_exp, ctx):
    # the sum can be smaller than its peak term by any factor; raise the
    # working precision until it covers that cancellation with 20 digits spare
    dps = 30
    while True:
        total, peak = _phi_precise(upper, lower, z_exp, None, ctx, dps)
        lost = math.inf if not total else float(mpmath.log10(peak / abs(total)))
        if lost + 20 <= dps:
            return complex(total)
        if dps >= 300:
            # zero to 280 digits relative to the largest term
            return 0j
        dps = min(300, max(2 * dps, math.ceil(lost) + 40))


def _phi_precise(upper, lower, z_exp, n, ctx, dps=None):
    r, s = len(upper), len(lower)
    if dps is None:
        # terms grow at most like q^(-n^2); keep ~30 digits beyond that
        dps = 30 + math.ceil(n * n * abs(math.log10(ctx.q)) * max(1, r - s))
    with mpmath.workdps(dps):
        lq = mpmath.log(mpmath.mpf(ctx.q))

        def qp(x):
            if isinstance(x, Fraction):
                x = mpmath.mpf(x.numerator) / x.denominator
            return mpmath.exp(mpmath.mpmathify(x) * lq)

        up = [qp(a) for a in upper]
        lo = [qp(b) for b in lower]
        z = qp(z_exp)
        qq = mpmath.mpf(ctx.q)
        extra = s + 1 - r
        total = term = qk = peak = mpmath.mpf(1)
        guard = mpmath.mpf(ctx.pole_guard)
        eps = mpmath.mpf(10) ** (-dps)
        for k in range(n if n is not None else MAX_TERMS):
            ratio = z
            for a in up:
                ratio *= 1 - a * qk
            den = 1 - qk * qq
            for b in lo:
                f = 1 - b * qk
                if abs(f) <= guard:
                    raise PoleError("lower Pochhammer factor vanishes")
                den *= f
            if extra:
                ratio = ratio * (-qk) ** extra
            term = term * ratio / den
            total += term
            qk *= qq
            if n is None:
                peak = max(peak, abs(term))
                if abs(term) < eps * peak and k > 2:
                    return total, peak
        if n is None:
            raise UnsupportedParameterError("series did not converge within the term cap")
        return complex(total)


# ---------------------------------------------------------------------------
# named identities


def _forbid_small_negative(exps, n, ctx, formula):
    """Lower exponents must avoid {0, -1, ..., -(n-1)}."""
    for b in exps:
        if ctx.is_nonneg_int(-b) and -_round(b, ctx) < n:
            raise InvalidParameterError(
                f"{formula}: lower parameter q^({b}) makes a denominator vanish")


def _round(x, ctx):
    return int(x) if ctx.exact else round(complex(x).real)


def _require(cond, msg):
    if not cond:
        raise InvalidParameterError(msg)


def summation_sides(formula_id, params, ctx=EXACT):
    """``(lhs, rhs)`` of a named summation/transformation formula.

    Parameters are passed as exponents (``a`` stands for ``q**a``).  Compare
    the sides relatively: both can be far larger than their difference.
    """
    try:
        fn = _FORMULAS[formula_id]
    except KeyError:
        raise InvalidParameterError(f"unknown formula {formula_id!r}") from None
    return fn(ctx=ctx, **params)


def verify_summation(formula_id, params, ctx=EXACT):
    """Left side minus right side of a named formula; zero when it holds."""
    lhs, rhs = summation_sides(formula_id, params, ctx)
    return lhs - rhs


def _chu(n, a, c, ctx):
    _require(n >= 0, "chu: n must be >= 0")
    _forbid_small_negative([c], n, ctx, "chu")
    lhs = phi_exp([-n, a], [c], 1, ctx)
    rhs = ctx.qpow(a * n) * qpoch_exp(c - a, n, ctx) / qpoch_exp(c, n, ctx)
    return lhs, rhs


def _chu_reversed(n, a, c, ctx):
    _require(n >= 0, "chu_reversed: n must be >= 0")
    _forbid_small_negative([c], n, ctx, "chu_reversed")
    lhs = phi_exp([-n, a], [c], n + c - a, ctx)
    rhs = qpoch_exp(c - a, n, ctx) / qpoch_exp(c, n, ctx)
    return lhs, rhs


def _phi20_limit(n, a, ctx):
    _require(n >= 0, "phi20_limit: n must be >= 0")
    lhs = phi_exp([-n, a], [], n - a, ctx)
    return lhs, ctx.qpow(-a * n)


def _phi11_limit(a, c, ctx):
    spec = PhiSpec.from_exponents([a], [c], ctx.qpow(c - a), ctx)
    n = termination_order(spec, ctx)
    if n is not None:
        # (c q^n; q)_inf / (c; q)_inf collapses to 1 / (c; q)_n
        _forbid_small_negative([c], n, ctx, "phi11_limit")
        return phi(spec, ctx), 1 / qpoch_exp(c, n, ctx)
    if ctx.exact:
        raise UnsupportedParameterError("phi11_limit: non-terminating case needs numeric mode")
    lhs = phi_exp([a], [c], c - a, ctx)
    # (q^(c-a); q)_inf has the factor 1 - q^0 when c - a is a nonpositive integer
    rhs = 0j if ctx.is_nonneg_int(a - c) else qpoch_std(ctx.qpow(c - a), math.inf, ctx)
    rhs = rhs / qpoch_std(ctx.qpow(c), math.inf, ctx)
    return lhs, rhs


def _transform_3phi2(n, a, b, d, e, ctx):
    _require(n >= 0, "transform_3phi2: n must be >= 0")
    _forbid_small_negative([d, e, a - e - n + 1], n, ctx, "transform_3phi2")
    lhs = phi_exp([-n, a, b], [d, e], 1, ctx)
    rhs = (ctx.qpow(a * n) * qpoch_exp(e - a, n, ctx) / qpoch_exp(e, n, ctx)
           * phi_exp([-n, a, d - b], [d, a - e - n + 1], b - e + 1, ctx))
    return lhs, rhs


def _sears(n, a, b, c, d, e, f, ctx):
    _require(n >= 0, "sears: n must be >= 0")
    balance = a + b + c - n + 1 - (d + e + f)
    _require(ctx.is_zero(ctx.const(balance)) if not ctx.exact else balance == 0,
             f"sears: series not balanced (a+b+c-n+1 = {a + b + c - n + 1}, d+e+f = {d + e + f})")
    g = e + f - a - b - c
    _forbid_small_negative([d, e, f, e + f - a - b, e + f - a - c, 1 - n - a, g], n, ctx, "sears")
    lhs = phi_exp([-n, a, b, c], [d, e, f], 1, ctx)
    pref = (qpoch_exp(a, n, ctx) * qpoch_exp(e + f - a - b, n, ctx) * qpoch_exp(e + f - a - c, n, ctx)
            / (qpoch_exp(e, n, ctx) * qpoch_exp(f, n, ctx) * qpoch_exp(g, n, ctx)))
    rhs = pref * phi_exp([-n, e - a, f - a, g], [e + f - a - b, e + f - a - c, 1 - n - a], 1, ctx)
    return lhs, rhs


def _exp_inverse(order, ctx):
    _require(order >= 0, "exp_inverse: order must be >= 0")
    small = q_exp("e_q", order, ctx)
    big = q_exp("E_q", order, ctx, z=-ctx.one)
    worst = ctx.zero
    for k in range(order + 1):
        c = sum((small[i] * big[k - i] for i in range(k + 1)), ctx.zero)
        c = c - (ctx.one if k == 0 else ctx.zero)
        if ctx.exact:
            if c and not worst:
                worst = c
        elif abs(c) > abs(worst):
            worst = c
    return worst, ctx.zero


_FORMULAS = {
    "chu": _chu,
    "chu_reversed": _chu_reversed,
    "phi20_limit": _phi20_limit,
    "phi11_limit": _phi11_limit,
    "transform_3phi2": _transform_3phi2,
    "sears": _sears,
    "exp_inverse": _exp_inverse,
}

FORMULA_IDS = tuple(_FORMULAS)


# ---------------------------------------------------------------------------
# orthogonal polynomials and exponentials


def q_hahn(n, x, a_exp, b_exp, N, ctx=EXACT):
    """q-Hahn polynomial ``Q_n(q^-x; q^a_exp, q^b_exp, N)``."""
    if N < 0 or not 0 <= n <= N or not 0 <= x <= N:
        raise InvalidParameterError(f"q_hahn needs 0 <= n, x <= N (n={n}, x={x}, N={N})")
    return phi_exp([-n, n + 1 + a_exp + b_exp, -x], [1 + a_exp, -N], 1, ctx)


def q_racah_params(m, n, lam, gamma, delta, s):
    upper = [-n, -m, lam - gamma + n + 1, -lam + delta - 2 * s + m - 1]
    lower = [-s, -gamma, delta - s + 1]
    return upper, lower


def q_racah(m, n, lam, gamma, delta, s, ctx=EXACT):
    """The balanced terminating 4phi3 in the exchange matrix entries."""
    if not (0 <= m <= s and 0 <= n <= s):
        raise InvalidParameterError(f"q_racah needs 0 <= m, n <= s (m={m}, n={n}, s={s})")
    upper, lower = q_racah_params(m, n, lam, gamma, delta, s)
    excess = sum(lower) - sum(upper) - 1
    if (excess != 0) if ctx.exact else abs(complex(excess)) > ctx.pole_guard:
        raise InvalidParameterError("q_racah: 4phi3 is not balanced")
    return phi_exp(upper, lower, 1, ctx)


def q_exp(kind, order, ctx=EXACT, z=None):
    """Coefficients of ``e_q`` or ``E_q`` up to ``z**order``.

    With ``z`` given, the k-th entry is the k-th term ``c_k z**k`` instead.
    """
    if order < 0:
        raise InvalidParameterError("order must be >= 0")
    if kind not in ("e_q", "E_q"):
        raise InvalidParameterError(f"unknown q-exponential {kind!r}")
    out = []
    zk = ctx.one
    for k in range(order + 1):
        c = 1 / qpoch_exp(1, k, ctx)
        if kind == "E_q":
            c = c * ctx.qpow(k * (k - 1) // 2)
        if z is not None:
            c = c * zk
            zk = zk * z
        out.append(c)
    return out
