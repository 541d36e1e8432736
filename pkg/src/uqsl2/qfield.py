"""Scalar arithmetic over the field of q-numbers.

Two interchangeable scalar models are provided:

* exact: :class:`QFrac`, a reduced fraction of Laurent polynomials in the
  formal variable ``v = q**(1/4)`` with rational coefficients (FLINT backed);
* numeric: Python ``complex`` at a fixed real ``0 < q < 1``.

All formulas in the package are written once against an :class:`EvalContext`,
which produces scalars of the right kind (``ctx.qpow``, ``ctx.one`` ...).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from flint import fmpq, fmpq_poly

SAMPLE_Q = 0.3


class QError(ValueError):
    """Base class for parameter errors raised by the kernel."""


class UnsupportedParameterError(QError):
    pass


class InvalidParameterError(QError):
    pass


class PoleError(QError, ZeroDivisionError):
    pass


# ---------------------------------------------------------------------------
# exact scalars

_ONE_POLY = fmpq_poly([1])
_ZERO_POLY = fmpq_poly([])


def _valuation(p):
    for i, c in enumerate(p.coeffs()):
        if c != 0:
            return i
    raise ValueError("zero polynomial has no valuation")


def _shift_down(p, k):
    return fmpq_poly(p.coeffs()[k:]) if k else p


class QFrac:
    """``v**e * num(v) / den(v)`` in canonical form.

    Canonical form: ``num(0) != 0``, ``den(0) == 1``, ``gcd(num, den) == 1``;
    zero is ``(0, 0, 1)``.  Equality is therefore structural.
    """

    __slots__ = ("e", "num", "den", "_hash")

    def __init__(self, e=0, num=_ONE_POLY, den=_ONE_POLY, _canonical=False):
        if not _canonical:
            e, num, den = _canonicalize(e, num, den)
        self.e = e
        self.num = num
        self.den = den
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def const(cls, c):
        c = fmpq(c.numerator, c.denominator) if isinstance(c, Fraction) else fmpq(c)
        if c == 0:
            return QFRAC_ZERO
        return cls(0, fmpq_poly([c]), _ONE_POLY, _canonical=True)

    @classmethod
    def monomial(cls, k, c=1):
        return _monomial(k) if c == 1 else cls.const(c) * _monomial(k)

    @classmethod
    def laurent(cls, coeffs):
        """Build from a ``{exponent: coefficient}`` mapping."""
        coeffs = {k: c for k, c in coeffs.items() if c != 0}
        if not coeffs:
            return QFRAC_ZERO
        lo = min(coeffs)
        hi = max(coeffs)
        dense = [0] * (hi - lo + 1)
        for k, c in coeffs.items():
            dense[k - lo] = fmpq(c.numerator, c.denominator) if isinstance(c, Fraction) else c
        return cls(lo, fmpq_poly(dense), _ONE_POLY, _canonical=True)

    # predicates ----------------------------------------------------------
    def __bool__(self):
        return self.num != 0

    def is_laurent(self):
        return self.den == _ONE_POLY

    def __eq__(self, other):
        if isinstance(other, QFrac):
            return self.e == other.e and self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self == QFrac.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.e, str(self.num), str(self.den)))
        return self._hash

    # arithmetic ------------------------------------------------------------
    def __neg__(self):
        return QFrac(self.e, -self.num, self.den, _canonical=True)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other:
            return self
        if not self:
            return other
        e = min(self.e, other.e)
        a = self.num * _vpow(self.e - e)
        b = other.num * _vpow(other.e - e)
        if self.den == other.den:
            num, den = a + b, self.den
            if num == 0:
                return QFRAC_ZERO
            return QFrac(e, num, den)
        g = self.den.gcd(other.den)
        if g == _ONE_POLY:
            return QFrac(e, a * other.den + b * self.den, self.den * other.den)
        d1 = self.den // g
        d2 = other.den // g
        return QFrac(e, a * d2 + b * d1, d1 * d2 * g)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return QFRAC_ZERO
            c = fmpq(other.numerator, other.denominator)
            return QFrac(self.e, self.num * c, self.den, _canonical=True) if self else self
        if not isinstance(other, QFrac):
            return NotImplemented
        if not self or not other:
            return QFRAC_ZERO
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        if d1 == _ONE_POLY and d2 == _ONE_POLY:
            return QFrac(self.e + other.e, n1 * n2, _ONE_POLY, _canonical=True)
        if d2 != _ONE_POLY and n1.degree() > 0:
            g = n1.gcd(d2)
            if g != _ONE_POLY:
                n1, d2 = n1 // g, d2 // g
        if d1 != _ONE_POLY and n2.degree() > 0:
            g = n2.gcd(d1)
            if g != _ONE_POLY:
                n2, d1 = n2 // g, d1 // g
        num, den = n1 * n2, d1 * d2
        c = den.coeffs()[0]
        if c != 1:
            num, den = num / c, den / c
        return QFrac(self.e + other.e, num, den, _canonical=True)

    __rmul__ = __mul__

    def inverse(self):
        if not self:
            raise PoleError("division by an exact zero")
        return QFrac(-self.e, self.den, self.num)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = QFRAC_ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # evaluation and display --------------------------------------------------
    def evaluate(self, v):
        """Value at a numeric ``v`` (i.e. at ``q = v**4``)."""
        return _horner(self.num, v) / _horner(self.den, v) * v ** self.e

    def at_q(self, q=SAMPLE_Q):
        return self.evaluate(complex(q) ** 0.25)

    def __complex__(self):
        return complex(self.at_q())

    def __str__(self):
        num = _poly_str(self.num, self.e)
        if self.den == _ONE_POLY:
            return num
        return f"({num})/({_poly_str(self.den, 0)})"

    def __repr__(self):
        return f"QFrac({str(self)!r})"


def _horner(p, v):
    acc = 0j
    for c in reversed(p.coeffs()):
        acc = acc * v + float(c)
    return acc


def _poly_str(p, shift):
    terms = []
    for i, c in enumerate(p.coeffs()):
        if c == 0:
            continue
        k = i + shift
        mono = "" if k == 0 else f"v^({k})"
        if not mono:
            body = str(c)
        elif c == 1:
            body = mono
        elif c == -1:
            body = "-" + mono
        else:
            body = f"{c}*{mono}"
        terms.append(body)
    if not terms:
        return "0"
    terms.reverse()
    out = terms[0]
    for t in terms[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out


def _canonicalize(e, num, den):
    if den == 0:
        raise PoleError("zero denominator")
    if num == 0:
        return 0, _ZERO_POLY, _ONE_POLY
    a = _valuation(num)
    if a:
        num = _shift_down(num, a)
        e += a
    b = _valuation(den)
    if b:
        den = _shift_down(den, b)
        e -= b
    if den.degree() > 0 and num.degree() > 0:
        g = num.gcd(den)
        if g != _ONE_POLY:
            num = num // g
            den = den // g
    c = den.coeffs()[0]
    if c != 1:
        num = num / c
        den = den / c
    return e, num, den


@lru_cache(maxsize=None)
def _vpow(k):
    return fmpq_poly([0] * k + [1]) if k else _ONE_POLY


@lru_cache(maxsize=4096)
def _monomial(k):
    return QFrac(k, _ONE_POLY, _ONE_POLY, _canonical=True)


def _coerce(x):
    if isinstance(x, QFrac):
        return x
    if isinstance(x, (int, Fraction)):
        return QFrac.const(x)
    return NotImplemented


QFRAC_ZERO = QFrac(0, _ZERO_POLY, _ONE_POLY, _canonical=True)
QFRAC_ONE = QFrac(0, _ONE_POLY, _ONE_POLY, _canonical=True)


# ---------------------------------------------------------------------------
# radicals


class Radical:
    """``coef * sqrt(radicand)`` with exact ``coef`` and ``radicand``.

    Closed under products and quotients; sums are allowed only between
    radicals with the same radicand.  The radicand is kept positive for
    ``0 < q < 1`` by the callers (products of q-brackets and their inverses).
    """

    __slots__ = ("coef", "radicand")

    def __init__(self, coef, radicand=QFRAC_ONE):
        self.coef = _coerce(coef)
        self.radicand = _coerce(radicand)
        if not self.radicand:
            self.coef = QFRAC_ZERO
            self.radicand = QFRAC_ONE

    def _lift(self, other):
        if isinstance(other, Radical):
            return other
        if isinstance(other, (QFrac, int, Fraction)):
            return Radical(other)
        return None

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if self.radicand == other.radicand:
            return Radical(self.coef * other.coef * self.radicand)
        return Radical(self.coef * other.coef, self.radicand * other.radicand)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if self.radicand == other.radicand:
            return Radical(self.coef / other.coef)
        # coef2*sqrt(s2) in the denominator becomes coef2*s2 / sqrt(s2)
        return Radical(self.coef / (other.coef * other.radicand), self.radicand * other.radicand)

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other / self

    def __neg__(self):
        return Radical(-self.coef, self.radicand)

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if not other.coef:
            return self
        if not self.coef:
            return other
        if self.radicand != other.radicand:
            raise UnsupportedParameterError(
                "sum of radicals with distinct radicands; use numeric mode")
        return Radical(self.coef + other.coef, self.radicand)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __bool__(self):
        return bool(self.coef)

    def square(self):
        return self.coef * self.coef * self.radicand

    def sign(self, q=SAMPLE_Q):
        x = self.coef.at_q(q).real
        return (x > 0) - (x < 0)

    def at_q(self, q=SAMPLE_Q):
        s = self.radicand.at_q(q).real
        return self.coef.at_q(q) * math.sqrt(s)

    def __eq__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.square() == other.square() and self.sign() == other.sign()

    __hash__ = None

    def __str__(self):
        if self.radicand == QFRAC_ONE:
            return str(self.coef)
        return f"({self.coef})*sqrt({self.radicand})"

    def __repr__(self):
        return f"Radical({str(self)!r})"


# ---------------------------------------------------------------------------
# evaluation context


@dataclass(frozen=True)
class EvalContext:
    """Selects the scalar model and the comparison policy."""

    mode: str = "exact"
    q: float = SAMPLE_Q
    tol: float = 1e-9
    pole_guard: float = 1e-12
    depth: int = 6
    _lnq: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.mode not in ("exact", "numeric"):
            raise InvalidParameterError(f"mode must be 'exact' or 'numeric', got {self.mode!r}")
        if not 0 < self.q < 1:
            raise InvalidParameterError("q must satisfy 0 < q < 1")
        if self.tol <= 0 or self.pole_guard <= 0:
            raise InvalidParameterError("tolerance and pole_guard must be positive")
        if self.depth < 1:
            raise InvalidParameterError("truncation depth must be >= 1")
        object.__setattr__(self, "_lnq", math.log(self.q))

    @property
    def exact(self):
        return self.mode == "exact"

    @property
    def one(self):
        return QFRAC_ONE if self.exact else 1 + 0j

    @property
    def zero(self):
        return QFRAC_ZERO if self.exact else 0j

    def const(self, c):
        if self.exact:
            return QFrac.const(c)
        return complex(c)

    def qpow(self, x):
        """``q**x``; exact mode needs ``4*x`` integral."""
        if self.exact:
            return _monomial(quarter_units(x))
        if isinstance(x, Fraction):
            x = float(x)
        return cmath.exp(complex(x) * self._lnq)

    def qfrac(self, num, den=1):
        """``q**(num/den)`` keeping the exponent exact in exact mode."""
        if self.exact:
            return self.qpow(Fraction(num, den))
        if isinstance(num, Fraction):
            num = float(num)
        return self.qpow(complex(num) / den)

    def is_zero(self, x):
        if self.exact:
            return not x
        return abs(x) <= self.pole_guard

    def nonzero(self, x, what="denominator"):
        """Return ``x`` or raise :class:`PoleError` if it vanishes."""
        if self.is_zero(x):
            raise PoleError(f"{what} vanishes")
        return x

    def sqrt(self, x):
        """Positive square root of a positive quantity."""
        if self.exact:
            if isinstance(x, Radical):
                if x.radicand != QFRAC_ONE:
                    raise UnsupportedParameterError("nested radical")
                x = x.coef
            val = x.at_q().real
            if val <= 0:
                raise UnsupportedParameterError("radicand is not positive at 0<q<1")
            return Radical(QFRAC_ONE, x)
        x = complex(x)
        if x.real <= 0 or abs(x.imag) > self.tol * max(1.0, abs(x)):
            raise UnsupportedParameterError(f"radicand {x} is not a positive real")
        return complex(math.sqrt(x.real))

    def to_complex(self, x):
        if isinstance(x, (QFrac, Radical)):
            return complex(x.at_q(self.q))
        return complex(x)

    def is_nonneg_int(self, w):
        """Whether weight ``w`` lies in Z>=0 (within pole_guard numerically)."""
        if self.exact:
            w = Fraction(w)
            return w.denominator == 1 and w >= 0
        w = complex(w)
        r = round(w.real)
        return r >= 0 and abs(w - r) <= self.pole_guard


def quarter_units(x):
    """``4*x`` as an int, or raise if ``x`` is not a quarter-integer."""
    if isinstance(x, int):
        return 4 * x
    if isinstance(x, float) and not x.is_integer() and not (4 * x).is_integer():
        raise UnsupportedParameterError(f"exponent {x} is not a quarter-integer")
    try:
        f = Fraction(x) * 4
    except (TypeError, ValueError):
        raise UnsupportedParameterError(f"exponent {x!r} is not exact") from None
    if f.denominator != 1:
        raise UnsupportedParameterError(f"exponent {x} is not a quarter-integer")
    return int(f)


EXACT = EvalContext("exact")
NUMERIC = EvalContext("numeric")


# ---------------------------------------------------------------------------
# q-numbers


@lru_cache(maxsize=None)
def _bracket_exact(a2):
    # [a] with a = a2/2
    if a2 % 2 == 0:
        a = a2 // 2
        if a == 0:
            return QFRAC_ZERO
        sign = 1 if a > 0 else -1
        n = abs(a)
        val = QFrac.laurent({2 * (n - 1) - 4 * i: 1 for i in range(n)})
        return val if sign > 0 else -val
    return (_monomial(a2) - _monomial(-a2)) / (_monomial(2) - _monomial(-2))


def bracket(a, ctx=EXACT):
    """q-number ``[a] = (q^(a/2) - q^(-a/2)) / (q^(1/2) - q^(-1/2))``."""
    if ctx.exact:
        units = quarter_units(a)
        if units % 2:
            raise UnsupportedParameterError(f"[a] needs 2a integral in exact mode, got a={a}")
        return _bracket_exact(units // 2)
    return (ctx.qpow(a / 2) - ctx.qpow(-a / 2)) / (ctx.qpow(0.5) - ctx.qpow(-0.5))


def qfact(k, ctx=EXACT):
    """``[k]! = [1][2]...[k]``."""
    if k < 0:
        raise InvalidParameterError("q-factorial of a negative integer")
    if ctx.exact:
        return _qfact_exact(k)
    out = ctx.one
    for j in range(1, k + 1):
        out = out * bracket(j, ctx)
    return out


@lru_cache(maxsize=None)
def _qfact_exact(k):
    return QFRAC_ONE if k == 0 else _qfact_exact(k - 1) * _bracket_exact(2 * k)


def qpoch_bracket(a, k, ctx=EXACT):
    """Bracket Pochhammer ``([a])_k = [a][a+1]...[a+k-1]``."""
    if k < 0:
        raise InvalidParameterError("Pochhammer length must be >= 0")
    out = ctx.one
    for j in range(k):
        out = out * bracket(a + j, ctx)
    return out


def qpoch_std(x, k, ctx=EXACT):
    """Standard Pochhammer ``(x;q)_k``; ``k = math.inf`` only numerically."""
    if k == math.inf:
        if ctx.exact:
            raise UnsupportedParameterError("infinite q-Pochhammer requires numeric mode")
        x = complex(x)
        out = 1 + 0j
        term = x
        for _ in range(100000):
            out *= 1 - term
            if abs(term) < 1e-17:
                return out
            term *= ctx.q
        raise UnsupportedParameterError("infinite q-Pochhammer did not converge")
    if k < 0:
        raise InvalidParameterError("Pochhammer length must be >= 0")
    out = ctx.one
    qj = ctx.one
    qq = ctx.qpow(1)
    for _ in range(k):
        out = out * (ctx.one - x * qj)
        qj = qj * qq
    return out


def qpoch_exp(a, k, ctx=EXACT):
    """``(q^a; q)_k`` for an exponent ``a``."""
    if ctx.exact:
        return _qpoch_exp_exact(quarter_units(a), k)
    return qpoch_std(ctx.qpow(a), k, ctx)


@lru_cache(maxsize=65536)
def _qpoch_exp_exact(a4, k):
    if k == 0:
        return QFRAC_ONE
    return _qpoch_exp_exact(a4, k - 1) * (QFRAC_ONE - _monomial(a4 + 4 * (k - 1)))


def qbinom(n, k, ctx=EXACT):
    """Standard q-binomial ``(q;q)_n / ((q;q)_k (q;q)_{n-k})``."""
    if not 0 <= k <= n:
        raise InvalidParameterError(f"q-binomial needs 0 <= k <= n, got n={n}, k={k}")
    return qpoch_exp(1, n, ctx) / (qpoch_exp(1, k, ctx) * qpoch_exp(1, n - k, ctx))


def bracket_binom(n, k, ctx=EXACT):
    """Symmetric q-binomial ``[n]! / ([k]! [n-k]!)``."""
    if not 0 <= k <= n:
        raise InvalidParameterError(f"q-binomial needs 0 <= k <= n, got n={n}, k={k}")
    return qfact(n, ctx) / (qfact(k, ctx) * qfact(n - k, ctx))


def sign(k):
    return -1 if k % 2 else 1


def casimir_label(j):
    """``c_j = j (j + 1)`` for a (half-)integer spin."""
    j = Fraction(j)
    return j * (j + 1)


# ---------------------------------------------------------------------------
# residuals


@dataclass
class Residual:
    """Outcome of comparing two families of scalars componentwise."""

    mode: str
    count: int = 0
    failures: int = 0
    max_abs: float = 0.0
    depth: int | None = None
    worst: str = ""

    @property
    def ok(self):
        return self.failures == 0

    def merge(self, other):
        if other.max_abs > self.max_abs:
            self.worst = other.worst
        self.count += other.count
        self.failures += other.failures
        self.max_abs = max(self.max_abs, other.max_abs)
        if other.depth is not None:
            self.depth = max(self.depth or 0, other.depth)
        return self

    def magnitude(self):
        """``'0'`` for an exact pass, else the largest residual as text."""
        if self.mode == "exact" and self.ok:
            return "0"
        return repr(self.max_abs)


def compare(pairs, ctx, depth=None):
    """Compare an iterable of ``(label, lhs, rhs)`` triples."""
    res = Residual(ctx.mode, depth=depth)
    for label, lhs, rhs in pairs:
        res.count += 1
        if ctx.exact:
            if isinstance(lhs, Radical) or isinstance(rhs, Radical):
                lhs = lhs if isinstance(lhs, Radical) else Radical(lhs)
                rhs = rhs if isinstance(rhs, Radical) else Radical(rhs)
                same = lhs == rhs
                diff = abs(lhs.at_q() - rhs.at_q())
            else:
                d = _coerce(lhs) - _coerce(rhs)
                same = not d
                diff = abs(d.at_q()) if d else 0.0
            if not same:
                res.failures += 1
                diff = max(diff, 1e-300)
        else:
            a = complex(lhs)
            b = complex(rhs)
            diff = abs(a - b) / max(1.0, abs(a), abs(b))
            if diff > ctx.tol:
                res.failures += 1
        if diff > res.max_abs or (diff and not res.worst):
            res.max_abs = diff
            res.worst = str(label)
    return res
