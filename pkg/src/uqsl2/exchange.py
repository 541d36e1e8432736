"""Exchange matrices, q-Racah coefficients and q-6j symbols.

``R_{gamma,delta,s;m,n}(lam)`` is the coefficient of
``x^gamma_{gamma-2m} (x) x^delta_{delta-2s+2m}`` in ``R(lam)`` applied to
``x^gamma_{gamma-2n} (x) x^delta_{delta-2s+2n}``, where
``R(lam) = J(lam)^{-1} R^{21} J^{21}(lam)`` acts on ``M_gamma (x) M_delta``.
In depth coordinates the input has depths ``(n, s-n)`` and the output ``(m, s-m)``.

Spins are :class:`fractions.Fraction` half-integers.  Quantities containing
square roots of brackets are :class:`Radical` in exact mode.
"""

from __future__ import annotations

import functools
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .qfield import (
    EXACT,
    InvalidParameterError,
    UnsupportedParameterError,
    bracket,
    casimir_label,
    compare,
    qfact,
    qpoch_bracket,
    qpoch_exp,
    sign,
)
from .qseries import q_racah
from .fusion import fusion_apply, fusion_inv_elem
from .intertwine import basis_norm_sq, coupled_vector, norm_phi_sq_findim
from .repsl2 import ModuleId, TensorElement, basis_indices, compare_elements, flip, permute, r_act

METHODS = ("closed", "racah", "sears", "definition")


# ---------------------------------------------------------------------------
# constraints


def _is_int(x):
    return isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1)


def check_exchange_constraints(gamma, delta, s, m, n, lam, ctx=EXACT):
    """Index ranges and the genericity conditions on ``lam``."""
    if not all(_is_int(i) for i in (s, m, n)):
        raise InvalidParameterError("s, m, n must be integers")
    if not (0 <= m <= s and 0 <= n <= s):
        raise InvalidParameterError(f"need 0 <= m, n <= s (m={m}, n={n}, s={s})")
    for name, x in (("lam - gamma", lam - gamma), ("lam - delta", lam - delta),
                    ("lam - delta - gamma", lam - delta - gamma)):
        if ctx.is_nonneg_int(x):
            raise InvalidParameterError(f"{name} = {x} is a nonnegative integer")


# ---------------------------------------------------------------------------
# matrix elements


def _q4(x, ctx):
    return Fraction(x) / 4 if ctx.exact else x / 4


def _prefactor_power(gamma, delta, s, m, n, ctx):
    return ctx.qpow(_q4(gamma * (delta - 2 * s) + n * (2 * n + delta + gamma - 2 * s)
                        + m * (-3 * delta + gamma + 6 * s - 2 * m), ctx))


def _closed_racah(gamma, delta, s, m, n, lam, ctx):
    """Prefactors times the q-Racah polynomial, evaluated as written."""
    num = qpoch_exp(-gamma, n, ctx) * qpoch_exp(-s, m, ctx) * qpoch_exp(delta - s + 1, m, ctx)
    den = (qpoch_exp(lam - gamma + n + 1, n, ctx) * qpoch_exp(1, m, ctx)
           * qpoch_exp(delta - lam - 2 * s + m - 1, m, ctx))
    return (_prefactor_power(gamma, delta, s, m, n, ctx) * num / ctx.nonzero(den, "exchange prefactor")
            * q_racah(m, n, lam, gamma, delta, s, ctx))


def _closed_cancelled(gamma, delta, s, m, n, lam, ctx):
    """Same expression with each prefactor Pochhammer divided into the 4phi3 term
    before any division, so specializations where a lower parameter of the 4phi3
    meets a zero of the prefactor stay finite."""
    a = lam - gamma + n + 1
    b = delta - lam - 2 * s + m - 1
    c = delta - s + 1
    total = ctx.zero
    for k in range(min(m, n) + 1):
        num = (qpoch_exp(-n, k, ctx) * qpoch_exp(-m, k, ctx) * ctx.qpow(k)
               * qpoch_exp(-gamma + k, n - k, ctx) * qpoch_exp(-s + k, m - k, ctx)
               * qpoch_exp(c + k, m - k, ctx))
        if not num:
            continue
        den = (qpoch_exp(1, k, ctx) * qpoch_exp(a + k, n - k, ctx) * qpoch_exp(b + k, m - k, ctx))
        total = total + num / ctx.nonzero(den, "exchange term")
    return _prefactor_power(gamma, delta, s, m, n, ctx) * total / qpoch_exp(1, m, ctx)


def _bracket_ratio(a, top, bottom, ctx):
    """``([a])_top / ([a])_bottom`` for ``top >= bottom`` without dividing."""
    return qpoch_bracket(a + bottom, top - bottom, ctx)


def _sears_sum(gamma, delta, s, m, n, lam, ctx):
    """Bracket-sum form obtained through Sears' transformation."""
    pre = (_prefactor_power(gamma, delta, s, m, n, ctx)
           * ctx.qpow(_q4(2 * n * (-lam - n - 1) + 2 * m * (lam - m + 1), ctx)))
    A = s - m + n + lam - delta - gamma + 1
    total = ctx.zero
    for t in range(max(0, m - n), min(m, s - n) + 1):
        num = (_bracket_ratio(-gamma, n + t, m, ctx)  # ([-g])_n ([n-g])_t / ([-g])_m
               * _bracket_ratio(n - m + 1, m, t, ctx)
               * _bracket_ratio(A, m, t, ctx)
               * _bracket_ratio(-lam - s - 1, m, t, ctx)
               * qpoch_bracket(-m, t, ctx) * qpoch_bracket(n - s, t, ctx)
               * qpoch_bracket(s - m - delta, t, ctx))
        if not num:
            continue
        total = total + num / qfact(t, ctx)
    den = (qfact(m, ctx) * qpoch_bracket(delta - lam - 2 * s + m - 1, m, ctx)
           * qpoch_bracket(lam - gamma + n + 1, n, ctx))
    return pre * total / ctx.nonzero(den, "exchange bracket denominator")


def _definition_column(gamma, delta, s, n, lam, ctx):
    """``{m: R_{m,n}}`` from ``J_{gamma,delta}^{-1} P R J_{delta,gamma}`` on one basis tensor."""
    mods = (ModuleId.verma(delta), ModuleId.verma(gamma))
    x = TensorElement.basis(mods, (s - n, n), ctx)
    y = flip(r_act(fusion_apply(x, lam, ctx), ctx))
    col = {}
    # y lives in M_gamma (x) M_delta; J^{-1} lowers the depth of the delta factor
    for (a, b), c in y.items():
        for k in range(b + 1):
            v = c * fusion_inv_elem(gamma, delta, s, k, b, lam, ctx)
            col[s - k] = col[s - k] + v if (s - k) in col else v
    return col


@functools.lru_cache(maxsize=None)
def _definition_column_cached(gamma, delta, s, n, lam, ctx):
    return _definition_column(gamma, delta, s, n, lam, ctx)


_ELEM = {"closed": _closed_cancelled, "racah": _closed_racah, "sears": _sears_sum}


@functools.lru_cache(maxsize=200_000)
def _elem_cached(gamma, delta, s, m, n, lam, method, ctx):
    return _ELEM[method](gamma, delta, s, m, n, lam, ctx)


def exchange_elem(gamma, delta, s, m, n, lam, ctx=EXACT, method="closed", constraints=True):
    """Exchange matrix element ``R_{gamma,delta,s;m,n}(lam)``.

    ``closed`` and ``racah`` evaluate the q-Racah polynomial form (the former
    cancels Pochhammer factors termwise first), ``sears`` the bracket sum,
    ``definition`` extracts the entry from the fusion and R-matrix actions.
    ``constraints=False`` skips the genericity check on ``lam``; only an
    actually vanishing denominator is then an error.  Finite-dimensional
    specializations need this.
    """
    if method not in METHODS:
        raise InvalidParameterError(f"unknown method {method!r}; choose from {METHODS}")
    if constraints:
        check_exchange_constraints(gamma, delta, s, m, n, lam, ctx)
    elif not (0 <= m <= s and 0 <= n <= s):
        raise InvalidParameterError(f"need 0 <= m, n <= s (m={m}, n={n}, s={s})")
    if method == "definition":
        return _definition_column_cached(gamma, delta, s, n, lam, ctx).get(m, ctx.zero)
    return _elem_cached(gamma, delta, s, m, n, lam, method, ctx)


def exchange_block(gamma, delta, s, lam, ctx=EXACT, method="closed"):
    """``(s+1) x (s+1)`` table ``[m][n]``."""
    return [[exchange_elem(gamma, delta, s, m, n, lam, ctx, method) for n in range(s + 1)]
            for m in range(s + 1)]


def check_exchange_agree(gamma, delta, s, lam, ctx=EXACT, methods=("closed", "definition")):
    """Entrywise agreement of two or more evaluation routes for one block."""
    ref, *others = methods
    base = exchange_block(gamma, delta, s, lam, ctx, ref)
    res = compare([], ctx)
    for meth in others:
        blk = exchange_block(gamma, delta, s, lam, ctx, meth)
        res.merge(compare((((meth, m, n), base[m][n], blk[m][n])
                           for m in range(s + 1) for n in range(s + 1)), ctx))
    return res


# ---------------------------------------------------------------------------
# the exchange matrix as an operator


def _shift(lam, modules, idx, shift):
    return lam - sum(modules[i].weight(idx[i]) for i in shift)


def exchange_apply(t, lam, ctx=EXACT, factors=(0, 1), shift=(), method="closed", constraints=True):
    """``R^{ab}(lam - h^{(shift)})`` on the factors ``(a, b)`` of ``t``.

    The shift is read off the vector being acted on; the factors in ``shift``
    are never among ``factors`` so the order does not matter.
    """
    a, b = factors
    mods = t.modules
    gamma, delta = mods[a].hw, mods[b].hw
    out = {}
    for idx, c in t.items():
        lam_eff = _shift(lam, mods, idx, shift)
        n = idx[a]
        s = n + idx[b]
        for m in range(s + 1):
            if not (mods[a].contains(m) and mods[b].contains(s - m)):
                continue
            v = exchange_elem(gamma, delta, s, m, n, lam_eff, ctx, method, constraints)
            if not v:
                continue
            new = list(idx)
            new[a], new[b] = m, s - m
            key = tuple(new)
            v = c * v
            out[key] = out[key] + v if key in out else v
    return TensorElement(mods, out)


def _qdybe_sides(x, lam, ctx, method):
    lhs = exchange_apply(x, lam, ctx, (0, 1), method=method)
    lhs = exchange_apply(lhs, lam, ctx, (0, 2), shift=(1,), method=method)
    lhs = exchange_apply(lhs, lam, ctx, (1, 2), method=method)
    rhs = exchange_apply(x, lam, ctx, (1, 2), shift=(0,), method=method)
    rhs = exchange_apply(rhs, lam, ctx, (0, 2), method=method)
    rhs = exchange_apply(rhs, lam, ctx, (0, 1), shift=(2,), method=method)
    return lhs, rhs


def _qdybe_one(args):
    lam, modules, idx, ctx, method = args
    x = TensorElement.basis(modules, idx, ctx)
    lhs, rhs = _qdybe_sides(x, lam, ctx, method)
    return compare_elements(lhs, rhs, ctx)


def check_qdybe(lam, weights, depth=None, variant="verma", ctx=EXACT, method="closed", workers=1):
    """Quantum dynamical Yang-Baxter equation.

    ``verma``: componentwise on every basis tensor of ``M_w1 (x) M_w2 (x) M_w3``
    up to total ``depth``.  ``findim``: ``weights`` are ``(2j1, 2j2, 2j3)`` and
    ``lam = 2j4``; the coefficient identity is checked for every admissible
    input path (see :func:`check_qdybe_findim`).
    """
    if len(weights) != 3:
        raise InvalidParameterError("three weights are needed")
    if variant == "findim":
        j1, j2, j3 = (Fraction(w, 2) for w in weights)
        return check_qdybe_findim_all(j1, j2, j3, ctx, j4=Fraction(lam, 2))
    if variant != "verma":
        raise InvalidParameterError(f"unknown variant {variant!r}")
    depth = ctx.depth if depth is None else depth
    modules = tuple(ModuleId.verma(w) for w in weights)
    jobs = [(lam, modules, idx, ctx, method) for idx in basis_indices(modules, depth)]
    res = compare([], ctx)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_qdybe_one, jobs, chunksize=4))
    else:
        parts = map(_qdybe_one, jobs)
    for r in parts:
        res.merge(r)
    return res


# ---------------------------------------------------------------------------
# spins, q-6j symbols and q-Racah coefficients


def _half(x):
    x = Fraction(x)
    if (2 * x).denominator != 1:
        raise InvalidParameterError(f"{x} is not a half-integer")
    return x


def _triad_ok(a, b, c):
    return (a >= 0 and b >= 0 and c >= 0 and abs(a - b) <= c <= a + b
            and (a + b + c).denominator == 1)


def casimir(j):
    """``c_j = j(j+1)``."""
    return casimir_label(j)


@dataclass(frozen=True)
class SixJLabel:
    """Coupling labels: ``j12`` couples ``j1, j2`` and ``j13`` couples ``j1, j3``,
    both inside total spin ``j``.  Either of ``j12``/``j13`` may be ``None``."""

    j1: Fraction
    j2: Fraction
    j3: Fraction
    j: Fraction
    j12: Fraction | None = None
    j13: Fraction | None = None

    def __post_init__(self):
        for name in ("j1", "j2", "j3", "j", "j12", "j13"):
            v = getattr(self, name)
            if v is not None:
                v = _half(v)
                if v < 0:
                    raise InvalidParameterError(f"{name} = {v} is negative")
                object.__setattr__(self, name, v)
        j1, j2, j3, j = self.j1, self.j2, self.j3, self.j
        for x in (j1 + j2 + j3 - j, j1 + j2 - j3 + j, j1 - j2 + j3 + j, -j1 + j2 + j3 + j):
            if x.denominator != 1 or x < 0:
                raise InvalidParameterError(f"V^{j} does not occur in V^{j1} (x) V^{j2} (x) V^{j3}")
        if self.j12 is not None and not (_triad_ok(j1, j2, self.j12) and _triad_ok(self.j12, j3, j)):
            raise InvalidParameterError(f"j12 = {self.j12} is not admissible")
        if self.j13 is not None and not (_triad_ok(j1, j3, self.j13) and _triad_ok(self.j13, j2, j)):
            raise InvalidParameterError(f"j13 = {self.j13} is not admissible")

    @classmethod
    def admissible(cls, *args):
        try:
            cls(*args)
        except InvalidParameterError:
            return False
        return True

    def intermediates(self, which="j12"):
        """All admissible values of ``j12`` (or ``j13``) for the outer labels."""
        if which == "j12":
            a, b, c = self.j1, self.j2, self.j3
        else:
            a, b, c = self.j1, self.j3, self.j2
        lo = max(abs(self.j - c), abs(a - b))
        hi = min(self.j + c, a + b)
        out = []
        x = lo
        while x <= hi:
            out.append(x)
            x += 1
        return out


def _fact_int(x, ctx):
    if x.denominator != 1 or x < 0:
        raise InvalidParameterError(f"factorial argument {x} is not a nonnegative integer")
    return qfact(int(x), ctx)


def delta_sq(a, b, c, ctx=EXACT):
    """Square of the triangle coefficient ``Delta(a, b, c)``."""
    a, b, c = _half(a), _half(b), _half(c)
    if not _triad_ok(a, b, c):
        raise InvalidParameterError(f"triangle condition fails for ({a}, {b}, {c})")
    return (_fact_int(-a + b + c, ctx) * _fact_int(a - b + c, ctx) * _fact_int(a + b - c, ctx)
            / _fact_int(a + b + c + 1, ctx))


def delta_coef(a, b, c, ctx=EXACT):
    return ctx.sqrt(delta_sq(a, b, c, ctx))


def _sixj_triads(a, b, c, d, e, f):
    return ((a, b, c), (a, e, f), (d, b, f), (d, e, c))


def sixj_range(a, b, c, d, e, f):
    """Summation range of the finite-sum formula, or ``None`` when empty."""
    lo = max(sum(t) for t in _sixj_triads(a, b, c, d, e, f))
    hi = min(a + b + d + e, a + c + d + f, b + c + e + f)
    return (int(lo), int(hi)) if lo <= hi else None


class Surd:
    """``coef * prod sqrt(v)`` with the square roots tracked by key.

    A key occurring in both factors of a product is squared out into the
    coefficient, so sums of products of 6j symbols whose unpaired roots agree
    stay exact.
    """

    __slots__ = ("coef", "roots")

    def __init__(self, coef, roots=None):
        self.coef = coef
        self.roots = dict(roots or {})

    def __mul__(self, other):
        if not isinstance(other, Surd):
            return Surd(self.coef * other, self.roots)
        coef = self.coef * other.coef
        roots = dict(self.roots)
        for k, v in other.roots.items():
            if k in roots:
                coef = coef * v
                del roots[k]
            else:
                roots[k] = v
        return Surd(coef, roots)

    __rmul__ = __mul__

    def value(self, ctx):
        rad = ctx.one
        for v in self.roots.values():
            rad = rad * v
        if not self.roots:
            return self.coef
        return ctx.sqrt(rad) * self.coef


def surd_sum(terms, ctx):
    """Sum of :class:`Surd` terms; exact mode needs one common set of unpaired roots."""
    terms = [t for t in terms if t.coef]
    if not terms:
        return ctx.zero
    if not ctx.exact:
        return sum((complex(t.value(ctx)) for t in terms), 0j)
    groups = {}
    for t in terms:
        key = frozenset(t.roots)
        groups.setdefault(key, [t.roots, ctx.zero])[1] += t.coef
    if len(groups) > 1:
        raise UnsupportedParameterError("terms carry different square roots; use numeric mode")
    (roots, coef), = groups.values()
    return Surd(coef, roots).value(ctx)


def _root(key, v):
    return Surd(1, {key: v})


def sixj_symbol(a, b, c, d, e, f, ctx=EXACT):
    """q-6j symbol with rows ``(a, b, c)`` and ``(d, e, f)`` by the finite sum.

    The triads are ``(a,b,c), (a,e,f), (d,b,f), (d,e,c)``.  A :class:`Radical`
    in exact mode.
    """
    return sixj_surd(a, b, c, d, e, f, ctx).value(ctx)


def sixj_surd(a, b, c, d, e, f, ctx=EXACT):
    a, b, c, d, e, f = (_half(x) for x in (a, b, c, d, e, f))
    return _sixj_cached(a, b, c, d, e, f, ctx)


@functools.lru_cache(maxsize=100_000)
def _sixj_cached(a, b, c, d, e, f, ctx):
    triads = _sixj_triads(a, b, c, d, e, f)
    for t in triads:
        if not _triad_ok(*t):
            raise InvalidParameterError(f"triangle condition fails for {t}")
    rng = sixj_range(a, b, c, d, e, f)
    if rng is None:
        raise InvalidParameterError("empty summation range")
    quads = (a + b + d + e, a + c + d + f, b + c + e + f)
    total = ctx.zero
    for k in range(rng[0], rng[1] + 1):
        den = ctx.one
        for t in triads:
            den = den * _fact_int(k - sum(t), ctx)
        for s4 in quads:
            den = den * _fact_int(s4 - k, ctx)
        total = total + sign(k) * qfact(k + 1, ctx) / den
    out = Surd(total)
    for t in triads:
        # Delta is symmetric in its three arguments
        out = out * _root(("delta",) + tuple(sorted(t)), delta_sq(*t, ctx))
    return out


def sixj(labels, ctx=EXACT):
    """``{j3 j1 j13; j2 j j12}`` for a label set with both intermediates."""
    L = _full(labels)
    return sixj_symbol(L.j3, L.j1, L.j13, L.j2, L.j, L.j12, ctx)


def _full(labels):
    if labels.j12 is None or labels.j13 is None:
        raise InvalidParameterError("both j12 and j13 are needed")
    return labels


def racah_W(labels, ctx=EXACT):
    """q-Racah coefficient ``W^{j1,j2,j12}_{j13-j3, j-j13, j-j3}(j)``."""
    return racah_W_surd(labels, ctx).value(ctx)


def racah_W_surd(labels, ctx=EXACT):
    L = _full(labels)
    sgn = sign(int(L.j1 + L.j2 + L.j + L.j3))
    out = sixj_surd(L.j3, L.j1, L.j13, L.j2, L.j, L.j12, ctx) * sgn
    for x in (L.j12, L.j13):
        out = out * _root(("dim", 2 * x + 1), bracket(int(2 * x + 1), ctx))
    return out


def W_coef(a, b, c, d, e, f, ctx=EXACT):
    """``W^{a,b,c}_{d-e, f-d, f-e}(f)`` in the upper/lower/argument notation."""
    return racah_W(SixJLabel(a, b, e, f, j12=c, j13=d), ctx)


def W_surd(a, b, c, d, e, f, ctx=EXACT):
    return racah_W_surd(SixJLabel(a, b, e, f, j12=c, j13=d), ctx)


def W_admissible(a, b, c, d, e, f):
    return SixJLabel.admissible(a, b, e, f, c, d)


# ---------------------------------------------------------------------------
# the exchange <-> 6j bridge


def exchange_indices(labels):
    """``(gamma, delta, s, m, n, lam)`` of the exchange entry matching the labels."""
    L = _full(labels)
    s = L.j1 + L.j2 + L.j3 - L.j
    m = L.j1 + L.j2 - L.j12
    n = L.j2 + L.j13 - L.j
    return int(2 * L.j2), int(2 * L.j3), int(s), int(m), int(n), int(2 * L.j)


def labels_of_exchange(ja, jb, s, m, n, jl):
    """Inverse of :func:`exchange_indices`: labels of ``R_{2ja,2jb,s;m,n}(2jl)``."""
    j1 = s - ja - jb + jl
    return j1, ja, jb, jl, j1 + ja - m, n - ja + jl


def exchange_findim(labels, ctx=EXACT, method="closed"):
    """Exchange entry at the finite-dimensional specialization of the labels."""
    g, d, s, m, n, lam = exchange_indices(labels)
    return exchange_elem(g, d, s, m, n, lam, ctx, method, constraints=False)


def exchange_sixj_sum(labels, ctx=EXACT):
    """Closed 6j-type sum for the finite-dimensional exchange entry."""
    L = _full(labels)
    j1, j2, j3, j, j12, j13 = L.j1, L.j2, L.j3, L.j, L.j12, L.j13
    f = lambda x: _fact_int(x, ctx)  # noqa: E731
    expo = (j1 * (-j13 + j1 + j12 + 1) / 2 + j * (j + j12 - j13 + 1) / 2
            - j12 * (j12 + Fraction(1, 2)) - j13 / 2)
    pre = (sign(int(j13 + j12 + j2 + j3)) * ctx.qpow(expo if ctx.exact else float(expo))
           * f(j13 - j2 + j) * f(j13 + j2 - j) * f(j1 - j3 + j13) * f(2 * j12 + 1)
           / (f(2 * j13) * f(j + j3 + j12 + 1) * f(j12 + j1 + j2 + 1))
           * f(j2 - j1 + j12) * f(j3 + j - j12) * f(j1 + j3 - j13))
    rng = sixj_range(j3, j1, j13, j2, j, j12)
    if rng is None:
        raise InvalidParameterError("empty summation range")
    total = ctx.zero
    for k in range(rng[0], rng[1] + 1):
        den = (f(j13 + j12 + j2 + j3 - k) * f(j13 + j12 + j + j1 - k) * f(-j - j3 - j12 + k)
               * f(-j1 - j3 - j13 + k) * f(-j1 - j2 - j12 + k) * f(-j13 - j2 - j + k)
               * f(j + j1 + j2 + j3 - k))
        total = total + sign(k) * qfact(k + 1, ctx) / den
    return pre * total


def bridge_sides(labels, ctx=EXACT):
    """Both sides of the exchange <-> Racah coefficient relation."""
    L = _full(labels)
    j1, j2, j3, j, j12, j13 = L.j1, L.j2, L.j3, L.j, L.j12, L.j13
    c = casimir(j) + casimir(j1) - casimir(j12) - casimir(j13)
    lhs = (sign(int(j + j1 - j12 - j13)) * ctx.qpow(c / 2 if ctx.exact else float(c) / 2)
           * racah_W(L, ctx))
    ratio = (norm_phi_sq_findim(j1, j2, j12, ctx) * norm_phi_sq_findim(j12, j3, j, ctx)
             / (norm_phi_sq_findim(j1, j3, j13, ctx) * norm_phi_sq_findim(j13, j2, j, ctx)))
    rhs = ctx.sqrt(ratio) * exchange_findim(L, ctx)
    return lhs, rhs


def check_er5(j1, j2, j3, j, j12, j13, ctx=EXACT):
    """Racah coefficient vs normalized exchange entry, plus the closed 6j-type
    sum and the bracket sum against the specialized q-Racah form."""
    L = SixJLabel(j1, j2, j3, j, j12, j13)
    lhs, rhs = bridge_sides(L, ctx)
    closed = exchange_findim(L, ctx)
    return compare([("W-vs-R", lhs, rhs),
                    ("closed-sum", exchange_sixj_sum(L, ctx), closed),
                    ("bracket-sum", exchange_findim(L, ctx, "sears"), closed)], ctx)


def spins_upto(jmax):
    """``0, 1/2, ..., jmax``."""
    return [Fraction(k, 2) for k in range(int(2 * Fraction(jmax)) + 1)]


def admissible_labels(jmax):
    """Every complete label set with all six spins at most ``jmax``."""
    sp = spins_upto(jmax)
    for j1, j2, j3, j in itertools.product(sp, repeat=4):
        if not SixJLabel.admissible(j1, j2, j3, j):
            continue
        outer = SixJLabel(j1, j2, j3, j)
        for j12 in outer.intermediates("j12"):
            for j13 in outer.intermediates("j13"):
                if j12 <= jmax and j13 <= jmax:
                    yield SixJLabel(j1, j2, j3, j, j12, j13)


# ---------------------------------------------------------------------------
# finite-dimensional QDYBE in path labels


def _R_path(ja, jb, s, m, n, jl, ctx):
    """Exchange entry addressed by path labels; ``None`` for a missing path."""
    if not all(x.denominator == 1 for x in (s, m, n)) or min(s, m, n) < 0 or max(m, n) > s:
        return None
    lab = labels_of_exchange(ja, jb, s, m, n, jl)
    if not SixJLabel.admissible(*lab):
        return None
    return exchange_findim(SixJLabel(*lab), ctx)


def _steps(a, c):
    """Spins ``b`` with ``(a, c, b)`` a triad."""
    out, b = [], abs(a - c)
    while b <= a + c:
        out.append(b)
        b += 1
    return out


def qdybe_findim_sides(j1, j2, j3, j4, j5, j6, j7, ctx=EXACT):
    """Coefficients of ``e_{j8-j7} (x) e_{j9-j8} (x) e_{j4-j9}`` on both sides,
    keyed by ``(j8, j9)``; each side is summed over ``j10``."""
    lhs, rhs = {}, {}

    def add(d, key, v):
        d[key] = d[key] + v if key in d else v

    for j8 in _steps(j7, j1):
        for j9 in _steps(j8, j2):
            if not _triad_ok(j9, j3, j4):
                continue
            for j10 in spins_upto(j4 + j5 + j6 + j7 + j1 + j2 + j3):
                t = (_R_path(j2, j3, j2 + j3 + j8 - j4, j2 + j8 - j9, j2 + j10 - j4, j4, ctx),
                     _R_path(j1, j3, j1 + j3 + j7 - j10, j1 + j7 - j8, j1 + j6 - j10, j10, ctx),
                     _R_path(j1, j2, j1 + j2 + j6 - j4, j1 + j6 - j10, j1 + j5 - j4, j4, ctx))
                if None not in t:
                    add(lhs, (j8, j9), t[0] * t[1] * t[2])
                t = (_R_path(j1, j2, j1 + j2 + j7 - j9, j1 + j7 - j8, j1 + j10 - j9, j9, ctx),
                     _R_path(j1, j3, j1 + j3 + j10 - j4, j1 + j10 - j9, j1 + j5 - j4, j4, ctx),
                     _R_path(j2, j3, j2 + j3 + j7 - j5, j2 + j7 - j10, j2 + j6 - j5, j5, ctx))
                if None not in t:
                    add(rhs, (j8, j9), t[0] * t[1] * t[2])
    return lhs, rhs


def input_paths(j1, j2, j3, jmax=None, j4=None):
    """Label sets ``(j4, j5, j6, j7)``: ``j7 -j3-> j6 -j2-> j5 -j1-> j4``."""
    j1, j2, j3 = _half(j1), _half(j2), _half(j3)
    top = jmax if jmax is not None else (j4 + j1 + j2 + j3)
    for j7 in spins_upto(top):
        for j6 in _steps(j7, j3):
            for j5 in _steps(j6, j2):
                for j4_ in _steps(j5, j1):
                    if j4 is not None and j4_ != j4:
                        continue
                    if jmax is not None and max(j4_, j5, j6) > jmax:
                        continue
                    yield j4_, j5, j6, j7


def check_qdybe_findim(j1, j2, j3, j4, j5, j6, j7, ctx=EXACT):
    lhs, rhs = qdybe_findim_sides(j1, j2, j3, j4, j5, j6, j7, ctx)
    keys = sorted(set(lhs) | set(rhs))
    return compare(((k, lhs.get(k, ctx.zero), rhs.get(k, ctx.zero)) for k in keys), ctx)


def check_qdybe_findim_all(j1, j2, j3, ctx=EXACT, jmax=None, j4=None):
    """Every admissible input path; ``jmax`` bounds ``j4..j7``."""
    if jmax is None and j4 is None:
        raise InvalidParameterError("give jmax or j4")
    res = compare([], ctx)
    for path in input_paths(j1, j2, j3, jmax, j4):
        res.merge(check_qdybe_findim(j1, j2, j3, *path, ctx))
    return res


# ---------------------------------------------------------------------------
# identities between q-Racah coefficients and q-6j symbols


def _bridge_phase(a, b, c, d, e, f, ctx):
    """Phase relating ``W^{a,b,c}_{d-e,f-d,f-e}(f)`` to its normalized exchange entry."""
    x = casimir(f) + casimir(a) - casimir(c) - casimir(d)
    return sign(int(f + a - c - d)) * _qhalf(x, ctx)


def _three_w_term(ws, ctx):
    if not all(W_admissible(*w) for w in ws):
        return None
    term = Surd(ctx.one)
    for w in ws:
        term = term * _bridge_phase(*w, ctx) * W_surd(*w, ctx)
    return term


def three_w_sides(j1, j2, j3, j4, j5, j6, j7, j8, j9, ctx=EXACT):
    """Three-W identity; each side summed over admissible ``j10``.

    Every W carries the phase that turns it into a normalized exchange entry;
    the norm factors cancel between the two sides.
    """
    lhs, rhs = [], []
    top = max(j1, j2, j3, j4, j5, j6, j7, j8, j9) * 2 + max(j1, j2, j3)
    for j10 in spins_upto(top):
        t = _three_w_term(((j7, j1, j8, j10, j2, j9), (j10, j1, j9, j5, j3, j4),
                       (j7, j2, j10, j6, j3, j5)), ctx)
        if t is not None:
            lhs.append(t)
        t = _three_w_term(((j8, j2, j9, j10, j3, j4), (j7, j1, j8, j6, j3, j10),
                       (j6, j1, j10, j5, j2, j4)), ctx)
        if t is not None:
            rhs.append(t)
    return surd_sum(lhs, ctx), surd_sum(rhs, ctx)


def _qhalf(c, ctx):
    return ctx.qpow(c / 2 if ctx.exact else float(c) / 2)


def _sixj_ok(a, b, c, d, e, f):
    return all(_triad_ok(*t) for t in _sixj_triads(a, b, c, d, e, f))


def triple_sixj_sides(j1, j2, j3, j4, j5, j6, j7, j8, j9, ctx=EXACT):
    """Triple-6j identity; each side summed over admissible ``j10``."""
    lhs, rhs = [], []
    top = max(j1, j2, j3, j4, j5, j6, j7, j8, j9) * 2 + max(j1, j2, j3)
    for j10 in spins_upto(top):
        w = sign(int(2 * j10)) * bracket(int(2 * j10 + 1), ctx)
        for out, cs, syms in (
                (lhs, (j10, j8, j6, j4),
                 ((j2, j7, j10, j1, j9, j8), (j2, j6, j5, j3, j10, j7), (j1, j5, j4, j3, j9, j10))),
                (rhs, (j10, j7, j9, j5),
                 ((j1, j6, j10, j3, j8, j7), (j2, j10, j4, j3, j9, j8), (j2, j6, j5, j1, j4, j10)))):
            if not all(_sixj_ok(*x) for x in syms):
                continue
            term = Surd(w * _qhalf(-sum(casimir(x) for x in cs), ctx))
            for x in syms:
                term = term * sixj_surd(*x, ctx)
            out.append(term)
    return surd_sum(lhs, ctx), surd_sum(rhs, ctx)


def nine_label_sets(jmax):
    """``(j1, ..., j9)`` with the six fixed triads of the triple identities
    satisfied and every spin at most ``jmax``."""
    sp = spins_upto(jmax)
    for j1, j2, j3 in itertools.product(sp, repeat=3):
        for j7 in sp:
            for j8 in _steps(j7, j1):
                for j9 in _steps(j8, j2):
                    for j4 in _steps(j9, j3):
                        for j6 in _steps(j7, j3):
                            for j5 in _steps(j6, j2):
                                if not _triad_ok(j1, j5, j4):
                                    continue
                                labels = (j1, j2, j3, j4, j5, j6, j7, j8, j9)
                                if max(labels) <= jmax:
                                    yield labels


# ---------------------------------------------------------------------------
# the flip acting on doubly coupled vectors


def _substitute(vec, pos, jsub, ja, jb, ctx):
    """Replace factor ``pos`` (spin ``jsub``, x-basis) by its image under the
    normalized intertwiner into ``V^{ja} (x) V^{jb}``."""
    mods = vec.modules[:pos] + (ModuleId.spin(ja), ModuleId.spin(jb)) + vec.modules[pos + 1:]
    out = {}
    cache = {}
    for idx, c in vec.items():
        k = idx[pos]
        if k not in cache:
            mm = jsub - k
            cache[k] = coupled_vector(ja, jb, jsub, mm, ctx).scale(ctx.sqrt(basis_norm_sq(jsub, mm, ctx)))
        for sub, a in cache[k].items():
            key = idx[:pos] + sub + idx[pos + 1:]
            v = c * a
            out[key] = out[key] + v if key in out else v
    return TensorElement(mods, out)


def coupled_left(j1, j2, j3, j12, j, m, ctx=EXACT):
    """``e^{j12,j}_m(j1, j2 | j3)`` in ``V^{j1} (x) V^{j2} (x) V^{j3}``."""
    return _substitute(coupled_vector(j12, j3, j, m, ctx), 0, j12, j1, j2, ctx)


def coupled_right(j1, j2, j3, j23, j, m, ctx=EXACT):
    """``e^{j23,j}_m(j1 | j2, j3)`` in ``V^{j1} (x) V^{j2} (x) V^{j3}``."""
    return _substitute(coupled_vector(j1, j23, j, m, ctx), 1, j23, j2, j3, ctx)


def inner(u, w, ctx=EXACT):
    """Hermitian form making every ``e^j_m`` basis orthonormal (real coefficients)."""
    if u.modules != w.modules:
        raise InvalidParameterError("elements live in different modules")
    total = ctx.zero
    for idx, a in u.items():
        b = w.coeffs.get(idx)
        if b is None:
            continue
        nsq = ctx.one
        for mod, k in zip(u.modules, idx):
            nsq = nsq * basis_norm_sq(Fraction(mod.hw, 2), Fraction(mod.hw, 2) - k, ctx)
        total = total + a * b * nsq
    return total


def racah_W_overlap(labels, ctx):
    """``W`` as the overlap of the two coupled bases; numeric oracle."""
    L = _full(labels)
    # e^{j13,j}(j3, j1 | j2) expanded in e^{j12,j}(j3 | j1, j2)
    u = coupled_left(L.j3, L.j1, L.j2, L.j13, L.j, L.j, ctx)
    w = coupled_right(L.j3, L.j1, L.j2, L.j12, L.j, L.j, ctx)
    return inner(u, w, ctx)


def check_flip_expansion(labels, ctx, m=None):
    """Flip on factors 2, 3 of ``e^{j13,j}_m(j1, j3 | j2)`` expanded in the
    ``e^{j12,j}_m(j1, j2 | j3)`` basis."""
    if ctx.exact:
        raise UnsupportedParameterError("mixed radicals: run this identity in numeric mode")
    L = SixJLabel(labels.j1, labels.j2, labels.j3, labels.j, j13=labels.j13)
    m = L.j if m is None else Fraction(m)
    v = coupled_left(L.j1, L.j3, L.j2, L.j13, L.j, m, ctx)
    lhs = permute(r_act(v, ctx, factors=(1, 2)), (0, 2, 1))
    rhs = TensorElement(lhs.modules)
    for j12 in L.intermediates("j12"):
        full = SixJLabel(L.j1, L.j2, L.j3, L.j, j12, L.j13)
        c = casimir(L.j) + casimir(L.j1) - casimir(L.j13) - casimir(j12)
        coef = sign(int(j12 + L.j13 - L.j - L.j1)) * _qhalf(c, ctx) * racah_W(full, ctx)
        rhs = rhs + coupled_left(L.j1, L.j2, L.j3, j12, L.j, m, ctx).scale(coef)
    return compare_elements(lhs, rhs, ctx)


def check_sixj_identities(labels, ctx):
    """Residuals of the flip expansion, the three-W identity and the triple-6j
    identity.  ``labels`` is a :class:`SixJLabel` (flip expansion only) or a
    9-tuple ``(j1, ..., j9)`` (the two triple identities)."""
    if isinstance(labels, SixJLabel):
        return {"flip": check_flip_expansion(labels, ctx)}
    js = tuple(_half(x) for x in labels)
    if len(js) != 9:
        raise InvalidParameterError("nine spins are needed")
    out = {}
    for name, sides in (("three-W", three_w_sides), ("triple-6j", triple_sixj_sides)):
        lhs, rhs = sides(*js, ctx)
        out[name] = compare([(name, lhs, rhs)], ctx)
    return out
