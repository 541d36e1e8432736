"""Verma modules, their finite-dimensional quotients and the U_q(sl2) action.

Basis vectors ``x^lam_{lam-2k} = f^k x_lam`` are addressed by their depth
``k``; a tensor basis vector by the tuple of depths.  A module element is
simply a one-factor :class:`TensorElement`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .qfield import (
    EXACT,
    InvalidParameterError,
    PoleError,
    bracket,
    bracket_binom,
    compare,
    qfact,
    qpoch_bracket,
    sign,
)


@dataclass(frozen=True)
class ModuleId:
    """Verma module ``M_lam`` or its finite-dimensional quotient ``V^lam``."""

    hw: object
    finite: bool = False

    def __post_init__(self):
        if self.finite and not (isinstance(self.hw, int) and self.hw >= 0):
            raise InvalidParameterError(
                f"finite-dimensional module needs a nonnegative integer highest weight, got {self.hw}")

    @classmethod
    def verma(cls, hw):
        return cls(hw, False)

    @classmethod
    def finite_dim(cls, hw):
        return cls(hw, True)

    @classmethod
    def spin(cls, j):
        """``V^{2j}`` for a spin ``j`` in (1/2)Z>=0."""
        two_j = Fraction(j) * 2
        if two_j.denominator != 1 or two_j < 0:
            raise InvalidParameterError(f"spin must be a nonnegative half-integer, got {j}")
        return cls(int(two_j), True)

    @property
    def dim(self):
        return self.hw + 1 if self.finite else None

    def weight(self, k):
        return self.hw - 2 * k

    def contains(self, k):
        return k >= 0 and (not self.finite or k <= self.hw)

    def __str__(self):
        return f"{'V' if self.finite else 'M'}({self.hw})"


class TensorElement:
    """Finite linear combination of tensor basis vectors."""

    __slots__ = ("modules", "coeffs", "truncated_at")

    def __init__(self, modules, coeffs=None, truncated_at=None):
        self.modules = tuple(modules)
        # total depth beyond which components were dropped, None when exact
        self.truncated_at = truncated_at
        self.coeffs = {}
        for idx, c in (coeffs or {}).items():
            if c:
                self.coeffs[tuple(idx)] = c

    @classmethod
    def basis(cls, modules, idx, ctx=EXACT, coef=None):
        modules = tuple(modules)
        idx = tuple(idx)
        if len(idx) != len(modules):
            raise InvalidParameterError("index length does not match the number of factors")
        for m, k in zip(modules, idx):
            if not m.contains(k):
                raise InvalidParameterError(f"depth {k} outside {m}")
        return cls(modules, {idx: ctx.one if coef is None else coef})

    def weight(self, idx):
        return sum(m.weight(k) for m, k in zip(self.modules, idx))

    def items(self):
        return self.coeffs.items()

    def __len__(self):
        return len(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def coeff(self, idx, ctx=EXACT):
        return self.coeffs.get(tuple(idx), ctx.zero)

    def _check(self, other):
        if self.modules != other.modules:
            raise InvalidParameterError("elements live in different modules")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            out[idx] = out[idx] + c if idx in out else c
        return TensorElement(self.modules, out)

    def __neg__(self):
        return TensorElement(self.modules, {i: -c for i, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return TensorElement(self.modules, {i: a * c for i, a in self.coeffs.items()})

    def truncate(self, depth):
        return TensorElement(self.modules, {i: c for i, c in self.coeffs.items() if sum(i) <= depth})

    def __repr__(self):
        body = " + ".join(f"({c})*{list(i)}" for i, c in sorted(self.coeffs.items()))
        return f"TensorElement[{', '.join(map(str, self.modules))}]({body or '0'})"


def basis_vector(module, k, ctx=EXACT):
    return TensorElement.basis((module,), (k,), ctx)


def basis_indices(modules, depth):
    """All tensor depth tuples in range with total depth <= ``depth``."""
    ranges = [range(0, min(depth, m.hw) + 1) if m.finite else range(depth + 1) for m in modules]
    for idx in itertools.product(*ranges):
        if sum(idx) <= depth:
            yield idx


def accumulate(modules, pieces, ctx=EXACT):
    """Sum ``(idx, coefficient)`` pairs into an element."""
    out = {}
    for idx, c in pieces:
        out[idx] = out[idx] + c if idx in out else c
    return TensorElement(modules, out)


def apply_per_basis(t, fn, modules=None, ctx=EXACT):
    """Extend ``fn(idx) -> TensorElement`` linearly over ``t``."""
    out = {}
    for idx, c in t.items():
        for j, a in fn(idx).items():
            v = c * a
            out[j] = out[j] + v if j in out else v
    return TensorElement(modules or t.modules, out)


def apply_on_groups(t, parts, ctx=EXACT):
    """Apply one operator per group of factors and tensor the results.

    ``parts`` is a list of ``(group, fn)`` where ``group`` is a tuple of factor
    positions and ``fn`` maps a sub-tensor element to a sub-tensor element.
    Every factor must belong to exactly one group.
    """
    n = len(t.modules)
    covered = sorted(i for g, _ in parts for i in g)
    if covered != list(range(n)):
        raise InvalidParameterError("groups must partition the tensor factors")

    def one(idx):
        results = []
        for group, fn in parts:
            sub = TensorElement.basis([t.modules[i] for i in group], [idx[i] for i in group], ctx)
            r = fn(sub)
            if not r:
                return TensorElement(t.modules)
            results.append((group, r))
        out = {}
        for combo in itertools.product(*(list(r.items()) for _, r in results)):
            new = [0] * n
            c = None
            for (group, _), (sub_idx, a) in zip(results, combo):
                for pos, k in zip(group, sub_idx):
                    new[pos] = k
                c = a if c is None else c * a
            key = tuple(new)
            out[key] = out[key] + c if key in out else c
        return TensorElement(t.modules, out)

    return apply_per_basis(t, one, ctx=ctx)


def permute(t, order):
    """Reorder tensor factors: new factor ``i`` is old factor ``order[i]``."""
    mods = tuple(t.modules[i] for i in order)
    return TensorElement(mods, {tuple(idx[i] for i in order): c for idx, c in t.items()})


def compare_elements(lhs, rhs, ctx=EXACT, depth=None):
    """Componentwise residual between two elements of the same tensor space."""
    keys = set(lhs.coeffs) | set(rhs.coeffs)
    if depth is not None:
        keys = {k for k in keys if sum(k) <= depth}
    return compare(((k, lhs.coeff(k, ctx), rhs.coeff(k, ctx)) for k in sorted(keys)), ctx, depth)


# ---------------------------------------------------------------------------
# one-factor actions


def e_coefficient(module, k, j, ctx=EXACT):
    """Coefficient of ``e^j x_{lam-2k}`` on ``x_{lam-2k+2j}`` (zero if j > k)."""
    if j > k:
        return ctx.zero
    return sign(j) * qpoch_bracket(-k, j, ctx) * qpoch_bracket(module.hw - k + 1, j, ctx)


def _factor_pow(t, pos, gen, j, ctx):
    """``gen**j`` acting on factor ``pos`` only."""
    mod = t.modules[pos]
    out = {}
    for idx, c in t.items():
        k = idx[pos]
        if gen == "e":
            if j > k:
                continue
            a = e_coefficient(mod, k, j, ctx)
            nk = k - j
        else:
            nk = k + j
            if not mod.contains(nk):
                continue
            a = None
        new = idx[:pos] + (nk,) + idx[pos + 1:]
        v = c if a is None else c * a
        out[new] = out[new] + v if new in out else v
    return TensorElement(t.modules, out)


def _weight_scale(t, fn):
    """Multiply each basis component by ``fn(idx)``."""
    return TensorElement(t.modules, {idx: c * fn(idx) for idx, c in t.items()})


def act_h(x, ctx=EXACT):
    """``h`` via the coproduct: multiply by the total weight."""
    return _weight_scale(x, lambda idx: ctx.const(x.weight(idx)) if ctx.exact else complex(x.weight(idx)))


def act_qh(xi, x, ctx=EXACT):
    """``q^(xi h)`` via the coproduct."""
    return _weight_scale(x, lambda idx: ctx.qpow(xi * x.weight(idx)))


def _generator(gen, x, ctx):
    """``e`` or ``f`` through the iterated coproduct."""
    n = len(x.modules)
    if n == 1:
        return _factor_pow(x, 0, gen, 1, ctx)
    total = TensorElement(x.modules)
    for i in range(n):
        part = _factor_pow(x, i, gen, 1, ctx)

        def twist(idx, i=i, mods=x.modules):
            left = sum(m.weight(k) for m, k in zip(mods[:i], idx[:i]))
            right = sum(m.weight(k) for m, k in zip(mods[i + 1:], idx[i + 1:]))
            return ctx.qpow(_quarter(right - left, ctx))

        total = total + _weight_scale(part, twist)
    return total


def act_e(x, ctx=EXACT):
    return _generator("e", x, ctx)


def act_f(x, ctx=EXACT):
    return _generator("f", x, ctx)


def act_pow(gen, j, x, ctx=EXACT):
    """``e^j`` or ``f^j``: closed form on one factor, q-binomial coproduct on several."""
    if gen not in ("e", "f"):
        raise InvalidParameterError(f"unknown generator {gen!r}")
    if j < 0:
        raise InvalidParameterError("power must be >= 0")
    if j == 0 or not x:
        return x
    n = len(x.modules)
    if n == 1:
        return _factor_pow(x, 0, gen, j, ctx)
    # split off the last factor: Delta(g^j) = sum_k binom g^k q^{-(j-k)h/4} (x) g^{j-k} q^{kh/4}
    head = tuple(range(n - 1))
    tail = (n - 1,)
    total = TensorElement(x.modules)
    for k in range(j + 1):
        c = bracket_binom(j, k, ctx)

        def left(sub, k=k):
            return act_pow(gen, k, act_qh(Fraction(k - j, 4), sub, ctx), ctx)

        def right(sub, k=k):
            return act_pow(gen, j - k, act_qh(Fraction(k, 4), sub, ctx), ctx)

        total = total + apply_on_groups(x, [(head, left), (tail, right)], ctx).scale(c)
    return total


def act_iterated(gen, j, x, ctx=EXACT):
    """``gen**j`` by repeated single applications (reference path)."""
    for _ in range(j):
        x = _generator(gen, x, ctx)
    return x


def tensor_act(gen, t, ctx=EXACT, power=1, xi=None):
    """Coproduct action of ``e``, ``f``, ``h``, ``e^n``, ``f^n`` or ``q^(xi h)``."""
    if gen == "h":
        return act_h(t, ctx)
    if gen == "qh":
        return act_qh(xi, t, ctx)
    return act_pow(gen, power, t, ctx)


# ---------------------------------------------------------------------------
# generalized elements


@dataclass(frozen=True)
class GenTerm:
    """``coef * f^nf e^ne * hfun(h)`` with ``hfun`` rightmost."""

    coef: object
    nf: int = 0
    ne: int = 0
    hfun: object = None


class GenElement:
    """Normal-ordered finite sum of :class:`GenTerm` objects."""

    def __init__(self, terms):
        self.terms = list(terms)

    @classmethod
    def identity(cls, ctx=EXACT):
        return cls([GenTerm(ctx.one)])

    def __len__(self):
        return len(self.terms)


def hf_qpow(xi):
    """h-function ``q^(xi h)``."""
    def fn(w, ctx):
        return ctx.qpow(xi * w)
    return fn


def hf_inv_poch(a, k):
    """h-function ``1 / ([a + h])_k``; raises on a vanishing factor."""
    def fn(w, ctx):
        val = qpoch_bracket(a + w, k, ctx)
        if ctx.is_zero(val):
            raise PoleError(f"([{a} + h])_{k} vanishes at weight h = {w}")
        return 1 / val
    return fn


def hf_product(*fns):
    fns = [f for f in fns if f is not None]

    def fn(w, ctx):
        out = ctx.one
        for g in fns:
            out = out * g(w, ctx)
        return out
    return fn


def gen_apply(g, x, ctx=EXACT):
    """Apply a generalized element to every factor of ``x`` jointly."""
    out = TensorElement(x.modules)
    for idx, c in x.items():
        w = x.weight(idx)
        vec = TensorElement(x.modules, {idx: c})
        for term in g.terms:
            a = term.coef
            if term.hfun is not None:
                try:
                    a = a * term.hfun(w, ctx)
                except PoleError as exc:
                    where = ", ".join(str(m) for m in x.modules)
                    raise PoleError(f"{exc} (component {idx} of {where})") from None
            if not a:
                continue
            r = act_pow("e", term.ne, vec, ctx)
            r = act_pow("f", term.nf, r, ctx)
            out = out + r.scale(a)
    return out


def normal_order(m, n, ctx=EXACT):
    """``e^m f^n`` rewritten as a normal-ordered generalized element."""
    terms = []
    for k in range(min(m, n) + 1):
        c = qfact(m, ctx) * qfact(n, ctx) / (qfact(k, ctx) * qfact(m - k, ctx) * qfact(n - k, ctx))

        def hfun(w, ctx, k=k):
            return qpoch_bracket(w + m - n - k + 1, k, ctx)

        terms.append(GenTerm(c, n - k, m - k, hfun))
    return GenElement(terms)


# ---------------------------------------------------------------------------
# R-matrix, Casimir, Shapovalov form


def r_act(t, ctx=EXACT, swapped=False, factors=(0, 1)):
    """Universal R-matrix on two tensor factors (``R^{21}`` when ``swapped``).

    ``factors`` gives the positions carrying the first and second leg of R.
    """
    a, b = factors
    if swapped:
        a, b = b, a
    mods = t.modules
    qm1 = ctx.one - ctx.qpow(-1)
    out = {}
    for idx, c in t.items():
        ka, kb = idx[a], idx[b]
        for j in range(ka + 1):
            if not mods[b].contains(kb + j):
                break
            na, nb = ka - j, kb + j
            wa, wb = mods[a].weight(na), mods[b].weight(nb)
            coef = (qm1 ** j * ctx.qpow(Fraction(-j * (j - 1), 4))
                    / qfact(j, ctx) * e_coefficient(mods[a], ka, j, ctx)
                    * ctx.qpow(_quarter(j * (wa - wb) + wa * wb, ctx)))
            new = list(idx)
            new[a], new[b] = na, nb
            key = tuple(new)
            v = c * coef
            out[key] = out[key] + v if key in out else v
    return TensorElement(mods, out)


def _quarter(x, ctx):
    return Fraction(x) / 4 if ctx.exact else complex(x) / 4


def flip(t):
    """The flip ``P`` on a two-factor tensor."""
    return permute(t, (1, 0))


def casimir_act(x, ctx=EXACT):
    """``fe + [h/2][h/2 + 1]``."""
    fe = act_f(act_e(x, ctx), ctx)

    def scal(idx):
        w = x.weight(idx)
        half = Fraction(w, 2) if ctx.exact else w / 2
        return bracket(half, ctx) * bracket(half + 1, ctx)

    return fe + _weight_scale(x, scal)


def shapovalov_basis(module, k, ctx=EXACT):
    """``<x_{lam-2k}, x_{lam-2k}> = (-1)^k [k]! ([-lam])_k``."""
    return sign(k) * qfact(k, ctx) * qpoch_bracket(-module.hw, k, ctx)


def shapovalov(u, w, ctx=EXACT):
    """Diagonal Shapovalov form, multiplicative over tensor factors."""
    if u.modules != w.modules:
        raise InvalidParameterError("Shapovalov form needs elements of the same space")
    total = ctx.zero
    for idx, c in u.items():
        d = w.coeffs.get(idx)
        if d is None:
            continue
        norm = ctx.one
        for m, k in zip(u.modules, idx):
            norm = norm * shapovalov_basis(m, k, ctx)
        total = total + c * d * norm
    return total


def normalized_basis(j, m, ctx=EXACT):
    """Unit vector ``e^j_m`` of ``V^{2j}`` (radical coefficient in exact mode)."""
    j, m = Fraction(j), Fraction(m)
    mod = ModuleId.spin(j)
    k = j - m
    if k.denominator != 1 or not 0 <= k <= 2 * j:
        raise InvalidParameterError(f"m={m} is not in {{-j, ..., j}} for j={j}")
    k = int(k)
    scale = qpoch_bracket(_num(j + m + 1, ctx), k, ctx) * qfact(k, ctx)
    coef = 1 / ctx.sqrt(scale)
    return TensorElement((mod,), {(k,): coef})


def _num(x, ctx):
    return x if ctx.exact else float(x)
