"""Named verification suites behind ``verify`` and ``sweep``.

A suite turns a configuration into a list of cases.  A case is a dict of
JSON-friendly parameters (fractions as strings); ``run_case`` rebuilds the
objects and returns a :class:`Residual`.  Cases are independent, so they can be
farmed out to worker processes.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .qfield import NUMERIC, InvalidParameterError, QError, Residual, UnsupportedParameterError, compare
from .qseries import summation_sides
from .repsl2 import ModuleId, TensorElement
from . import exchange as ex
from . import fusion as fu
from . import intertwine as it

# ---------------------------------------------------------------------------
# parameter plumbing


def enc(x):
    """Parameter value to JSON: ints stay ints, other rationals become strings."""
    if isinstance(x, (list, tuple)):
        return [enc(v) for v in x]
    x = Fraction(x)
    return int(x) if x.denominator == 1 else str(x)


def frac(x):
    return Fraction(str(x)) if not isinstance(x, Fraction) else x


def weight(x, ctx):
    """Weight parameter for the context: int, Fraction (exact) or float (numeric)."""
    x = frac(x)
    if x.denominator == 1:
        return int(x)
    return x if ctx.exact else float(x)


def module(spec):
    """``"M-3"`` is the Verma module ``M_{-3}``; ``"V2"`` is ``V^2``."""
    spec = str(spec)
    kind, hw = spec[0], spec[1:]
    if kind == "V":
        return ModuleId.finite_dim(int(hw))
    if kind == "M":
        x = frac(hw)
        return ModuleId.verma(int(x) if x.denominator == 1 else x)
    raise InvalidParameterError(f"module {spec!r}: use M<weight> or V<highest weight>")


def _need(p, *keys):
    missing = [k for k in keys if k not in p]
    if missing:
        raise InvalidParameterError(f"missing parameter(s): {', '.join(missing)}")


# ---------------------------------------------------------------------------
# suites


@dataclass(frozen=True)
class Suite:
    name: str
    grid: Callable  # (cfg, rng) -> list of case dicts
    sample: Callable  # (rng, cfg) -> one case dict
    run: Callable  # (case, ctx, depth) -> Residual
    exact_ok: bool = True


SUITES: dict[str, Suite] = {}


def suite(name, grid, sample, exact_ok=True):
    def deco(run):
        SUITES[name] = Suite(name, grid, sample, run, exact_ok)
        return run
    return deco


# summations ---------------------------------------------------------------


def _summation_case(rng, exact):
    formula = rng.choice(["chu", "chu_reversed", "phi20_limit", "transform_3phi2",
                          "sears", "phi11_limit", "exp_inverse"])
    r = lambda lo, hi: rng.randint(lo, hi)  # noqa: E731
    for _ in range(1000):
        n = r(0, 8)
        if formula in ("chu", "chu_reversed"):
            p = {"n": n, "a": r(-8, 8), "c": r(-8, 8)}
        elif formula == "phi20_limit":
            p = {"n": n, "a": r(-8, 8)}
        elif formula == "transform_3phi2":
            p = {"n": n, "a": r(-8, 8), "b": r(-8, 8), "d": r(-8, 8), "e": r(-8, 8)}
        elif formula == "sears":
            a, b, c, d, e = (r(-6, 6) for _ in range(5))
            p = {"n": n, "a": a, "b": b, "c": c, "d": d, "e": e, "f": a + b + c - n + 1 - d - e}
        elif formula == "phi11_limit":
            if exact:
                p = {"a": -n, "c": r(-8, 8)}
            else:
                p = {"a": enc(Fraction(r(-16, 16), 4)), "c": enc(Fraction(r(-16, 16), 4))}
        else:
            p = {"order": r(0, 12)}
        try:
            _summation_sides(formula, p, NUMERIC)
        except QError:
            continue
        return {"formula": formula, **p}
    raise InvalidParameterError(f"could not sample admissible parameters for {formula}")


def _summation_sides(formula, p, ctx):
    params = {k: (frac(v) if isinstance(v, str) else v) for k, v in p.items() if k != "formula"}
    params = {k: (weight(v, ctx) if isinstance(v, Fraction) else v) for k, v in params.items()}
    return summation_sides(formula, params, ctx)


@suite("summations",
       lambda cfg, rng: [_summation_case(rng, cfg.exact) for _ in range(100)],
       lambda rng, cfg: _summation_case(rng, cfg.exact))
def _run_summations(p, ctx, depth):
    _need(p, "formula")
    lhs, rhs = _summation_sides(p["formula"], p, ctx)
    return compare([(p["formula"], lhs, rhs)], ctx)


# orthogonality and intertwiners ------------------------------------------


@suite("orthogonality",
       lambda cfg, rng: [{"mu": mu, "gamma": g, "N": N} for mu in (-3, -5, -7, -9)
                         for g in (-3, -5, -7, -9) for N in range(min(cfg.depth, 6) + 1)],
       lambda rng, cfg: {"mu": rng.randint(-9, -3), "gamma": rng.randint(-9, -3),
                         "N": rng.randint(0, 6)})
def _run_orth(p, ctx, depth):
    _need(p, "mu", "gamma", "N")
    res = it.check_orthogonality(weight(p["mu"], ctx), weight(p["gamma"], ctx), int(p["N"]), ctx)
    res.merge(it.check_gram(weight(p["mu"], ctx), weight(p["gamma"], ctx), int(p["N"]), ctx))
    return res


_FLIP_PAIRS = ((-5, -6), (-3, -4), (-7, -2))


def _spin_triads(jmax):
    sp = ex.spins_upto(jmax)
    for j1, j2, j in itertools.product(sp, repeat=3):
        if ex._triad_ok(j1, j2, j):
            yield j1, j2, j


def _flip_grid(cfg, rng):
    out = [{"kind": "verma", "mu": mu, "gamma": g, "l": l} for mu, g in _FLIP_PAIRS for l in range(6)]
    out += [{"kind": "findim", "j1": enc(a), "j2": enc(b), "j": enc(c)} for a, b, c in _spin_triads(1)]
    return out


@suite("flip_r", _flip_grid,
       lambda rng, cfg: {"kind": "verma", "mu": rng.randint(-9, -1), "gamma": rng.randint(-9, -1),
                         "l": rng.randint(0, 5)})
def _run_flip(p, ctx, depth):
    if p.get("kind", "verma") == "findim":
        _need(p, "j1", "j2", "j")
        return it.check_flip_r_findim(frac(p["j1"]), frac(p["j2"]), frac(p["j"]), ctx)
    _need(p, "mu", "gamma", "l")
    return it.check_flip_r(weight(p["mu"], ctx), weight(p["gamma"], ctx), int(p["l"]), ctx,
                           min(depth, 6))


@suite("cgc_agree",
       lambda cfg, rng: [{"mu": mu, "gamma": g, "N": N} for mu, g in
                         ((-5, -6), (-3, -4), (-7, -2), (-4, -9), (-6, -3)) for N in range(6)],
       lambda rng, cfg: {"mu": rng.randint(-9, -1), "gamma": rng.randint(-9, -1),
                         "N": rng.randint(0, 5)})
def _run_cgc(p, ctx, depth):
    _need(p, "mu", "gamma", "N")
    mu, g, N = weight(p["mu"], ctx), weight(p["gamma"], ctx), int(p["N"])
    pairs = []
    for l in range(N + 1):
        for m in range(N + 1):
            ref = it.cgc(mu, g, N, l, m, ctx)
            for meth in ("direct", "action") + (("m_ge_l",) if m >= l else ("m_le_l",)):
                pairs.append(((l, m, meth), ref, it.cgc(mu, g, N, l, m, ctx, meth)))
    return compare(pairs, ctx)


@suite("intertwiner",
       lambda cfg, rng: [{"lam": lam, "v": v, "k": k} for lam, v in
                         ((-25, "M-3"), (-31, "M-4"), (-21, "V2"), (-22, "M-5")) for k in range(3)],
       lambda rng, cfg: {"lam": rng.randint(-40, -20), "v": f"M{rng.randint(-6, -1)}",
                         "k": rng.randint(0, 2)})
def _run_intertwiner(p, ctx, depth):
    _need(p, "lam", "v", "k")
    mod = module(p["v"])
    v = TensorElement.basis((mod,), (int(p["k"]),), ctx)
    return it.check_highest(weight(p["lam"], ctx), v, ctx, depth)


# fusion -------------------------------------------------------------------

_FUSION_TRIPLES = ((-3, -4, -25), (-5, -2, -31), (-4, -6, "-21/2"), (-2, -3, "-43/2"))


def _generic_triple(rng):
    """Weights in [-6, -1] and lam <= -20: no denominator vanishes for s <= 6."""
    lam = Fraction(rng.randint(-80, -40), 2)
    return rng.randint(-6, -1), rng.randint(-6, -1), enc(lam)


@suite("fusion_inverse",
       lambda cfg, rng: [{"delta": d, "gamma": g, "lam": lam, "s": s}
                         for d, g, lam in _FUSION_TRIPLES for s in range(7)],
       lambda rng, cfg: dict(zip(("delta", "gamma", "lam"), _generic_triple(rng)), s=rng.randint(0, 6)))
def _run_fusion_inverse(p, ctx, depth):
    _need(p, "delta", "gamma", "lam", "s")
    return fu.check_fusion_inverse(weight(p["delta"], ctx), weight(p["gamma"], ctx), int(p["s"]),
                                   weight(p["lam"], ctx), ctx)


@suite("fusion_defining",
       lambda cfg, rng: [{"lam": lam, "w": "M-3", "a": a, "v": "M-4", "b": b}
                         for lam in (-25, -31) for a in range(3) for b in range(3)],
       lambda rng, cfg: {"lam": rng.randint(-40, -20), "w": f"M{rng.randint(-6, -1)}",
                         "a": rng.randint(0, 2), "v": f"M{rng.randint(-6, -1)}", "b": rng.randint(0, 2)})
def _run_fusion_defining(p, ctx, depth):
    _need(p, "lam", "w", "a", "v", "b")
    w = TensorElement.basis((module(p["w"]),), (int(p["a"]),), ctx)
    v = TensorElement.basis((module(p["v"]),), (int(p["b"]),), ctx)
    return fu.check_fusion_defining(weight(p["lam"], ctx), w, v, 3, ctx)


_COCYCLE = ((-31, ["M-3", "M-4", "M-5"]), ("-21/2", ["M-3", "M-4", "M-5"]), (-9, ["V1", "V2", "V1"]))


@suite("cocycle",
       lambda cfg, rng: [{"lam": lam, "modules": mods} for lam, mods in _COCYCLE],
       lambda rng, cfg: {"lam": enc(Fraction(rng.randint(-80, -50), 2)),
                         "modules": [f"M{rng.randint(-6, -1)}" for _ in range(3)]})
def _run_cocycle(p, ctx, depth):
    _need(p, "lam", "modules")
    return fu.check_cocycle(weight(p["lam"], ctx), [module(m) for m in p["modules"]], min(depth, 4), ctx)


@suite("coproduct_twist",
       lambda cfg, rng: [{"lam": -25, "modules": ["M-3", "M-4"], "m": m, "n": n}
                         for m in range(3) for n in range(3)],
       lambda rng, cfg: {"lam": rng.randint(-40, -25),
                         "modules": [f"M{rng.randint(-6, -1)}" for _ in range(2)],
                         "m": rng.randint(0, 2), "n": rng.randint(0, 2)})
def _run_coproduct_twist(p, ctx, depth):
    _need(p, "lam", "modules", "m", "n")
    return fu.check_coproduct_twist(weight(p["lam"], ctx), [module(m) for m in p["modules"]],
                        int(p["m"]), int(p["n"]), min(depth, 4), ctx)


@suite("abrr",
       lambda cfg, rng: [{"lam": lam, "modules": mods} for lam, mods in
                         ((-31, ["M-3", "M-4"]), ("-41/2", ["M-2", "M-5"]))],
       lambda rng, cfg: {"lam": enc(Fraction(rng.randint(-80, -50), 2)),
                         "modules": [f"M{rng.randint(-6, -1)}" for _ in range(2)]})
def _run_abrr(p, ctx, depth):
    _need(p, "lam", "modules")
    return fu.check_abrr(weight(p["lam"], ctx), [module(m) for m in p["modules"]], depth, ctx)


@suite("sb1",
       lambda cfg, rng: [{"lam": -31, "modules": ["M-3", "M-4"]}, {"lam": -9, "modules": ["V2", "V1"]}],
       lambda rng, cfg: {"lam": enc(Fraction(rng.randint(-80, -50), 2)),
                         "modules": [f"M{rng.randint(-6, -1)}" for _ in range(2)]})
def _run_sb1(p, ctx, depth):
    _need(p, "lam", "modules")
    return fu.check_sb1(weight(p["lam"], ctx), [module(m) for m in p["modules"]], min(depth, 5), ctx)


@suite("sb_inverse",
       lambda cfg, rng: [{"lam": -9, "module": f"V{k}"} for k in range(7)],
       lambda rng, cfg: {"lam": rng.randint(-30, -9), "module": f"V{rng.randint(0, 6)}"})
def _run_sb_inverse(p, ctx, depth):
    _need(p, "lam", "module")
    return fu.check_boundary_inverse(weight(p["lam"], ctx), module(p["module"]), ctx)


@suite("sb_factorized",
       lambda cfg, rng: [{"lam": -9, "module": f"V{k}"} for k in range(5)],
       lambda rng, cfg: {"lam": rng.randint(-30, -9), "module": f"V{rng.randint(0, 4)}"})
def _run_sb_factorized(p, ctx, depth):
    _need(p, "lam", "module")
    return fu.check_boundary_factorized(weight(p["lam"], ctx), module(p["module"]), ctx)


@suite("sb_conjugation",
       lambda cfg, rng: [{"lam": -9, "module": f"V{k}"} for k in range(7)] + [{"lam": -20, "module": "M-3"}],
       lambda rng, cfg: {"lam": rng.randint(-30, -9), "module": f"V{rng.randint(0, 6)}"})
def _run_sb_conjugation(p, ctx, depth):
    _need(p, "lam", "module")
    return fu.check_sb20(weight(p["lam"], ctx), module(p["module"]), ctx, depth)


# exchange -----------------------------------------------------------------


def _exchange_case(rng, cfg):
    g, d, lam = _generic_triple(rng)
    return {"gamma": g, "delta": d, "lam": lam, "s_max": min(cfg.depth, 5)}


@suite("exchange_agree",
       lambda cfg, rng: [_exchange_case(rng, cfg) for _ in range(20)],
       _exchange_case)
def _run_exchange_agree(p, ctx, depth):
    _need(p, "gamma", "delta", "lam")
    s_max = int(p.get("s_max", p.get("s", 4)))
    s_min = int(p["s"]) if "s" in p else 0
    res = compare([], ctx)
    for s in range(s_min, s_max + 1):
        res.merge(ex.check_exchange_agree(weight(p["gamma"], ctx), weight(p["delta"], ctx), s,
                                          weight(p["lam"], ctx), ctx))
    return res


def _label_case(L):
    return {"j1": enc(L.j1), "j2": enc(L.j2), "j3": enc(L.j3), "j": enc(L.j),
            "j12": enc(L.j12), "j13": enc(L.j13)}


def _labels(p):
    _need(p, "j1", "j2", "j3", "j", "j12", "j13")
    return ex.SixJLabel(*(frac(p[k]) for k in ("j1", "j2", "j3", "j", "j12", "j13")))


@suite("er5",
       lambda cfg, rng: [_label_case(L) for L in ex.admissible_labels(Fraction(3, 2))],
       lambda rng, cfg: _label_case(rng.choice(list(ex.admissible_labels(Fraction(3, 2))))))
def _run_er5(p, ctx, depth):
    L = _labels(p)
    return ex.check_er5(L.j1, L.j2, L.j3, L.j, L.j12, L.j13, ctx)


_QDYBE = ((-31, (-3, -4, -5)), (-29, (-2, -5, -3)))


@suite("qdybe_verma",
       lambda cfg, rng: [{"lam": lam, "w1": a, "w2": b, "w3": c} for lam, (a, b, c) in _QDYBE],
       lambda rng, cfg: {"lam": enc(Fraction(rng.randint(-80, -50), 2)), "w1": rng.randint(-6, -1),
                         "w2": rng.randint(-6, -1), "w3": rng.randint(-6, -1)})
def _run_qdybe_verma(p, ctx, depth):
    _need(p, "lam")
    ws = [weight(p.get(k, d), ctx) for k, d in (("w1", -3), ("w2", -4), ("w3", -5))]
    if "gamma" in p:
        ws[0] = weight(p["gamma"], ctx)
    if "delta" in p:
        ws[1] = weight(p["delta"], ctx)
    return ex.check_qdybe(weight(p["lam"], ctx), ws, min(depth, 4), "verma", ctx)


@suite("qdybe_findim",
       lambda cfg, rng: [{"j1": enc(a), "j2": enc(b), "j3": enc(c), "jmax": 1}
                         for a, b, c in itertools.product(ex.spins_upto(1), repeat=3)],
       lambda rng, cfg: {"j1": enc(Fraction(rng.randint(0, 3), 2)), "j2": enc(Fraction(rng.randint(0, 3), 2)),
                         "j3": enc(Fraction(rng.randint(0, 3), 2)), "jmax": "3/2"})
def _run_qdybe_findim(p, ctx, depth):
    _need(p, "j1", "j2", "j3")
    return ex.check_qdybe_findim_all(frac(p["j1"]), frac(p["j2"]), frac(p["j3"]), ctx,
                                     jmax=frac(p.get("jmax", 1)))


def _sixj_grid(cfg, rng):
    out = [{"kind": "triple", "labels": enc(list(js))} for js in ex.nine_label_sets(1)]
    if not cfg.exact:
        out += [dict(_label_case(L), kind="flip") for L in ex.admissible_labels(1)]
    return out


@suite("sixj_identity", _sixj_grid,
       lambda rng, cfg: {"kind": "triple",
                         "labels": enc(list(rng.choice(list(ex.nine_label_sets(1)))))})
def _run_sixj(p, ctx, depth):
    if p.get("kind", "triple") == "flip":
        if ctx.exact:
            raise UnsupportedParameterError(
                "the flip expansion mixes square roots of different brackets; use --mode numeric")
        return ex.check_flip_expansion(_labels(p), ctx)
    _need(p, "labels")
    res = compare([], ctx)
    for r in ex.check_sixj_identities(tuple(frac(x) for x in p["labels"]), ctx).values():
        res.merge(r)
    return res


IDENTITIES = tuple(SUITES)


def run_case(args):
    """Worker entry point: ``(identity, case, ctx, depth) -> Residual``."""
    name, case, ctx, depth = args
    res = SUITES[name].run(case, ctx, depth)
    # plain copy: some checks attach exact matrices, which do not pickle
    return Residual(res.mode, res.count, res.failures, res.max_abs, res.depth, res.worst)


def default_cases(name, cfg, seed):
    rng = random.Random(f"{name}:{seed}")
    return SUITES[name].grid(cfg, rng)


def sampled_cases(name, cfg, seed, count):
    rng = random.Random(f"{name}:{seed}:sweep")
    return [SUITES[name].sample(rng, cfg) for _ in range(count)]
