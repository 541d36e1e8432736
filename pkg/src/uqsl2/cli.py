"""Command line front end: ``uqsl2 eval | verify | sweep``.

Reports go to stdout (or ``--out``) as JSON or CSV; progress and errors go to
stderr.  Exit status: 0 all residuals pass, 1 some residual fails, 2 bad
configuration or parameters.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import __version__
from . import exchange as ex
from . import fusion as fu
from . import intertwine as it
from . import qseries as qs
from .qfield import EvalContext, QError, Residual
from .suites import IDENTITIES, default_cases, enc, frac, run_case, sampled_cases, weight

ENV_PREFIX = "UQSL2_"

# option name -> (type, default); environment variables UQSL2_<NAME> override defaults
OPTIONS = {
    "mode": (str, "exact"),
    "q": (float, 0.3),
    "tol": (float, 1e-9),
    "depth": (int, 6),
    "format": (str, "json"),
    "seed": (int, 0),
    "workers": (int, 1),
    "samples": (int, 20),
}


class ConfigError(Exception):
    pass


def _env_default(name):
    typ, default = OPTIONS[name]
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return default
    try:
        return typ(raw)
    except ValueError:
        raise ConfigError(f"{ENV_PREFIX}{name.upper()}={raw!r} is not a valid {typ.__name__}") from None


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=("exact", "numeric"))
    common.add_argument("--q", type=float, help="sample value of q for numeric mode")
    common.add_argument("--tol", type=float, help="relative tolerance for numeric comparisons")
    common.add_argument("--depth", type=int, help="truncation depth for Verma-module checks")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--timings", action="store_true", help="add wall-clock times to the report")

    p = argparse.ArgumentParser(prog="uqsl2", description="Exact and numeric checks for U_q(sl2) tensor structures")
    p.add_argument("--version", action="version", version=f"uqsl2 {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    e = sub.add_parser("eval", parents=[common], help="evaluate a coefficient family")
    e.add_argument("target", choices=sorted(EVAL_TARGETS))
    e.add_argument("params", nargs="*", metavar="key=value")
    v = sub.add_parser("verify", parents=[common], help="run identity checks on fixed grids")
    v.add_argument("identity", choices=IDENTITIES + ("all",))
    v.add_argument("params", nargs="*", metavar="key=value",
                   help="replace the default grid by a single case")
    s = sub.add_parser("sweep", parents=[common], help="run identity checks on seeded random cases")
    s.add_argument("identity", choices=IDENTITIES + ("all",))
    s.add_argument("params", nargs="*", metavar="key=value|key=lo:hi",
                   help="pin a sampled parameter, or draw it uniformly from an integer range")
    s.add_argument("--samples", type=int)
    return p


def _kv(items):
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"parameter {item!r} is not of the form key=value")
        if "," in val:
            out[key] = [_scalar(x) for x in val.split(",")]
        else:
            out[key] = _scalar(val)
    return out


def _sweep_overrides(items):
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"parameter {item!r} is not of the form key=value or key=lo:hi")
        lo, colon, hi = val.partition(":")
        if colon:
            try:
                lo, hi = int(lo), int(hi)
            except ValueError:
                raise ConfigError(f"range {val!r} must be two integers lo:hi") from None
            if lo > hi:
                raise ConfigError(f"empty range {val!r}")
            out[key] = lambda rng, lo=lo, hi=hi: rng.randint(lo, hi)
        else:
            fixed = _kv([item])[key]
            out[key] = lambda rng, fixed=fixed: fixed
    return out


def _scalar(val):
    try:
        return enc(Fraction(val))
    except (ValueError, ZeroDivisionError):
        return val


# ---------------------------------------------------------------------------
# value formatting


def fmt(x):
    """Exact values as canonical strings, floats at full precision."""
    if isinstance(x, complex):
        return repr(x.real) if x.imag == 0 else repr(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


# ---------------------------------------------------------------------------
# eval targets


def _get(p, *keys):
    missing = [k for k in keys if k not in p]
    if missing:
        raise ConfigError(f"missing parameter(s): {', '.join(missing)}")
    return [p[k] for k in keys]


def _int(x):
    x = frac(x)
    if x.denominator != 1:
        raise ConfigError(f"expected an integer, got {x}")
    return int(x)


def _eval_cgc(p, ctx):
    mu, gamma, N = _get(p, "mu", "gamma", "N")
    mu, gamma, N = weight(mu, ctx), weight(gamma, ctx), _int(N)
    method = p.get("method", "closed")
    return {"table": [[fmt(it.cgc(mu, gamma, N, l, m, ctx, method)) for m in range(N + 1)]
                      for l in range(N + 1)], "rows": "l", "cols": "m"}


def _eval_q3j(p, ctx):
    j1, j2, j, m1, m2 = (frac(x) for x in _get(p, "j1", "j2", "j", "m1", "m2"))
    return {"value": fmt(it.q3j(j1, j2, j, m1, m2, ctx))}


def _fusion_table(p, ctx, inverse):
    d, g, s, lam = _get(p, "delta", "gamma", "s", "lam")
    d, g, s, lam = weight(d, ctx), weight(g, ctx), _int(s), weight(lam, ctx)
    block = fu.fusion_block(d, g, s, lam, ctx, inverse=inverse)
    return {"table": [[fmt(x) for x in row] for row in block], "rows": "m", "cols": "n"}


def _eval_exchange(p, ctx):
    g, d, s, lam = _get(p, "gamma", "delta", "s", "lam")
    g, d, s, lam = weight(g, ctx), weight(d, ctx), _int(s), weight(lam, ctx)
    method = p.get("method", "closed")
    if method not in ex.METHODS:
        raise ConfigError(f"method must be one of {', '.join(ex.METHODS)}")
    return {"table": [[fmt(ex.exchange_elem(g, d, s, m, n, lam, ctx, method)) for n in range(s + 1)]
                      for m in range(s + 1)], "rows": "m", "cols": "n"}


def _labels(p):
    return [frac(x) for x in _get(p, "j1", "j2", "j3", "j", "j12", "j13")]


def _eval_sixj(p, ctx):
    # rows given directly as a..f, or through the coupling labels
    if all(k in p for k in "abcdef"):
        return {"value": fmt(ex.sixj_symbol(*(frac(p[k]) for k in "abcdef"), ctx=ctx))}
    return {"value": fmt(ex.sixj(ex.SixJLabel(*_labels(p)), ctx))}


def _eval_racah_w(p, ctx):
    return {"value": fmt(ex.racah_W(ex.SixJLabel(*_labels(p)), ctx))}


def _eval_q_hahn(p, ctx):
    n, x, a, b, N = _get(p, "n", "x", "a", "b", "N")
    return {"value": fmt(qs.q_hahn(_int(n), _int(x), weight(a, ctx), weight(b, ctx), _int(N), ctx))}


def _eval_q_racah(p, ctx):
    m, n, lam, g, d, s = _get(p, "m", "n", "lam", "gamma", "delta", "s")
    return {"value": fmt(qs.q_racah(_int(m), _int(n), weight(lam, ctx), weight(g, ctx),
                                    weight(d, ctx), _int(s), ctx))}


EVAL_TARGETS = {
    "cgc": _eval_cgc,
    "q3j": _eval_q3j,
    "fusion": lambda p, ctx: _fusion_table(p, ctx, False),
    "fusion_inv": lambda p, ctx: _fusion_table(p, ctx, True),
    "exchange": _eval_exchange,
    "sixj": _eval_sixj,
    "racah_w": _eval_racah_w,
    "q_hahn": _eval_q_hahn,
    "q_racah": _eval_q_racah,
}


# ---------------------------------------------------------------------------
# verify / sweep


def _case_record(name, params, res: Residual, elapsed=None):
    rec = {
        "identity": name,
        "params": params,
        "ok": res.ok,
        "residual": res.magnitude(),
        "exact_zero": res.mode == "exact" and res.ok,
        "count": res.count,
        "failures": res.failures,
        "depth": res.depth,
    }
    if not res.ok:
        rec["worst"] = res.worst
    if elapsed is not None:
        rec["elapsed"] = round(elapsed, 6)
    return rec


def _timed_run(args):
    t0 = time.perf_counter()
    res = run_case(args)
    return res, time.perf_counter() - t0


def run_cases(cases, ctx, workers=1, timings=False, progress=None):
    """Run ``[(identity, params), ...]``; results keep the input order."""
    jobs = [(name, params, ctx, ctx.depth) for name, params in cases]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_timed_run, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = []
        for i, job in enumerate(jobs):
            results.append(_timed_run(job))
            if progress:
                progress(i + 1, len(jobs), job[0])
    return [_case_record(name, params, res, dt if timings else None)
            for (name, params), (res, dt) in zip(cases, results)]


def summarize(records):
    per = {}
    for r in records:
        s = per.setdefault(r["identity"], {"cases": 0, "failed": 0, "max_residual": "0"})
        s["cases"] += 1
        s["failed"] += not r["ok"]
        if r["residual"] != "0" and float(r["residual"]) >= float(s["max_residual"]):
            s["max_residual"] = r["residual"]
    worst = max((float(s["max_residual"]) for s in per.values()), default=0.0)
    return {
        "cases": len(records),
        "passed": sum(r["ok"] for r in records),
        "failed": sum(not r["ok"] for r in records),
        "max_residual": "0" if worst == 0 else repr(worst),
        "by_identity": per,
    }


def _case_list(args, ctx):
    names = IDENTITIES if args.identity == "all" else (args.identity,)
    if args.command == "verify" and args.params:
        if args.identity == "all":
            raise ConfigError("explicit parameters need a single identity, not 'all'")
        return [(args.identity, _kv(args.params))]
    out = []
    overrides = _sweep_overrides(args.params) if args.command == "sweep" else {}
    for name in names:
        if args.command == "sweep":
            cases = sampled_cases(name, ctx, args.seed, args.samples)
            rng = random.Random(f"{name}:{args.seed}:override")
            cases = [{**c, **{k: draw(rng) for k, draw in overrides.items()}} for c in cases]
        else:
            cases = default_cases(name, ctx, args.seed)
        out += [(name, c) for c in cases]
    return out


# ---------------------------------------------------------------------------
# output


def render_json(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _flat(prefix, value, out):
    if isinstance(value, dict):
        for k in sorted(value):
            _flat(f"{prefix}{k}.", value[k], out)
    elif isinstance(value, list):
        out[prefix[:-1]] = ";".join(
            ",".join(map(str, v)) if isinstance(v, list) else str(v) for v in value)
    else:
        out[prefix[:-1]] = value


def render_csv(report):
    rows = []
    for case in report["cases"]:
        flat = {}
        _flat("", case, flat)
        rows.append(flat)
    cols = sorted({k for r in rows for k in r})
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _config(args):
    for name in OPTIONS:
        if hasattr(args, name) and getattr(args, name) is None:
            setattr(args, name, _env_default(name))
    if args.mode not in ("exact", "numeric"):
        raise ConfigError(f"mode must be 'exact' or 'numeric', got {args.mode!r}")
    if args.format not in ("json", "csv"):
        raise ConfigError(f"format must be 'json' or 'csv', got {args.format!r}")
    if args.workers < 1:
        raise ConfigError("workers must be >= 1")
    if getattr(args, "samples", 0) < 0:
        raise ConfigError("samples must be >= 0")
    return EvalContext(args.mode, q=args.q, tol=args.tol, depth=args.depth)


def _meta(args, ctx):
    return {"version": __version__, "command": args.command, "mode": ctx.mode, "q": ctx.q,
            "tolerance": ctx.tol, "depth": ctx.depth, "seed": args.seed}


def _progress(i, n, name):
    if sys.stderr.isatty() or os.environ.get(ENV_PREFIX + "PROGRESS"):
        print(f"[{i}/{n}] {name}", file=sys.stderr)


def main(argv=None):
    parser = _parser()
    try:
        # key=value tokens may follow options; argparse leaves those over
        args, extra = parser.parse_known_args(argv)
        stray = [x for x in extra if x.startswith("-") or "=" not in x]
        if stray:
            parser.error(f"unrecognized arguments: {' '.join(stray)}")
        args.params = getattr(args, "params", []) + extra
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        ctx = _config(args)
        if args.command == "eval":
            t0 = time.perf_counter()
            params = _kv(args.params)
            result = EVAL_TARGETS[args.target](params, ctx)
            case = {"target": args.target, "params": params, **result}
            if args.timings:
                case["elapsed"] = round(time.perf_counter() - t0, 6)
            report = {"meta": _meta(args, ctx), "cases": [case], "summary": {"cases": 1}}
            status = 0
        else:
            cases = _case_list(args, ctx)
            records = run_cases(cases, ctx, args.workers, args.timings, _progress)
            summary = summarize(records)
            report = {"meta": _meta(args, ctx), "cases": records, "summary": summary}
            status = 0 if summary["failed"] == 0 else 1
    except (ConfigError, QError) as exc:
        print(f"uqsl2: error: {exc}", file=sys.stderr)
        return 2
    text = render_json(report) if args.format == "json" else render_csv(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if status:
        print(f"uqsl2: {report['summary']['failed']} of {report['summary']['cases']} cases failed",
              file=sys.stderr)
    return status


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
