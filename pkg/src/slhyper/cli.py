"""Command-line experiment runner.

Every subcommand writes its CSV files and a ``run.meta`` file with the
effective parameters into ``--out``, prints one ``PASS``/``FAIL`` line per
assertion and exits with 0 when all pass, 1 otherwise. Usage errors,
including a malformed ``--config`` file, exit with 2.
"""

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from . import concentration as conc
from . import hyper
from .gridfn import Grid
from .measure import MeasureSpec, lsi_residual
from .profiles import parse_profile
from .slscheme import SchemeConfig


class UsageError(Exception):
    pass


def parse_number(text):
    """Float, also accepting ``2^-10`` style powers."""
    text = text.strip()
    if "^" in text:
        base, exp = text.split("^", 1)
        return float(base) ** float(exp)
    return float(text)


def parse_ladder(text):
    """``hi:lo`` halves from ``hi`` down to ``lo``; ``a,b,c`` is an explicit list."""
    if ":" in text:
        hi, lo = (parse_number(t) for t in text.split(":", 1))
        if not 0 < lo <= hi:
            raise ValueError(f"bad ladder {text!r}")
        out = [hi]
        while out[-1] / 2 >= lo * (1 - 1e-12):
            out.append(out[-1] / 2)
        return out
    return [parse_number(t) for t in text.split(",") if t.strip()]


def parse_pairs(text):
    """``a,b;c,d`` into ``[(a, b), (c, d)]``."""
    pairs = []
    for item in text.split(";"):
        a, b = item.split(",")
        pairs.append((parse_number(a), parse_number(b)))
    return pairs


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(r[k]) for k in header])


def _map(func, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(func, items))


class Run:
    """Collects assertion outcomes for one invocation."""

    def __init__(self, out):
        self.out = out
        self.results = []

    def check(self, name, ok, detail=""):
        ok = bool(ok)
        self.results.append(ok)
        print(f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else ""))

    def path(self, name):
        return os.path.join(self.out, name)

    @property
    def status(self):
        return 0 if all(self.results) else 1


def _grid(args):
    return Grid(args.dim, args.R, args.m)


# subcommands


def cmd_hyper_gauss(args, run):
    prof = parse_profile(args.profile)
    f = prof.sample(_grid(args), interp=args.interp)
    sched = hyper.LambdaSchedule(args.a, args.rho, args.h)
    rep = hyper.gauss_hyper_chain(f, sched, args.n, SchemeConfig(args.h),
                                  MeasureSpec.gaussian(args.rho), C=args.C)
    write_rows(run.path("chain.csv"), ["n", "lambda", "logF", "boundFactor", "fittedC"],
               rep.rows())
    run.check("fitted C finite", math.isfinite(rep.fitted_C), f"C={rep.fitted_C:.6g}")
    run.check("chain bound", rep.passed, f"logF_n={rep.log_F[-1]:.6g} bound={rep.log_bound[-1]:.6g}")


def _lebesgue_row(item, profile, grid_args, interp):
    alpha, beta, n, T, tol, equality = item
    prof = parse_profile(profile)
    f = prof.sample(Grid(*grid_args), interp=interp)
    c = hyper.lebesgue_hyper_check(f, alpha, beta, n, SchemeConfig(T / n))
    ok = (abs(c.gap) <= tol if equality else c.holds(tol)) and not c.note
    return {"alpha": alpha, "beta": beta, "n": n, "h": T / n, "lhsLog": c.lhs,
            "rhsLog": c.rhs, "gap": c.gap, "pass": ok, "note": c.note}


def cmd_hyper_lebesgue(args, run):
    items = [(a, b, args.n, T, args.tol, False) for a, b in parse_pairs(args.pairs)
             for T in parse_ladder(args.T)]
    if args.optimal:
        prof = parse_profile(args.profile)
        if prof.name != "quad":
            raise UsageError("--optimal needs a quad profile")
        a, b = parse_pairs(args.optimal)[0]
        T = hyper.solve_optimality_time(a, b, prof.params["b"])
        items.append((a, b, args.n, T, args.equality_tol, True))
    rows = _map(partial(_lebesgue_row, profile=args.profile, grid_args=(args.dim, args.R, args.m),
                        interp=args.interp), items, args.jobs)
    write_rows(run.path("check.csv"),
               ["alpha", "beta", "n", "h", "lhsLog", "rhsLog", "gap", "pass"], rows)
    for r, it in zip(rows, items):
        kind = "equality" if it[5] else "bound"
        run.check(f"{kind} alpha={r['alpha']:g} beta={r['beta']:g} nh={it[3]:.6g}", r["pass"],
                  f"gap={r['gap']:.3g}" + (f" ({r['note']})" if r["note"] else ""))


def cmd_ultra(args, run):
    grid = _grid(args)
    c = hyper.ultracontractive_check(args.b, args.xbar, args.n, args.h, grid,
                                     analytic=args.analytic, interp=args.interp)
    equal = args.analytic and abs(args.n * args.h * args.b - 1) < 1e-12
    ok = abs(c.gap) <= args.tol if equal else c.lhs < c.rhs
    write_rows(run.path("check.csv"), ["b", "n", "h", "lhsLog", "rhsLog", "gap", "pass"],
               [{"b": args.b, "n": args.n, "h": args.h, "lhsLog": c.lhs, "rhsLog": c.rhs,
                 "gap": c.gap, "pass": ok}])
    run.check("ultracontractive " + ("equality" if equal else "strict bound"), ok,
              f"lhs={c.lhs:.6g} rhs={c.rhs:.6g}")


def cmd_constants(args, run):
    hs = parse_ladder(args.h_ladder)
    if args.figure == 1:
        vals = [hyper.gauss_constant_product(args.C, hyper.LambdaSchedule(args.a, args.rho, h),
                                             args.n) for h in hs]
    else:
        vals = [math.exp(hyper.lebesgue_constant_product(
            hyper.BetaSchedule.linear(args.beta0, args.rho, h, args.n), h, args.dim))
            for h in hs]
    write_rows(run.path("constants.csv"), ["h", "value"],
               [{"h": h, "value": v} for h, v in zip(hs, vals)])
    d = np.diff(vals)
    if args.figure == 1:
        run.check("constant >= 1", min(vals) >= 1.0, f"min={min(vals):.6g}")
        run.check("monotone toward 1 as h decreases", np.all(d <= 0))
    else:
        run.check("constant <= 1", max(vals) <= 1.0, f"max={max(vals):.6g}")
        run.check("monotone toward 1 as h decreases", np.all(d >= 0))
    if args.limit_tol is not None:
        gap = abs(vals[-1] - 1.0)
        run.check(f"within {args.limit_tol:g} of 1 at h={hs[-1]:.6g}", gap <= args.limit_tol,
                  f"|value - 1|={gap:.3g}")


def _ladder_row(h, profile, T, p, grid_args, interp):
    return conc.ladder_row(parse_profile(profile), T, p, h, Grid(*grid_args), interp)


def cmd_concentration(args, run):
    hs = parse_ladder(args.h_ladder)
    rows = _map(partial(_ladder_row, profile=args.profile, T=args.T, p=args.p,
                        grid_args=(args.dim, args.R, args.m), interp=args.interp), hs, args.jobs)
    conc.with_fitted_order(rows)
    write_rows(run.path("ladder.csv"),
               ["h", "n", "p", "tailMass", "meanErr", "supErr", "fittedOrder"],
               [r.as_dict() for r in rows])
    masses = [r.tail_mass for r in rows]
    run.check("tail mass nonincreasing", np.all(np.diff(masses) <= 0), f"masses={masses}")
    slope, used = conc.tail_decay_slope(hs, masses, args.p)
    if len(used) < 2:
        run.check("tail decay slope <= 0", True, f"{len(used)} nonzero masses, nothing to fit")
    else:
        run.check("tail decay slope <= 0", slope <= 0, f"slope={slope:.4g}")


def cmd_order(args, run):
    hs = parse_ladder(args.h_ladder)
    study = conc.convergence_order(parse_profile(args.profile), args.T, hs, dim=args.dim,
                                   half_width=args.R, scale=args.scale, interp=args.interp)
    write_rows(run.path("order.csv"), ["h", "n", "dx", "supErr", "fittedOrder"],
               [{"h": h, "n": conc.steps_for(args.T, h), "dx": dx, "supErr": e,
                 "fittedOrder": study.order}
                for h, dx, e in zip(hs, study.spacings, study.errors)])
    detail = f"order={study.order:.4g}" + (" (floor reached)" if study.floor_reached else "")
    run.check(f"fitted order >= {args.min_order:g}",
              study.order >= args.min_order and not study.floor_reached, detail)


def cmd_lsi_check(args, run):
    prof = parse_profile(args.profile)
    grid = _grid(args)
    u = grid.sample(lambda x: np.exp(prof(x)), interp=args.interp)
    r = lsi_residual(u, MeasureSpec.gaussian(args.rho))
    write_rows(run.path("lsi.csv"), ["profile", "rho", "m", "R", "residual"],
               [{"profile": prof.label, "rho": args.rho, "m": args.m, "R": args.R,
                 "residual": r}])
    run.check("log-Sobolev residual >= 0", r >= -args.tol, f"residual={r:.6g}")
    if args.saturated:
        run.check("log-Sobolev equality", abs(r) <= args.tol, f"|residual|={abs(r):.3g}")


# argument parsing


def _common(p, m=4097, R=12.0, interp="cubic"):
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="concurrent parameter tuples")
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument("--dim", type=int, default=1, choices=(1, 2))
    p.add_argument("--m", type=int, default=m, help="grid points per axis")
    p.add_argument("--R", type=float, default=R, help="box half-width")
    p.add_argument("--interp", default=interp, choices=("linear", "cubic"))


def build_parser():
    parser = argparse.ArgumentParser(prog="slhyper", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("hyper-gauss", help="Gaussian hypercontractivity chain")
    _common(p)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--h", type=float, default=0.1)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--C", type=float, default=None, help="bound constant (default: fitted)")
    p.add_argument("--profile", default="quad:b=0.5")
    p.set_defaults(func=cmd_hyper_gauss)

    p = sub.add_parser("hyper-lebesgue", help="sharp Lebesgue bound and its equality case")
    _common(p)
    p.add_argument("--pairs", default="1,1;1,2;0.5,1", help="alpha,beta;alpha,beta;...")
    p.add_argument("--T", default="0.25,0.5", help="horizons n h")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--profile", default="quad:b=1")
    p.add_argument("--optimal", default=None,
                   help="alpha,beta pair to run at its equality time")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--equality-tol", type=float, default=1e-4)
    p.set_defaults(func=cmd_hyper_lebesgue)

    p = sub.add_parser("ultra", help="ultracontractive bound")
    _common(p)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--xbar", type=float, default=0.0)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--h", type=float, default=0.1)
    p.add_argument("--analytic", action="store_true")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_ultra)

    p = sub.add_parser("constants", help="constant-product curves")
    _common(p)
    p.add_argument("--figure", type=int, default=1, choices=(1, 3),
                   help="1: Gaussian product, 3: Lebesgue product")
    p.add_argument("--C", type=float, default=0.01)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--beta0", type=float, default=1.0)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--h-ladder", default="1:2^-10")
    p.add_argument("--limit-tol", type=float, default=None,
                   help="also require |value - 1| <= tol at the smallest h")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("concentration", help="tail mass and mean error ladder")
    _common(p, interp="linear")
    p.add_argument("--profile", default="sqrt1px2")
    p.add_argument("--T", type=float, default=0.5)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--h-ladder", default="0.2:0.025")
    p.set_defaults(func=cmd_concentration)

    p = sub.add_parser("order", help="convergence order with dx tied to h")
    _common(p, R=3.0, interp="linear")
    p.add_argument("--profile", default="negabs")
    p.add_argument("--T", type=float, default=0.5)
    p.add_argument("--h-ladder", default="0.1:0.0125")
    p.add_argument("--scale", type=float, default=1.0, help="dx = scale h^2")
    p.add_argument("--min-order", type=float, default=0.45)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("lsi-check", help="log-Sobolev residual of u = exp(profile)")
    _common(p, m=8193)
    p.add_argument("--profile", default="affine:p=0.5")
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--saturated", action="store_true",
                   help="also require equality (exponentials of affine data)")
    p.set_defaults(func=cmd_lsi_check)
    return parser


def read_config(path):
    """``key=value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, val = line.partition("=")
            if not eq or not key.strip():
                raise UsageError(f"{path}:{lineno}: expected key=value")
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def _subparser(parser, name):
    for action in parser._subparsers._group_actions:
        if name in action.choices:
            return action.choices[name]
    raise KeyError(name)


def _apply_config(parser, argv):
    """Parse ``argv`` with defaults taken from ``--config`` when given."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    sp = _subparser(parser, args.command)
    conf = read_config(args.config)
    actions = {a.dest: a for a in sp._actions}
    defaults = {}
    for key, raw in conf.items():
        act = actions.get(key)
        if act is None or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        if act.nargs == 0:
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        else:
            try:
                val = act.type(raw) if act.type else raw
            except ValueError:
                raise UsageError(f"bad value {raw!r} for config key {key!r}") from None
            if act.choices is not None and val not in act.choices:
                raise UsageError(f"bad value {raw!r} for config key {key!r}")
            defaults[key] = val
    sp.set_defaults(**defaults)
    return parser.parse_args(argv)


def write_meta(args, path):
    skip = {"func", "config", "out"}
    with open(path, "w") as fh:
        for key in sorted(vars(args)):
            if key not in skip:
                fh.write(f"{key}={_fmt(getattr(args, key))}\n")


def run(argv=None):
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        os.makedirs(args.out, exist_ok=True)
        write_meta(args, os.path.join(args.out, "run.meta"))
        r = Run(args.out)
        args.func(args, r)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    except (UsageError, OSError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"slhyper: error: {exc}", file=sys.stderr)
        return 2
    return r.status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
