"""Command-line front end.

Subcommands::

    roots   list roots, orbits, group order, subsphere quadrics and tags
    verify  run every invariant suite; exit status 1 on any failure
    eval    evaluate the operator at points from a file
    table   cross-validation error table over seeded sample points

Function specs (``--function`` or ``[operator] function``) are expressions in
x1..xn with + - * / and ^ (or **), decimal or p/q constants and the functions
exp, log, sin, cos, sqrt.  Example: ``x1^2 + exp(x2)/(1 + x1^2)``.

Points files hold one point per line as whitespace-separated decimals;
``#`` starts a comment.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import warnings
from pathlib import Path

from . import chartcalc as cc
from .chartcalc import Density
from .config import ConfigError, RunConfig, load_config
from .conformal import (
    ChartSingularityError,
    ConformalOperatorSpec,
    ambient_route,
    chart_operator,
    rel_err,
    sample_regular_points,
)
from .dunkl import DunklContext
from .rootsys import GroupCapError, PointAtInfinityError, generate_group, subsphere_quadric
from .scalars import format_scalar
from .verify import run_all


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return format_scalar(float(v)) if isinstance(v, float) else str(v)
    if isinstance(v, (tuple, list)):
        return " ".join(_fmt(c) for c in v)
    try:
        return format_scalar(v)
    except (TypeError, ValueError):
        return str(v)


def _json_value(v):
    if isinstance(v, float) or v is None or isinstance(v, (bool, int, str)):
        return v
    if isinstance(v, (tuple, list)):
        return [_json_value(c) for c in v]
    return _fmt(v)


def _write_rows(rows: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        json.dump([{k: _json_value(v) for k, v in r.items()} for r in rows], out, indent=2)
        out.write("\n")
        return
    if not rows:
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(list(rows[0].keys()))
    for r in rows:
        w.writerow([_fmt(v) for v in r.values()])


def _context(cfg: RunConfig) -> DunklContext:
    R = cfg.system()
    return DunklContext(R, cfg.multiplicity_function(R))


def _spec(cfg: RunConfig, ctx: DunklContext) -> ConformalOperatorSpec:
    return ConformalOperatorSpec(ctx, cfg.j, cfg.weight_value())


def _function(cfg: RunConfig, override: str | None) -> cc.Expr:
    text = override or cfg.function or _default_function(cfg.n)
    return cc.parse_expr(text, cfg.n)


def _default_function(n: int) -> str:
    return f"exp(x1/3)*(1 + x{n}^2) + x1"


# -- subcommands ------------------------------------------------------------------

def cmd_roots(cfg: RunConfig, args, out) -> int:
    R = cfg.system()
    G = generate_group(R, cfg.group_cap)
    positive = set(R.positive_roots)
    rows = []
    for r in R.roots:
        q = subsphere_quadric(r)
        rows.append(
            {
                "root": r.vector,
                "positive": r in positive,
                "orbit": R.orbit_index(r),
                "norm": r.norm,
                "tag": R.tag(r),
                "quadric_c2": q.c2,
                "quadric_linear": q.linear,
                "quadric_c0": q.c0,
            }
        )
    if args.format == "text":
        out.write(f"system {R.name or cfg.root_system}  n = {R.n}  roots {len(R.roots)}  "
                  f"orbits {len(R.orbits)} {[len(o) for o in R.orbits]}  group order {G.order}\n")
        for r in rows:
            sign = "+" if r["positive"] else "-"
            tag = f" [{r['tag']}]" if r["tag"] else ""
            out.write(
                f"{sign} ({_fmt(r['root'])})  orbit {r['orbit']}  norm {_fmt(r['norm'])}{tag}  "
                f"quadric {_fmt(r['quadric_c2'])}|x|^2 + <({_fmt(r['quadric_linear'])}), x> + {_fmt(r['quadric_c0'])}\n"
            )
        return 0
    if args.format == "json":
        doc = {
            "name": R.name,
            "n": R.n,
            "group_order": G.order,
            "orbit_sizes": [len(o) for o in R.orbits],
            "roots": [{k: _json_value(v) for k, v in r.items()} for r in rows],
        }
        json.dump(doc, out, indent=2)
        out.write("\n")
        return 0
    for r in rows:
        r["group_order"] = G.order
    _write_rows(rows, "csv", out)
    return 0


def cmd_verify(cfg: RunConfig, args, out) -> int:
    ctx = _context(cfg)
    show = (lambda r: print(r.line(), file=sys.stderr, flush=True)) if args.format != "text" else None
    if args.format == "text":
        out.write(f"verify {ctx.root_system.name} n = {ctx.n} k = {_fmt(ctx.multiplicity.values)} seed = {cfg.seed}\n")
        show = lambda r: (out.write(r.line() + "\n"), out.flush())  # noqa: E731
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        results = run_all(ctx, cfg.seed, cfg.sizes(), cfg.tolerances, cfg.group_cap, progress=show)
    failed = [r for r in results if not r.passed]
    if args.format == "text":
        out.write(f"{len(results) - len(failed)}/{len(results)} checks passed\n")
    else:
        rows = [
            {
                "check": r.name,
                "status": "skip" if r.skipped else ("pass" if r.passed else "fail"),
                "residual": r.residual,
                "tolerance": r.tolerance,
                "cases": r.cases,
                "detail": r.detail,
            }
            for r in results
        ]
        _write_rows(rows, args.format, out)
    return 1 if failed else 0


def read_points(path, n: int) -> list[tuple]:
    pts = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            p = tuple(float(t) for t in line.split())
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: expected decimals") from None
        if len(p) != n:
            raise ConfigError(f"{path}:{lineno}: expected {n} coordinates, got {len(p)}")
        pts.append(p)
    return pts


def cmd_eval(cfg: RunConfig, args, out) -> int:
    ctx = _context(cfg)
    spec = _spec(cfg, ctx)
    d = Density(_function(cfg, args.function), spec.w, cfg.n)
    if args.points:
        pts = read_points(args.points, cfg.n)
    else:
        pts = sample_regular_points(ctx, cfg.samples, random.Random(cfg.seed))
    route = args.route
    if route == "both" and spec.j != 1:
        route = "ambient"
    if route == "chart" and spec.j != 1:
        raise ConfigError("the chart formula covers j = 1 only")
    rows, bad = [], 0
    for p in pts:
        row = {f"x{i + 1}": c for i, c in enumerate(p)}
        err = ""
        try:
            if route in ("chart", "both"):
                row["chart"] = chart_operator(spec, d, p, warn=False)
            if route in ("ambient", "both"):
                row["ambient"] = ambient_route(spec, d, p)
        except (ChartSingularityError, PointAtInfinityError, cc.DomainError) as exc:
            err = str(exc)
            bad += 1
        for key in ("chart", "ambient"):
            if route in (key, "both"):
                row.setdefault(key, None)
        row["error"] = err
        rows.append(row)
    fmt = "csv" if args.format == "text" else args.format
    _write_rows(rows, fmt, out)
    return 2 if bad else 0


def cmd_table(cfg: RunConfig, args, out) -> int:
    ctx = _context(cfg)
    spec = _spec(cfg, ctx)
    n = cfg.n
    f = _function(cfg, args.function)
    d = Density(f, spec.w, n)
    rng = random.Random(cfg.seed)
    pts = sample_regular_points(ctx, cfg.samples, rng, depth=spec.j)
    rows = []
    if spec.j == 1:
        for i, p in enumerate(pts):
            a, b = chart_operator(spec, d, p, warn=False), ambient_route(spec, d, p)
            rows.append({"index": i, **{f"x{k + 1}": c for k, c in enumerate(p)},
                         "chart": a, "ambient": b, "rel_err": rel_err(a, b)})
    else:
        # extension dependence of the ambient route for higher powers
        g = Density(cc.parse_expr("1 + x1^2", n), spec.w - 2, n)
        pert = cc.perturb_extension(cc.density_to_ambient(d), g)
        for i, p in enumerate(pts):
            a = ambient_route(spec, d, p)
            b = ambient_route(spec, d, p, pert)
            rows.append({"index": i, **{f"x{k + 1}": c for k, c in enumerate(p)},
                         "ambient": a, "perturbed": b, "rel_err": rel_err(b, a)})
    fmt = "csv" if args.format == "text" else args.format
    _write_rows(rows, fmt, out)
    return 0


# -- argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key-value configuration file")
    common.add_argument("--seed", type=int, help="override [run] seed")
    common.add_argument("--out", type=Path, help="write output here instead of stdout")
    common.add_argument("--format", choices=("text", "csv", "json"), default=None,
                        help="output format (default: text for roots/verify, csv for eval/table)")
    common.add_argument("--n", type=int, help="override [system] n")
    common.add_argument("--root-system", help="override [system] root_system")
    common.add_argument("--k", help="override [system] multiplicity, e.g. '1/2,2'")
    common.add_argument("--j", type=int, help="override [operator] j")

    p = argparse.ArgumentParser(
        prog="ambient-dunkl",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("roots", parents=[common], help="list a root system")
    sub.add_parser("verify", parents=[common], help="run the invariant suites")
    pe = sub.add_parser("eval", parents=[common], help="evaluate the operator at points",
                        description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    pe.add_argument("--function", "-f", help="chart function spec, e.g. 'x1^2 + exp(x2)'")
    pe.add_argument("--points", type=Path, help="points file (default: seeded regular samples)")
    pe.add_argument("--route", choices=("chart", "ambient", "both"), default="both")
    pt = sub.add_parser("table", parents=[common], help="cross-validation error table")
    pt.add_argument("--function", "-f", help="chart function spec")
    return p


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.n is not None:
        cfg.n = args.n
    if args.root_system:
        cfg.root_system = args.root_system
    if args.k:
        cfg.multiplicity = tuple(v for v in args.k.replace(",", " ").split() if v)
        cfg.multiplicity_file = None
    if args.j is not None:
        cfg.j = args.j
    return cfg


_COMMANDS = {"roots": cmd_roots, "verify": cmd_verify, "eval": cmd_eval, "table": cmd_table}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "text" if args.command in ("roots", "verify") else "csv"
    try:
        cfg = _config(args)
        buf = io.StringIO()
        code = _COMMANDS[args.command](cfg, args, buf)
    except (ConfigError, GroupCapError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        args.out.write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
