"""Invariant suites shared by the ``verify`` subcommand and the test harness.

Every check returns a :class:`CheckResult`; exact checks report the number of
failing cases as their residual, numerical checks the worst relative error.
"""
from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import chartcalc as cc
from .ambient import null_lift, pair
from .chartcalc import Density
from .conformal import (
    ConditioningWarning,
    ConformalOperatorSpec,
    ambient_route,
    chart_equivariance_residual,
    chart_operator,
    classical_dunkl_chart,
    cross_validate,
    extension_independence_residual,
    higher_power,
    is_regular,
    principal_symbol,
    rel_err,
    sample_regular_points,
)
from .dunkl import (
    DunklContext,
    commutativity_check,
    dunkl_equivariance_check,
    dunkl_laplacian_direct,
    dunkl_laplacian_sum,
    equivariance_check,
    sl2_commutators,
)
from .polyalg import MultiPoly
from .rootsys import (
    MultiplicityFunction,
    RootSystem,
    chart_reflection,
    generate_group,
    hyperplane_basis,
    lifted_chart_reflection,
    root_system_violations,
)

TOLERANCES = {
    "extension_independence": 1e-9,
    "extension_power": 1e-3,
    "route_agreement": 1e-8,
    "classical_reduction": 1e-10,
    "k0_reduction": 1e-12,
    "bilaplacian": 1e-7,
    "geometry": 1e-10,
    "derivatives": 1e-6,
    "chart_equivariance": 1e-8,
    "symbol": 1e-6,
    "homogeneity": 1e-10,
}

FD_STEP = 1e-5


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float | None = None  # None for exact checks
    cases: int = 0
    detail: str = ""
    skipped: bool = False

    def line(self) -> str:
        status = "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")
        tol = "exact" if self.tolerance is None else f"tol {self.tolerance:.0e}"
        extra = f"  {self.detail}" if self.detail else ""
        return f"{status}  {self.name:<28} residual {self.residual:.3e} ({tol}, {self.cases} cases){extra}"


def _skip(name: str, why: str) -> CheckResult:
    return CheckResult(name, True, 0.0, cases=0, detail=why, skipped=True)


def _numeric(name, worst, tol, cases, detail="") -> CheckResult:
    ok = math.isfinite(worst) and worst <= tol
    return CheckResult(name, ok, worst, tol, cases, detail)


def _exact(name, failures, cases, detail="") -> CheckResult:
    return CheckResult(name, failures == 0, float(failures), None, cases, detail)


# -- random instances --------------------------------------------------------------

def random_poly(rng: random.Random, nvars: int, max_degree: int, terms: int = 5) -> MultiPoly:
    out = {}
    for _ in range(terms):
        d = rng.randint(0, max_degree)
        e = [0] * nvars
        for _ in range(d):
            e[rng.randrange(nvars)] += 1
        out[tuple(e)] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    return MultiPoly(nvars, out)


def random_vector(rng: random.Random, N: int) -> tuple:
    return tuple(Fraction(rng.randint(-3, 3)) for _ in range(N))


def random_expression(rng: random.Random, nvars: int, depth: int = 3) -> cc.Expr:
    """A random smooth expression; every guarded node has a base bounded away from 0."""
    xs = cc.variables(nvars)

    def leaf():
        if rng.random() < 0.7:
            return xs[rng.randrange(nvars)]
        return cc.const(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))

    def build(d):
        if d == 0:
            return leaf()
        u = build(d - 1)
        op = rng.randrange(9)
        if op == 0:
            return u + build(d - 1)
        if op == 1:
            return u * build(d - 1)
        if op == 2:
            return u - build(d - 1)
        if op == 3:
            return u / (1 + build(d - 1) ** 2)
        if op == 4:
            return cc.sin(u)
        if op == 5:
            return cc.cos(u)
        if op == 6:
            return cc.exp(cc.sin(u))
        if op == 7:
            return u ** rng.randint(2, 3)
        return cc.rpow(1 + u**2, Fraction(rng.randint(-5, 5), 3))

    return build(depth)


def random_test_function(rng: random.Random, n: int) -> cc.Expr:
    """Smooth chart function: polynomial plus exponential and rational pieces."""
    xs = cc.variables(n)
    c = [Fraction(rng.randint(-3, 3), 4) for _ in range(n)]
    lin = cc.add(*[cc.mul(cc.const(ci), v) for ci, v in zip(c, xs)])
    poly = cc.add(*[cc.mul(cc.const(rng.randint(-2, 2)), xs[rng.randrange(n)], xs[rng.randrange(n)]) for _ in range(2)])
    rat = cc.div(cc.const(rng.randint(1, 3)), 1 + cc.add(*[v**2 for v in xs]))
    return cc.exp(lin) + poly + rat + xs[0] ** 3 * cc.const(Fraction(rng.randint(-2, 2), 3))


def multiplicity(system: RootSystem, values) -> MultiplicityFunction:
    """Per-orbit values; short lists are cycled to the number of orbits."""
    vals = list(values)
    m = len(system.orbits)
    return MultiplicityFunction(system, tuple(vals[i % len(vals)] for i in range(m)))


# -- exact polynomial suites ---------------------------------------------------------

def check_sl2(ctx: DunklContext, degree: int = 6) -> CheckResult:
    if not ctx.root_system.is_rational:
        return _skip("sl2", "roots not rational")
    rep = sl2_commutators(ctx, degree)
    signs = [r for r in rep.verified if r.startswith("[H")]
    return _exact("sl2", rep.failures["[E,F] = H"], rep.monomials_checked, "signs: " + ", ".join(signs))


def check_commutativity(ctx: DunklContext, rng: random.Random, pairs: int = 50, degree: int = 4) -> CheckResult:
    if not ctx.root_system.is_rational:
        return _skip("commutativity", "roots not rational")
    N = ctx.nvars
    bad = 0
    for _ in range(pairs):
        xi, eta = random_vector(rng, N), random_vector(rng, N)
        p = random_poly(rng, N, degree)
        bad += not commutativity_check(ctx, xi, eta, p).is_zero()
    return _exact("commutativity", bad, pairs)


def check_two_laplacians(ctx: DunklContext, rng: random.Random, count: int = 200, degree: int = 5) -> CheckResult:
    if not ctx.root_system.is_rational:
        return _skip("two_laplacians", "roots not rational")
    bad = 0
    for _ in range(count):
        p = random_poly(rng, ctx.nvars, degree)
        bad += dunkl_laplacian_sum(ctx, p) != dunkl_laplacian_direct(ctx, p)
    return _exact("two_laplacians", bad, count)


def check_equivariance(ctx: DunklContext, rng: random.Random, count: int = 50, degree: int = 4) -> CheckResult:
    """Laplacian and Dunkl operators commute with every generating reflection."""
    if not ctx.root_system.is_rational:
        return _skip("equivariance", "roots not rational")
    gens = ctx.root_system.reflections()
    bad = cases = 0
    for _ in range(count):
        p = random_poly(rng, ctx.nvars, degree)
        for g in gens:
            cases += 1
            bad += not equivariance_check(ctx, g, p).is_zero()
        g = gens[rng.randrange(len(gens))]
        cases += 1
        bad += not dunkl_equivariance_check(ctx, g, random_vector(rng, ctx.nvars), p).is_zero()
    return _exact("equivariance", bad, cases)


def check_expression_vs_poly(ctx: DunklContext, rng: random.Random, count: int = 20, points: int = 5) -> CheckResult:
    """Expression-engine Dunkl-Laplacian equals the polynomial one at rational points."""
    if not ctx.root_system.is_rational:
        return _skip("expression_vs_poly", "roots not rational")
    bad = cases = 0
    N = ctx.nvars
    for _ in range(count):
        p = random_poly(rng, N, 4)
        exact = dunkl_laplacian_sum(ctx, p)
        e = cc.ambient_dunkl_laplacian_expr(ctx, cc.from_multipoly(p))
        for _ in range(points):
            X = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(N))
            cases += 1
            try:
                bad += cc.evaluate(e, X) != exact.evaluate(X)
            except cc.DomainError:
                cases -= 1
    return _exact("expression_vs_poly", bad, cases)


# -- geometry ---------------------------------------------------------------------

def check_geometry(system: RootSystem, rng: random.Random, points: int = 20, tol: float | None = None) -> list[CheckResult]:
    tol = TOLERANCES["geometry"] if tol is None else tol
    out = []
    viol = root_system_violations(system.roots)
    out.append(_exact("root_axioms", len(viol), len(system.roots), "; ".join(viol[:3])))

    bad = 0
    for a in system.positive_roots:
        basis = hyperplane_basis(a)
        bad += any(pair(a.vector, v) != 0 for v in basis)
        bad += _rank(basis) != system.n + 1
    out.append(_exact("hyperplane_basis", bad, len(system.positive_roots)))

    worst_inv = worst_lift = 0.0
    cases = 0
    for _ in range(points):
        x = tuple(rng.uniform(-1.5, 1.5) for _ in range(system.n))
        for a in system.positive_roots:
            try:
                y = chart_reflection(a, x)
                z = chart_reflection(a, y)
                lifted = lifted_chart_reflection(a, x)
            except ValueError:
                continue
            cases += 1
            worst_inv = max(worst_inv, max(rel_err(zi, xi) for xi, zi in zip(x, z)))
            worst_lift = max(worst_lift, max(rel_err(li, yi) for yi, li in zip(y, lifted)))
    out.append(_numeric("chart_involution", worst_inv, tol, cases))
    out.append(_numeric("lifted_reflection", worst_lift, tol, cases))
    return out


def _rank(vectors) -> int:
    """Rank by exact Gaussian elimination (floats for irrational entries)."""
    rows = [[_num(c) for c in v] for v in vectors]
    exact = all(isinstance(c, Fraction) for r in rows for c in r)
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = max(range(rank, len(rows)), key=lambda i: abs(rows[i][col]))
        if (rows[piv][col] == 0) if exact else abs(rows[piv][col]) < 1e-12:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(rank + 1, len(rows)):
            f = rows[i][col] / rows[rank][col]
            rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def _num(c):
    return c if isinstance(c, Fraction) else (Fraction(c) if isinstance(c, int) else float(c))


def check_group_order(system: RootSystem, expected: int | None = None, cap: int = 10**6) -> CheckResult:
    G = generate_group(system, cap)
    detail = f"order {G.order}"
    if expected is None:
        return _exact("group_order", 0, 1, detail)
    return _exact("group_order", int(G.order != expected), 1, detail + f", expected {expected}")


# -- expression engine ---------------------------------------------------------------

def check_derivatives(rng: random.Random, count: int = 500, nvars: int = 3, tol: float | None = None) -> CheckResult:
    tol = TOLERANCES["derivatives"] if tol is None else tol
    worst = 0.0
    h = FD_STEP
    for _ in range(count):
        e = random_expression(rng, nvars, rng.randint(2, 4))
        x = [rng.uniform(-1, 1) for _ in range(nvars)]
        i = rng.randrange(nvars)
        sym = cc.evaluate(cc.derivative(e, i), x)
        xp, xm = list(x), list(x)
        xp[i] += h
        xm[i] -= h
        fd = (cc.evaluate(e, xp) - cc.evaluate(e, xm)) / (2 * h)
        worst = max(worst, rel_err(fd, sym))
    return _numeric("derivatives", worst, tol, count)


def check_homogeneity(ctx: DunklContext, rng: random.Random, points: int = 10, tol: float | None = None) -> CheckResult:
    """The ambient lift has degree w and the ambient operator lowers it by 2."""
    tol = TOLERANCES["homogeneity"] if tol is None else tol
    n = ctx.n
    w = Fraction(rng.randint(-7, 3), 2)
    d = Density(random_test_function(rng, n), w, n)
    e = cc.density_to_ambient(d)
    le = cc.ambient_dunkl_laplacian_expr(ctx, e)
    worst, cases = 0.0, 0
    while cases < points:
        x = sample_regular_points(ctx, 1, rng)[0]
        X = tuple(c * (1 + 0.1 * rng.uniform(-1, 1)) for c in null_lift(x))  # off the cone
        lam = rng.uniform(0.5, 2.0)
        Y = tuple(lam * c for c in X)
        try:
            worst = max(worst, rel_err(cc.evaluate(e, Y), lam**w * cc.evaluate(e, X)))
            worst = max(worst, rel_err(cc.evaluate(le, Y), lam ** (w - 2) * cc.evaluate(le, X)))
        except cc.DomainError:
            continue
        cases += 1
    return _numeric("homogeneity", worst, tol, cases)


# -- conformal operator suites -------------------------------------------------------

def _scaled_perturbation(spec, d, g_expr, pts) -> Density:
    """Scale g so its size is comparable to the operator values at the sample points."""
    ref = max(abs(ambient_route(spec, d, x)) for x in pts)
    gmax = max(abs(cc.evaluate(g_expr, x)) for x in pts) or 1.0
    return Density(cc.mul(cc.const(max(ref, 1.0) / gmax), g_expr), spec.w - 2, spec.n)


def check_extension_independence(
    ctx: DunklContext,
    rng: random.Random,
    j: int = 1,
    points: int = 100,
    perturbations: int = 5,
    tol: float | None = None,
    power_tol: float | None = None,
) -> list[CheckResult]:
    tol = TOLERANCES["extension_independence"] if tol is None else tol
    power_tol = TOLERANCES["extension_power"] if power_tol is None else power_tol
    spec = ConformalOperatorSpec(ctx, j)
    n = ctx.n
    pts = sample_regular_points(ctx, points, rng, depth=j)
    d = Density(random_test_function(rng, n), spec.w, n)
    worst = 0.0
    for _ in range(perturbations):
        g = Density(random_test_function(rng, n), spec.w - 2, n)
        worst = max(worst, extension_independence_residual(spec, d, g, pts))
    zero = extension_independence_residual(spec, d, Density(cc.const(0), spec.w - 2, n), pts[:5])
    out = [_numeric(f"extension_independence_j{j}", max(worst, zero), tol, points * perturbations)]

    # Half a step off the critical weight the dependence on g must show.  Route
    # values carry J^w factors and can be large, so g is scaled to match them.
    off = spec.with_weight(spec.w + Fraction(1, 2))
    d_off = Density(d.f, off.w, n)
    g_off = _scaled_perturbation(off, d_off, random_test_function(rng, n), pts)
    r_off = extension_independence_residual(off, d_off, g_off, pts)
    out.append(
        CheckResult(f"extension_power_j{j}", r_off > power_tol, r_off, power_tol, points, "must exceed tolerance")
    )
    return out


def _functions(rng: random.Random, n: int) -> list[cc.Expr]:
    return [cc.const(1), random_test_function(rng, n), random_test_function(rng, n)]


def check_route_agreement(ctx: DunklContext, rng: random.Random, points: int = 200, tol: float | None = None) -> CheckResult:
    tol = TOLERANCES["route_agreement"] if tol is None else tol
    spec = ConformalOperatorSpec(ctx, 1)
    pts = sample_regular_points(ctx, points, rng)
    worst = 0.0
    fs = _functions(rng, ctx.n)
    for i, x in enumerate(pts):
        d = Density(fs[i % len(fs)], spec.w, ctx.n)
        worst = max(worst, cross_validate(spec, d, [x]))
    return _numeric("route_agreement", worst, tol, points)


def _laplacian_expr(f: cc.Expr, n: int) -> cc.Expr:
    return cc.add(*[cc.derivative(cc.derivative(f, i), i) for i in range(n)])


def check_k0_reduction(system: RootSystem, rng: random.Random, points: int = 50, tol: float | None = None) -> CheckResult:
    tol = TOLERANCES["k0_reduction"] if tol is None else tol
    ctx = DunklContext(system, MultiplicityFunction.constant(system, 0))
    spec = ConformalOperatorSpec(ctx, 1)
    n = system.n
    f = random_test_function(rng, n)
    lap = _laplacian_expr(f, n)
    d = Density(f, spec.w, n)
    worst = 0.0
    for _ in range(points):
        x = tuple(rng.uniform(-1.5, 1.5) for _ in range(n))
        worst = max(worst, rel_err(chart_operator(spec, d, x), cc.evaluate(lap, x)))
    return _numeric("k0_reduction", worst, tol, points)


def check_classical_reduction(ctx: DunklContext, rng: random.Random, points: int = 200, tol: float | None = None) -> CheckResult:
    tol = TOLERANCES["classical_reduction"] if tol is None else tol
    R = ctx.root_system
    if any(a.alpha0 != 0 for a in R.positive_roots):
        return _skip("classical_reduction", "system has non-Euclidean roots")
    spec = ConformalOperatorSpec(ctx, 1)
    roots = [a.euclidean for a in R.positive_roots]
    ks = [ctx.multiplicity(a) for a in R.positive_roots]
    pts = sample_regular_points(ctx, points, rng)
    fs = _functions(rng, ctx.n)[1:]
    worst = 0.0
    for i, x in enumerate(pts):
        f = fs[i % len(fs)]
        a = chart_operator(spec, Density(f, spec.w, ctx.n), x)
        b = classical_dunkl_chart(roots, ks, f, x)
        worst = max(worst, rel_err(a, b))
    return _numeric("classical_reduction", worst, tol, points)


def check_bilaplacian(system: RootSystem, rng: random.Random, points: int = 50, tol: float | None = None) -> CheckResult:
    tol = TOLERANCES["bilaplacian"] if tol is None else tol
    ctx = DunklContext(system, MultiplicityFunction.constant(system, 0))
    spec = ConformalOperatorSpec(ctx, 2)
    n = system.n
    worst = 0.0
    fs = [random_test_function(rng, n), cc.variables(n)[0] ** 4]
    for i in range(points):
        f = fs[i % len(fs)]
        x = tuple(rng.uniform(-1.5, 1.5) for _ in range(n))
        oracle = cc.evaluate(_laplacian_expr(_laplacian_expr(f, n), n), x)
        worst = max(worst, rel_err(higher_power(spec, Density(f, spec.w, n), x), oracle))
    return _numeric("bilaplacian", worst, tol, points)


def check_chart_equivariance(ctx: DunklContext, rng: random.Random, j: int = 1, points: int = 10, tol: float | None = None) -> CheckResult:
    tol = TOLERANCES["chart_equivariance"] if tol is None else tol
    spec = ConformalOperatorSpec(ctx, j)
    n = ctx.n
    d = Density(random_test_function(rng, n), spec.w, n)
    worst, cases = 0.0, 0
    roots = ctx.root_system.positive_roots
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        for x in sample_regular_points(ctx, points, rng, depth=j + 1):
            for a in roots:
                y = chart_reflection(a, x)
                if not is_regular(ctx, y, depth=j):
                    continue
                cases += 1
                worst = max(worst, chart_equivariance_residual(spec, d, a, x))
    return _numeric(f"chart_equivariance_j{j}", worst, tol, cases)


def check_symbol(ctx: DunklContext, rng: random.Random, points: int = 3, tol: float | None = None) -> CheckResult:
    tol = TOLERANCES["symbol"] if tol is None else tol
    spec = ConformalOperatorSpec(ctx, 1)
    worst = 0.0
    for x in sample_regular_points(ctx, points, rng):
        A = principal_symbol(spec, x)
        n = len(A)
        worst = max(worst, max(abs(A[i][j] - (1.0 if i == j else 0.0)) for i in range(n) for j in range(n)))
    return _numeric("symbol", worst, tol, points)


# -- driver -------------------------------------------------------------------------

@dataclass
class SuiteSizes:
    degree: int = 4
    polys: int = 20
    pairs: int = 10
    points: int = 20
    perturbations: int = 2
    derivatives: int = 100
    max_power: int = 2


REQUIRED_CHECKS = (
    "sl2",
    "commutativity",
    "two_laplacians",
    "equivariance",
    "expression_vs_poly",
    "root_axioms",
    "hyperplane_basis",
    "chart_involution",
    "lifted_reflection",
    "group_order",
    "derivatives",
    "homogeneity",
    "extension_independence_j1",
    "extension_power_j1",
    "route_agreement",
    "k0_reduction",
    "classical_reduction",
    "bilaplacian",
    "chart_equivariance_j1",
    "symbol",
)


def run_all(
    ctx: DunklContext,
    seed: int = 0,
    sizes: SuiteSizes | None = None,
    tolerances: dict | None = None,
    group_cap: int = 10**6,
    progress: Callable[[CheckResult], None] | None = None,
) -> list[CheckResult]:
    """Every invariant suite on one configuration."""
    sizes = sizes or SuiteSizes()
    tol = dict(TOLERANCES)
    tol.update(tolerances or {})
    rng = random.Random(seed)
    R = ctx.root_system
    results: list[CheckResult] = []

    def emit(r):
        results.append(r)
        if progress:
            progress(r)

    emit(check_sl2(ctx, sizes.degree))
    emit(check_commutativity(ctx, rng, sizes.pairs, sizes.degree))
    emit(check_two_laplacians(ctx, rng, sizes.polys, sizes.degree))
    emit(check_equivariance(ctx, rng, sizes.polys, sizes.degree))
    emit(check_expression_vs_poly(ctx, rng, max(1, sizes.polys // 4)))
    for r in check_geometry(R, rng, sizes.points, tol["geometry"]):
        emit(r)
    emit(check_group_order(R, cap=group_cap))
    emit(check_derivatives(rng, sizes.derivatives, tol=tol["derivatives"]))
    emit(check_homogeneity(ctx, rng, sizes.points, tol["homogeneity"]))
    for j in range(1, sizes.max_power + 1):
        for r in check_extension_independence(
            ctx, rng, j, sizes.points, sizes.perturbations, tol["extension_independence"], tol["extension_power"]
        ):
            emit(r)
    emit(check_route_agreement(ctx, rng, sizes.points, tol["route_agreement"]))
    emit(check_k0_reduction(R, rng, sizes.points, tol["k0_reduction"]))
    emit(check_classical_reduction(ctx, rng, sizes.points, tol["classical_reduction"]))
    emit(check_bilaplacian(R, rng, sizes.points, tol["bilaplacian"]))
    emit(check_chart_equivariance(ctx, rng, 1, max(2, sizes.points // 4), tol["chart_equivariance"]))
    emit(check_symbol(ctx, rng, 2, tol["symbol"]))
    return results
