"""The conformal Dunkl-Laplace operator on the chart x -> (1, x, -|x|^2/2).

Route A is the closed chart formula (first power only).  Route B extends a
density homogeneously to the ambient space, applies the ambient
Dunkl-Laplacian j times and restricts back to the cone.
"""
from __future__ import annotations

import random
import warnings
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import chartcalc as cc
from .ambient import null_lift
from .chartcalc import Density, Expr
from .dunkl import DunklContext
from .rootsys import Root, chart_reflection, conformal_factor, reflect, wall_value

MARGIN = 0.1


class ChartSingularityError(ArithmeticError):
    """The operator is undefined at the requested chart point."""

    def __init__(self, root: Root, x: Sequence, what: str):
        self.root = root
        self.x = tuple(x)
        self.what = what
        pt = ", ".join(f"{float(c):.6g}" for c in self.x)
        super().__init__(f"{what} for root {root} at x = ({pt})")


class ConditioningWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class ConformalOperatorSpec:
    ctx: DunklContext
    j: int = 1
    w: object = None
    critical: bool = field(init=False)

    def __post_init__(self):
        if not isinstance(self.j, int) or self.j < 1:
            raise ValueError("the power j must be a positive integer")
        crit = critical_weight(self.ctx, self.j)
        if self.w is None:
            object.__setattr__(self, "w", crit)
        object.__setattr__(self, "critical", self.w == crit)

    @property
    def n(self) -> int:
        return self.ctx.n

    @property
    def target_weight(self):
        return self.w - 2 * self.j

    def with_weight(self, w) -> "ConformalOperatorSpec":
        return ConformalOperatorSpec(self.ctx, self.j, w)


def critical_weight(ctx: DunklContext, j: int):
    return Fraction(-ctx.n, 2) + j - ctx.gamma_k


def _active_roots(ctx: DunklContext):
    for a in ctx.root_system.positive_roots:
        k = ctx.multiplicity(a)
        if k != 0:
            yield a, k


def _float_pt(x) -> tuple:
    return tuple(float(c) for c in x)


def _check_regular(ctx: DunklContext, x: Sequence, warn: bool = True) -> list:
    """(root, k, D, J) for every active root; raises at singular points."""
    data = []
    for a, k in _active_roots(ctx):
        D = wall_value(a, x)
        if D == 0:
            raise ChartSingularityError(a, x, "x lies on the reflecting subsphere (D = 0)")
        J = conformal_factor(a, x)
        if J == 0:
            raise ChartSingularityError(a, x, "the reflected point is at infinity (J = 0)")
        if J < 0:
            raise ChartSingularityError(a, x, "negative conformal factor (J < 0) outside the chart domain")
        if warn and (abs(D) < MARGIN or J < MARGIN):
            warnings.warn(
                f"root {a}: |D| = {abs(float(D)):.3g}, J = {float(J):.3g} below margin {MARGIN}",
                ConditioningWarning,
                stacklevel=3,
            )
        data.append((a, k, D, J))
    return data


def _fval(e: Expr, x):
    return cc.evaluate(e, x)


def chart_operator(spec: ConformalOperatorSpec, d: Density, x: Sequence, warn: bool = True):
    """Route A: the explicit chart formula (first power)."""
    if spec.j != 1:
        raise ValueError("the chart formula covers j = 1 only; use higher_power for j >= 2")
    n = spec.n
    if d.n != n:
        raise ValueError(f"density lives on an {d.n}-dimensional chart, operator on {n}")
    x = _float_pt(x)
    f = d.f
    grad = [cc.derivative(f, i) for i in range(n)]
    lap = sum(_fval(cc.derivative(g, i), x) for i, g in enumerate(grad))
    fx = _fval(f, x)
    gx = [_fval(g, x) for g in grad]
    euler = sum(xi * gi for xi, gi in zip(x, gx))
    w = float(spec.w)
    total = lap
    for a, k, D, J in _check_regular(spec.ctx, x, warn):
        a0 = float(a.alpha0)
        al = [float(c) for c in a.euclidean]
        half_norm = float(a.norm) / 2
        first = (a0 * (w * fx - euler) + sum(ai * g for ai, g in zip(al, gx))) / D
        fr = _fval(f, chart_reflection(a, x))
        second = half_norm * (fx - J**w * fr) / (D * D)
        total += 2 * float(k) * (first - second)
    return total


def classical_dunkl_chart(roots: Sequence, k: Sequence | Callable, f: Expr, x: Sequence):
    """Rational Dunkl-Laplacian on R^n for Euclidean roots.

    ``roots`` lists one vector per positive root; ``k`` holds matching values
    (or is a callable on the vector).
    """
    x = _float_pt(x)
    n = len(x)
    kk = (lambda i, r: k(r)) if callable(k) else (lambda i, r: k[i])
    grad = [cc.derivative(f, i) for i in range(n)]
    out = sum(_fval(cc.derivative(g, i), x) for i, g in enumerate(grad))
    fx = _fval(f, x)
    gx = [_fval(g, x) for g in grad]
    for idx, r in enumerate(roots):
        kv = float(kk(idx, r))
        if kv == 0:
            continue
        r = [float(c) for c in r]
        nr = sum(c * c for c in r)
        ax = sum(c * xi for c, xi in zip(r, x))
        if ax == 0:
            raise ZeroDivisionError(f"x lies on the hyperplane of {tuple(r)}")
        rx = [xi - 2 * ax / nr * c for xi, c in zip(x, r)]
        dirder = sum(c * g for c, g in zip(r, gx))
        out += 2 * kv * (dirder / ax - (nr / 2) * (fx - _fval(f, rx)) / (ax * ax))
    return out


# -- route B --------------------------------------------------------------------

_ROUTE_CACHE: "OrderedDict" = OrderedDict()


def ambient_expression(spec: ConformalOperatorSpec, d: Density, extension: Expr | None = None) -> Expr:
    """The ambient expression Lap_k^j applied to the homogeneous extension (or to ``extension``)."""
    key = (id(spec), id(d), id(extension))
    hit = _ROUTE_CACHE.get(key)
    if hit is not None and hit[0] is spec and hit[1] is d and hit[2] is extension:
        _ROUTE_CACHE.move_to_end(key)
        return hit[3]
    if d.n != spec.n:
        raise ValueError(f"density lives on an {d.n}-dimensional chart, operator on {spec.n}")
    if extension is None and d.w != spec.w:
        raise ValueError(f"density weight {d.w} differs from operator weight {spec.w}")
    e = cc.density_to_ambient(d) if extension is None else extension
    for _ in range(spec.j):
        e = cc.ambient_dunkl_laplacian_expr(spec.ctx, e)
    _ROUTE_CACHE[key] = (spec, d, extension, e)
    if len(_ROUTE_CACHE) > 64:
        _ROUTE_CACHE.popitem(last=False)
    return e


def ambient_route(spec: ConformalOperatorSpec, d: Density, x: Sequence, extension: Expr | None = None):
    """Route B: extend, apply the ambient operator j times, restrict to the cone."""
    e = ambient_expression(spec, d, extension)
    x = tuple(x)
    try:
        return cc.evaluate(e, null_lift(_float_pt(x)))
    except cc.DomainError as exc:
        raise ChartSingularityError(_root_from_label(spec, exc.label), x, str(exc)) from exc


def _root_from_label(spec, label: str):
    for a in spec.ctx.root_system.positive_roots:
        if label and f"root {a}" in label:
            return a
    return None


def higher_power(spec: ConformalOperatorSpec, d: Density, x: Sequence):
    """Power j >= 1 via the ambient route (no chart formula is used)."""
    return ambient_route(spec, d, x)


def rel_err(a, b) -> float:
    return abs(float(a) - float(b)) / max(abs(float(b)), 1.0)


def extension_independence_residual(
    spec: ConformalOperatorSpec, d: Density, g: Density, points: Iterable[Sequence]
) -> float:
    """Max relative change of route B when the extension is perturbed by <X,X> g."""
    if g.w != spec.w - 2:
        raise ValueError("the perturbation must have weight w - 2")
    base = cc.density_to_ambient(d)
    pert = cc.perturb_extension(base, g)
    worst = 0.0
    for x in points:
        v0 = ambient_route(spec, d, x, base)
        v1 = ambient_route(spec, d, x, pert)
        worst = max(worst, rel_err(v1, v0))
    return worst


def cross_validate(spec: ConformalOperatorSpec, d: Density, points: Iterable[Sequence]) -> float:
    """Max relative difference between route A and route B."""
    worst = 0.0
    for x in points:
        worst = max(worst, rel_err(chart_operator(spec, d, x), ambient_route(spec, d, x)))
    return worst


# -- sampling -------------------------------------------------------------------

def is_regular(ctx: DunklContext, x: Sequence, margin: float = MARGIN, depth: int = 1) -> bool:
    """Clear of every subsphere and every infinity image by ``margin``.

    ``depth`` also bounds the X0 component of points reflected up to that many times.
    """
    roots = [a for a, _ in _active_roots(ctx)]
    x = _float_pt(x)
    for a in roots:
        if abs(wall_value(a, x)) <= margin or conformal_factor(a, x) <= margin:
            return False
    frontier = [null_lift(x)]
    for _ in range(depth):
        nxt = []
        for X in frontier:
            for a in roots:
                Y = reflect(a, X)
                if Y[0] <= margin:
                    return False
                nxt.append(Y)
        frontier = nxt
    return True


def sample_regular_points(
    ctx: DunklContext,
    count: int,
    rng: random.Random,
    margin: float = MARGIN,
    box: float = 1.5,
    depth: int = 1,
    max_tries: int = 100_000,
) -> list:
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError(f"could not find {count} regular points with margin {margin}")
        x = tuple(rng.uniform(-box, box) for _ in range(ctx.n))
        if is_regular(ctx, x, margin, depth):
            out.append(x)
    return out


# -- invariants -----------------------------------------------------------------

def reflected_density(d: Density, root: Root) -> Density:
    """Pullback of a weight-w density by the conformal reflection: J^w f(r x)."""
    n = d.n
    xs = cc.variables(n)
    r = root if _rational(root) else root.as_float()
    a0, al, nrm = r.alpha0, r.euclidean, r.norm
    D = cc.add(
        cc.mul(cc.const(a0), cc.add(cc.const(1), cc.mul(cc.const(Fraction(-1, 2)), cc.add(*[v**2 for v in xs])))),
        *[cc.mul(cc.const(c), v) for c, v in zip(al, xs) if c != 0],
    )
    J = cc.add(cc.const(1), cc.mul(cc.const(-2 * a0 / nrm), D))
    image = [cc.div(cc.add(v, cc.mul(cc.const(-2 * c / nrm), D)), J, f"infinity image of {root}") for v, c in zip(xs, al)]
    return Density(cc.mul(cc.rpow(J, d.w, f"J < 0 for {root}"), cc.substitute(d.f, image)), d.w, n)


def _rational(root: Root) -> bool:
    return all(isinstance(c, Fraction) for c in root.vector)


def chart_equivariance_residual(spec: ConformalOperatorSpec, d: Density, root: Root, x: Sequence) -> float:
    """|L(R^* f)(x) - J^{w-2j}(x) (L f)(r x)| relative, for the reflection in ``root``."""
    op = chart_operator if spec.j == 1 else higher_power
    lhs = op(spec, reflected_density(d, root), x)
    J = float(conformal_factor(root, _float_pt(x)))
    rhs = J ** float(spec.target_weight) * op(spec, d, chart_reflection(root, _float_pt(x)))
    return rel_err(lhs, rhs)


def principal_symbol(spec: ConformalOperatorSpec, x: Sequence) -> list:
    """Second-order coefficient matrix of route A at x.

    Applies the operator to q(x') = (xi.(x'-x))^2/2 times a factor that is 1 at x
    and vanishes at every reflected image of x, so that lower-order and
    difference terms drop out and the value is a^{ij} xi_i xi_j.
    """
    n = spec.n
    x = _float_pt(x)
    xs = cc.variables(n)
    images = [chart_reflection(a, x) for a, _ in _active_roots(spec.ctx)]
    cutoff = cc.const(1)
    for y in images:
        dist2 = sum((xi - yi) ** 2 for xi, yi in zip(x, y))
        cutoff = cutoff * cc.add(*[(v - yi) ** 2 for v, yi in zip(xs, y)]) / dist2

    def quad(xi):
        lin = cc.add(*[cc.mul(cc.const(c), v - xc) for c, v, xc in zip(xi, xs, x) if c])
        return chart_operator(spec, Density(cc.mul(cc.const(Fraction(1, 2)), lin**2, cutoff), spec.w, n), x, warn=False)

    diag = [quad([1.0 if b == i else 0.0 for b in range(n)]) for i in range(n)]
    A = [[0.0] * n for _ in range(n)]
    for i in range(n):
        A[i][i] = diag[i]
        for j in range(i + 1, n):
            v = [0.0] * n
            v[i] = v[j] = 1.0
            A[i][j] = A[j][i] = (quad(v) - diag[i] - diag[j]) / 2
    return A
