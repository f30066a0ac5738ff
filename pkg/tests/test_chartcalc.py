import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ambient_dunkl import chartcalc as cc
from ambient_dunkl.ambient import null_lift
from ambient_dunkl.dunkl import DunklContext, dunkl_laplacian_sum
from ambient_dunkl.rootsys import MultiplicityFunction, builtin_system
from ambient_dunkl.verify import random_expression, random_poly

x = cc.variables(4)


def test_hash_consing_shares_nodes():
    a = cc.exp(x[0] * x[1]) + 1
    b = cc.exp(x[0] * x[1]) + 1
    assert a is b
    assert cc.derivative(a, 0) is cc.derivative(b, 0)


def test_simplifications():
    assert cc.add(x[0], cc.const(0)) is x[0]
    assert cc.mul(x[0], cc.const(1)) is x[0]
    assert cc.mul(x[0], cc.const(0)).data == 0
    assert (x[0] ** 0).data == 1
    assert cc.compose(x[1], ((0, 1), (1, 0))) is x[0]


def test_rules():
    f = x[0] ** 3 * cc.sin(x[1]) / (1 + x[0] ** 2)
    p = (0.7, -0.4)
    d0 = cc.evaluate(cc.derivative(f, 0), p)
    a, s = p[0], math.sin(p[1])
    expected = s * (3 * a**2 * (1 + a**2) - a**3 * 2 * a) / (1 + a**2) ** 2
    assert abs(d0 - expected) < 1e-14
    assert cc.derivative(cc.log(x[0]), 0) is not None
    assert cc.evaluate(cc.derivative(cc.rpow(x[0], Fraction(1, 2)), 0), (4.0,)) == 0.25


def test_exact_evaluation():
    e = (x[0] + 1) ** 2 / (x[1] - 3)
    assert cc.evaluate(e, (Fraction(1), Fraction(1))) == Fraction(-2)


def test_domain_errors():
    with pytest.raises(cc.DomainError):
        cc.evaluate(1 / x[0], (0,))
    with pytest.raises(cc.DomainError):
        cc.evaluate(cc.rpow(x[0], Fraction(1, 3)), (-1.0,))
    with pytest.raises(cc.DomainError):
        cc.evaluate(cc.log(x[0]), (0.0,))


def test_compose_chain_rule_and_merge():
    M = ((1, 2), (3, 4))
    N = ((0, 1), (1, 0))
    f = cc.exp(x[0]) * x[1] ** 2
    g = cc.compose(cc.compose(f, M), N)
    assert g.kind == "compose"
    p = (0.3, -0.2)
    MN = ((2, 1), (4, 3))  # M @ N
    assert abs(cc.evaluate(g, p) - cc.evaluate(cc.compose(f, MN), p)) < 1e-15
    h = 1e-6
    for i in range(2):
        q1, q2 = list(p), list(p)
        q1[i] += h
        q2[i] -= h
        fd = (cc.evaluate(g, q1) - cc.evaluate(g, q2)) / (2 * h)
        assert abs(cc.evaluate(cc.derivative(g, i), p) - fd) < 1e-7


@given(st.integers(0, 10**6))
@settings(max_examples=100, deadline=None)
def test_derivative_vs_finite_difference(seed):
    rng = random.Random(seed)
    e = random_expression(rng, 3, 3)
    p = [rng.uniform(-1, 1) for _ in range(3)]
    i = rng.randrange(3)
    h = 1e-5
    q1, q2 = list(p), list(p)
    q1[i] += h
    q2[i] -= h
    fd = (cc.evaluate(e, q1) - cc.evaluate(e, q2)) / (2 * h)
    sym = cc.evaluate(cc.derivative(e, i), p)
    assert abs(fd - sym) <= 1e-6 * max(1.0, abs(sym))


def test_substitute_and_parse():
    e = cc.parse_expr("x1^2 + exp(x2)/(1 + x1**2) - 0.5", 2)
    s = cc.substitute(e, [x[1], x[0]])
    assert abs(cc.evaluate(s, (2.0, 1.0)) - cc.evaluate(e, (1.0, 2.0))) < 1e-15
    with pytest.raises(ValueError):
        cc.parse_expr("x3 + 1", 2)
    with pytest.raises(ValueError):
        cc.parse_expr("__import__('os')", 2)


def test_density_examples():
    assert cc.density_to_ambient(cc.Density(cc.const(1), 0, 2)).data == 1
    e = cc.density_to_ambient(cc.Density(x[0], 1, 2))
    assert cc.evaluate(e, (Fraction(2), Fraction(3), Fraction(5), Fraction(7))) == 3
    f = cc.density_to_ambient(cc.Density(x[0] ** 2, Fraction(-1, 2), 2))
    rng = random.Random(1)
    for _ in range(10):
        X = [rng.uniform(0.1, 2)] + [rng.uniform(-2, 2) for _ in range(3)]
        ratio = cc.evaluate(f, [2 * c for c in X]) / cc.evaluate(f, X)
        assert abs(ratio - 2**-0.5) < 1e-12
    with pytest.raises(cc.DomainError):
        cc.evaluate(f, (-1.0, 1.0, 1.0, 1.0))


def test_perturbation_invisible_on_cone():
    d = cc.Density(cc.exp(x[0]) + x[1], Fraction(-1, 2), 2)
    g = cc.Density(cc.cos(x[1]), Fraction(-5, 2), 2)
    e = cc.density_to_ambient(d)
    pe = cc.perturb_extension(e, g)
    r1, r2 = cc.restrict_to_cone(e, 2), cc.restrict_to_cone(pe, 2)
    for p in [(0.3, -1.2), (1.5, 0.2)]:
        assert abs(r1(p) - r2(p)) < 1e-14
        assert abs(r1(p) - cc.evaluate(d.f, p)) < 1e-14
    as_expr = r2.as_expr()
    assert abs(cc.evaluate(as_expr, (0.3, -1.2)) - r2((0.3, -1.2))) < 1e-14


def _ctx(name, n, k):
    R = builtin_system(name, n)
    return DunklContext(R, MultiplicityFunction(R, (k,) * len(R.orbits)))


def test_ambient_laplacian_flat_examples():
    ctx = _ctx("B2_euclidean", 2, 0)
    X = cc.variables(4)
    assert cc.evaluate(cc.ambient_dunkl_laplacian_expr(ctx, X[1] * X[2]), (1, 2, 3, 4)) == 0
    assert cc.evaluate(cc.ambient_dunkl_laplacian_expr(ctx, 2 * X[0] * X[3]), (1, 2, 3, 4)) == 4


@pytest.mark.parametrize("name", ["A1", "B2_euclidean", "B3_embedded"])
def test_ambient_laplacian_matches_polynomial_engine(name):
    ctx = _ctx(name, 2, Fraction(1, 2))
    rng = random.Random(5)
    for _ in range(5):
        p = random_poly(rng, 4, 4)
        exact = dunkl_laplacian_sum(ctx, p)
        e = cc.ambient_dunkl_laplacian_expr(ctx, cc.from_multipoly(p))
        checked = 0
        while checked < 20:
            X = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(4))
            try:
                v = cc.evaluate(e, X)
            except cc.DomainError:
                continue
            assert v == exact.evaluate(X)
            checked += 1


def test_ambient_laplacian_reports_root():
    ctx = _ctx("A1", 2, 1)
    e = cc.ambient_dunkl_laplacian_expr(ctx, cc.variables(4)[1] ** 3 + cc.variables(4)[2])
    with pytest.raises(cc.DomainError) as info:
        cc.evaluate(e, (1.0, 0.0, 0.5, 0.0))
    assert "(0, 1, 0, 0)" in str(info.value)


def test_ambient_laplacian_lowers_homogeneity():
    ctx = _ctx("B3_embedded", 2, Fraction(1, 2))
    w = Fraction(-3, 2)
    e = cc.density_to_ambient(cc.Density(cc.exp(x[0] / 3) + x[1] ** 2, w, 2))
    le = cc.ambient_dunkl_laplacian_expr(ctx, e)
    X = null_lift((0.3, 0.7))
    X = tuple(c * 1.05 for c in X[:-1]) + (X[-1] * 0.9,)
    lam = 1.7
    a = cc.evaluate(le, [lam * c for c in X])
    b = lam ** float(w - 2) * cc.evaluate(le, X)
    assert abs(a - b) <= 1e-10 * max(1, abs(b))


def test_size_cap():
    ctx = _ctx("B3_embedded", 2, 1)
    with pytest.raises(cc.ExpressionTooLarge):
        cc.ambient_dunkl_laplacian_expr(ctx, cc.exp(cc.variables(4)[1]), size_cap=10)
