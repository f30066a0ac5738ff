from fractions import Fraction

import pytest

from ambient_dunkl.dunkl import (
    DunklContext,
    ambient_square,
    commutativity_check,
    dunkl,
    dunkl_laplacian_direct,
    dunkl_laplacian_sum,
    equivariance_check,
    sl2_commutators,
    sl2_E,
    sl2_H,
)
from ambient_dunkl.polyalg import MultiPoly, monomials
from ambient_dunkl.rootsys import MultiplicityFunction, builtin_system, generate_group


def ctx_for(name, n, *k):
    R = builtin_system(name, n)
    vals = tuple(k[i % len(k)] for i in range(len(R.orbits)))
    return DunklContext(R, MultiplicityFunction(R, vals))


def X(i, N=4):
    return MultiPoly.variable(N, i)


def test_k_zero_is_directional_derivative():
    ctx = ctx_for("B3_embedded", 2, 0)
    p = X(1) ** 3 * X(0) + X(2) * X(3)
    xi = (1, 2, -1, 3)
    assert dunkl(ctx, xi, p) == p.directional(xi)


def test_rank_one_examples():
    c = Fraction(2, 3)
    ctx = ctx_for("A1", 2, c)
    e1 = (0, 1, 0, 0)
    assert dunkl(ctx, e1, X(1) ** 2) == X(1).scale(2)
    assert dunkl(ctx, e1, X(1)) == MultiPoly.constant(4, 1 + 2 * c)


def test_flat_laplacian_example():
    ctx = ctx_for("B2_euclidean", 2, 0)
    p = X(1) ** 2 + (X(0) * X(3)).scale(2)
    assert dunkl_laplacian_direct(ctx, p) == MultiPoly.constant(4, 6)
    assert dunkl_laplacian_sum(ctx, p) == MultiPoly.constant(4, 6)
    assert dunkl_laplacian_direct(ctx, MultiPoly.constant(4, 1)).is_zero()


@pytest.mark.parametrize("name,k", [("A1", (Fraction(1, 3),)), ("B2_euclidean", (Fraction(1, 3), 2)), ("B3_embedded", (1, Fraction(1, 2)))])
def test_two_laplacians_agree(name, k):
    ctx = ctx_for(name, 2, *k)
    for m in monomials(4, 4):
        assert dunkl_laplacian_sum(ctx, m) == dunkl_laplacian_direct(ctx, m)


def test_laplacian_lowers_degree():
    ctx = ctx_for("B3_embedded", 2, Fraction(1, 2), 1)
    p = X(0) ** 2 * X(1) * X(2) ** 2
    out = dunkl_laplacian_direct(ctx, p)
    assert out.is_homogeneous() and out.degree == 3


def test_sl2_report_signs():
    rep = sl2_commutators(ctx_for("B2_euclidean", 2, Fraction(1, 3)), 4)
    assert rep.ok
    assert "[H,E] = 2E" in rep.verified and "[H,F] = -2F" in rep.verified
    assert "[H,E] = -2E" not in rep.verified and "[H,F] = 2F" not in rep.verified


def test_sl2_k_zero_gamma_zero():
    ctx = ctx_for("B3_embedded", 2, 0)
    assert ctx.gamma_k == 0
    assert sl2_H(ctx, MultiPoly.constant(4, 1)) == MultiPoly.constant(4, 2)
    assert sl2_commutators(ctx, 3).ok


def test_E_commutes_with_itself():
    p = X(1) * X(2) + X(0)
    assert sl2_E(sl2_E(p)) - sl2_E(sl2_E(p)) == MultiPoly.zero(4)
    assert sl2_E(MultiPoly.constant(4, -4)) == ambient_square(4)


def test_commutativity_and_equivariance():
    ctx = ctx_for("B3_embedded", 2, Fraction(1, 2), 2)
    p = X(0) ** 2 * X(1) + X(2) ** 3 - X(3) * X(1)
    assert commutativity_check(ctx, (1, 0, 2, 0), (0, 1, -1, 3), p).is_zero()
    for g in ctx.root_system.reflections():
        assert equivariance_check(ctx, g, p).is_zero()


def test_equivariance_under_whole_group():
    ctx = ctx_for("B2_euclidean", 2, Fraction(1, 2), 1)
    p = X(1) ** 3 * X(2) + X(0) * X(3) * X(1)
    for g in generate_group(ctx.root_system):
        assert equivariance_check(ctx, g, p).is_zero()


def test_irrational_system_refuses_exact_ops():
    ctx = ctx_for("B(2)", 2, 1)
    with pytest.raises(ValueError):
        dunkl_laplacian_sum(ctx, X(1))
