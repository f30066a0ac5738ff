from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ambient_dunkl.polyalg import MultiPoly, NotDivisibleError, monomials

N = 3
coef = st.fractions(min_value=-5, max_value=5, max_denominator=4)
exps = st.tuples(*[st.integers(0, 3)] * N)
polys = st.dictionaries(exps, coef, max_size=5).map(lambda d: MultiPoly(N, d))
points = st.tuples(*[st.fractions(min_value=-3, max_value=3, max_denominator=5)] * N)
linears = st.tuples(*[st.integers(-3, 3)] * N).filter(any)


def X(i):
    return MultiPoly.variable(N, i)


@given(polys, polys, polys)
@settings(max_examples=60, deadline=None)
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == MultiPoly.zero(N)


@given(polys, polys, points)
@settings(max_examples=60, deadline=None)
def test_evaluation_is_a_homomorphism(p, q, x):
    assert (p * q).evaluate(x) == p.evaluate(x) * q.evaluate(x)
    assert (p + q).evaluate(x) == p.evaluate(x) + q.evaluate(x)


@given(polys, polys, st.integers(0, N - 1))
@settings(max_examples=60, deadline=None)
def test_leibniz(p, q, i):
    assert (p * q).partial(i) == p.partial(i) * q + p * q.partial(i)


@given(polys, linears)
@settings(max_examples=60, deadline=None)
def test_divide_after_multiply(p, ell):
    L = MultiPoly.linear(ell)
    assert (p * L).divide_by_linear(ell) == p


@given(polys, points)
@settings(max_examples=40, deadline=None)
def test_compose_linear_matches_evaluation(p, x):
    M = ((1, 2, 0), (0, Fraction(1, 2), -1), (3, 0, 1))
    Mx = tuple(sum(M[a][b] * x[b] for b in range(N)) for a in range(N))
    assert p.compose_linear(M).evaluate(x) == p.evaluate(Mx)


def test_difference_of_squares():
    p = X(1) ** 2 - X(2) ** 2
    assert p.divide_by_linear((0, 1, -1)) == X(1) + X(2)


def test_reflection_difference_quotient():
    f = X(1) ** 3
    reflected = f.compose_linear(((1, 0, 0), (0, -1, 0), (0, 0, 1)))
    assert (f - reflected).divide_by_linear((0, 1, 0)) == X(1) ** 2 * 2


def test_not_divisible_reports_remainder():
    with pytest.raises(NotDivisibleError) as info:
        X(1).divide_by_linear((0, 0, 1))
    assert info.value.remainder == X(1)


@pytest.mark.parametrize("p,factor", [
    (MultiPoly.variable(4, 0) * MultiPoly.variable(4, 3), 2),
    (MultiPoly.constant(4, 1), 0),
    (MultiPoly.monomial((0, 3, 1, 0)), 4),
])
def test_euler(p, factor):
    assert p.euler() == p.scale(factor)


def test_monomial_count():
    # C(deg + nvars, nvars) monomials of degree <= deg
    assert len(list(monomials(4, 6))) == 210
    assert all(m.is_homogeneous() for m in monomials(3, 3))


def test_floats_rejected():
    with pytest.raises(TypeError):
        MultiPoly(2, {(1, 0): 0.5})
