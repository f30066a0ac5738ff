from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ambient_dunkl.ambient import (
    AmbientVector,
    BilinearForm,
    ChartDomainError,
    DimensionError,
    chart_jacobian,
    from_cone_coords,
    from_tilde,
    null_lift,
    pair,
    pair_tilde,
    to_cone_coords,
    to_tilde,
)
from ambient_dunkl.scalars import QSqrt2, ScalarModeError, check_mode, format_scalar, parse_scalar

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def test_qsqrt2_arithmetic():
    r2 = QSqrt2.sqrt2()
    assert r2 * r2 == 2
    assert (1 + r2) * (1 - r2) == -1
    assert 1 / (1 + r2) == r2 - 1
    assert QSqrt2(Fraction(1, 2), 0).simplify() == Fraction(1, 2)
    assert hash(QSqrt2(3)) == hash(Fraction(3))
    assert QSqrt2(0, 1) > Fraction(14, 10) and QSqrt2(0, 1) < Fraction(15, 10)
    assert (r2 - Fraction(140, 99)).sign() == 1  # 140/99 < sqrt 2 < 99/70
    assert (r2 - Fraction(99, 70)).sign() == -1


@pytest.mark.parametrize("text,value", [
    ("3", Fraction(3)), ("-1/2", Fraction(-1, 2)), ("0.25", Fraction(1, 4)),
    ("sqrt2", QSqrt2(0, 1)), ("1/2*sqrt2", QSqrt2(0, Fraction(1, 2))), ("1+1/2*sqrt2", QSqrt2(1, Fraction(1, 2))),
])
def test_parse_and_format_round_trip(text, value):
    v = parse_scalar(text)
    assert v == value
    assert parse_scalar(format_scalar(v)) == v


def test_mode_mixing_rejected():
    assert check_mode([Fraction(1), 2]) is True
    assert check_mode([1.0, 2.5]) is False
    with pytest.raises(ScalarModeError):
        check_mode([Fraction(1), 0.5])
    with pytest.raises(ScalarModeError):
        pair((1, 0.5, 0), (Fraction(1), 0, 0))


def test_form_examples():
    form = BilinearForm(2)
    assert form.signature() == (3, 1)
    assert form.pair((1, 0, 0, 0), (0, 0, 0, 1)) == 1
    assert pair(null_lift((Fraction(1, 3), Fraction(-2))), null_lift((Fraction(1, 3), Fraction(-2)))) == 0
    with pytest.raises(DimensionError):
        pair((1, 2, 3), (1, 2, 3, 4))
    with pytest.raises(ValueError):
        BilinearForm(0)


@given(st.lists(fractions, min_size=1, max_size=4), fractions.filter(lambda t: t != 0))
def test_null_lift_is_null(x, t):
    assert pair(null_lift(x, t), null_lift(x, t)) == 0


@given(st.lists(fractions, min_size=3, max_size=6).filter(lambda v: v[0] != 0))
def test_cone_coordinates_round_trip(X):
    p = to_cone_coords(X)
    assert from_cone_coords(p) == tuple(X)
    # rho measures the distance from the cone: <X,X> = 2 t^2 rho
    assert pair(X, X) == 2 * p.t**2 * p.rho


def test_cone_coords_domain():
    with pytest.raises(ChartDomainError):
        to_cone_coords((0, 1, 2))


def test_chart_jacobian_matches_finite_differences():
    X = (1.3, 0.4, -0.7, 0.2)
    p = to_cone_coords(X)
    Jm = chart_jacobian(p)
    h = 1e-6
    for a in range(len(X)):
        Xp = list(X)
        Xp[a] += h
        q = to_cone_coords(Xp)
        coords_p = (q.t,) + q.x + (q.rho,)
        coords = (p.t,) + p.x + (p.rho,)
        for b in range(len(X)):
            assert abs((coords_p[b] - coords[b]) / h - Jm[a][b]) < 1e-5


def test_tilde_basis_diagonalizes():
    u, v = (1.0, 2.0, -1.0, 0.5), (0.3, -1.0, 2.0, 4.0)
    assert abs(pair_tilde(to_tilde(u), to_tilde(v)) - pair(u, v)) < 1e-12
    assert all(abs(a - b) < 1e-12 for a, b in zip(from_tilde(to_tilde(u)), u))
    g = BilinearForm(2, "tilde").gram()
    assert [g[i][i] for i in range(4)] == [1.0, 1.0, 1.0, -1.0]


def test_ambient_vector():
    v = AmbientVector((1, 2, 3))
    assert (v + v).coords == (2, 4, 6)
    assert (2 * v - v).coords == v.coords
    with pytest.raises(DimensionError):
        AmbientVector((1, 2))
