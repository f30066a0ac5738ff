"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

Tolerances are pinned here rather than read from the library defaults so that
loosening a default cannot silently weaken acceptance.
"""
import random
import time
from fractions import Fraction

import pytest

from ambient_dunkl.dunkl import DunklContext, sl2_commutators
from ambient_dunkl.rootsys import build_B, builtin_system
from ambient_dunkl import verify as V

ACCEPTANCE_LINES = []

TOL_EXTENSION = 1e-9
TOL_EXTENSION_POWER = 1e-3
TOL_ROUTES = 1e-8
TOL_CLASSICAL = 1e-10
TOL_K0 = 1e-12
TOL_BILAPLACIAN = 1e-7
TOL_GEOMETRY = 1e-10
TOL_DERIVATIVES = 1e-6

SYSTEMS = ("A1", "B2_euclidean", "B3_embedded")
MULTIPLICITIES = ((0,), (Fraction(1, 2),), (1, 2))


def _ctx(name, n, k):
    R = builtin_system(name, n)
    return DunklContext(R, V.multiplicity(R, k))


def _configs(ns=(2, 3)):
    for n in ns:
        for name in SYSTEMS:
            for k in MULTIPLICITIES:
                yield n, name, k


def _report(number, ok, text):
    line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'}  {text}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _failures(results):
    return [r for r in results if not r.passed]


def test_criterion_01_exact_sl2():
    t = time.time()
    bad, signs, monos = [], set(), 0
    for n, name, k in _configs():
        rep = sl2_commutators(_ctx(name, n, k), 6)
        monos += rep.monomials_checked
        if not rep.ok:
            bad.append((n, name, k))
        signs.add(tuple(r for r in rep.verified if r.startswith("[H")))
    fixed = signs == {("[H,E] = 2E", "[H,F] = -2F")}
    _report(
        1,
        not bad and fixed,
        f"[E,F] = H exactly on {monos} monomials (degree <= 6, 18 configurations); "
        f"signs {sorted(signs)}; failures {bad}; {time.time() - t:.0f}s",
    )


def test_criterion_02_commutativity():
    rng = random.Random(2)
    res = [V.check_commutativity(_ctx(name, n, k), rng, 50, 4) for n, name, k in _configs()]
    _report(2, not _failures(res), f"[T_xi, T_eta] = 0 exactly, {sum(r.cases for r in res)} pairs; failing {len(_failures(res))}")


def test_criterion_03_two_laplacians():
    rng = random.Random(3)
    res = [V.check_two_laplacians(_ctx(name, n, k), rng, 200, 5) for n, name, k in _configs()]
    _report(3, not _failures(res), f"sum form == direct form exactly on {sum(r.cases for r in res)} polynomials")


def test_criterion_04_equivariance():
    rng = random.Random(4)
    res = [V.check_equivariance(_ctx(name, n, k), rng, 50, 4) for n, name, k in _configs()]
    _report(4, not _failures(res), f"Lap_k(p o g) == (Lap_k p) o g exactly, {sum(r.cases for r in res)} cases")


@pytest.mark.parametrize("j", [1, 2])
def test_criterion_05_extension_independence(j):
    rng = random.Random(50 + j)
    worst, power, details = 0.0, float("inf"), []
    configs = [("A1", 2, (Fraction(1, 2),)), ("B2_euclidean", 2, (1, 2)), ("B3_embedded", 2, (1, 2))]
    points = 100
    ok = True
    for name, n, k in configs:
        crit, off = V.check_extension_independence(
            _ctx(name, n, k), rng, j, points, 5, TOL_EXTENSION, TOL_EXTENSION_POWER
        )
        ok &= crit.passed and off.passed
        worst = max(worst, crit.residual)
        power = min(power, off.residual)
        details.append(f"{name}:{crit.residual:.1e}/{off.residual:.1e}")
    _report(
        5,
        ok,
        f"j={j}: critical residual {worst:.2e} <= {TOL_EXTENSION:.0e}; w+1/2 residual {power:.2e} > "
        f"{TOL_EXTENSION_POWER:.0e} ({', '.join(details)}; {points} points x 5 g)",
    )


def test_criterion_06_route_agreement():
    rng = random.Random(6)
    res = [V.check_route_agreement(_ctx(name, 2, k), rng, 200, TOL_ROUTES) for _, name, k in _configs((2,))]
    worst = max(r.residual for r in res)
    _report(6, not _failures(res), f"route A vs route B max rel err {worst:.2e} <= {TOL_ROUTES:.0e}, 9 configurations x 200 points")


def test_criterion_07_classical_reduction():
    rng = random.Random(7)
    res = []
    for name in ("A1", "B2_euclidean"):
        for k in MULTIPLICITIES[1:]:
            res.append(V.check_classical_reduction(_ctx(name, 2, k), rng, 200, TOL_CLASSICAL))
    k0 = [V.check_k0_reduction(builtin_system(name, n), rng, 100, TOL_K0) for name in SYSTEMS for n in (2, 3)]
    ok = not _failures(res) and not _failures(k0) and not any(r.skipped for r in res)
    _report(
        7,
        ok,
        f"Euclidean roots vs classical oracle {max(r.residual for r in res):.2e} <= {TOL_CLASSICAL:.0e}; "
        f"k=0 vs Laplacian {max(r.residual for r in k0):.2e} <= {TOL_K0:.0e}",
    )


def test_criterion_08_bilaplacian():
    rng = random.Random(8)
    res = [V.check_bilaplacian(builtin_system(name, n), rng, 50, TOL_BILAPLACIAN) for name in SYSTEMS for n in (2, 3)]
    _report(8, not _failures(res), f"k=0, j=2 route B vs Lap^2 max rel err {max(r.residual for r in res):.2e} <= {TOL_BILAPLACIAN:.0e}")


def test_criterion_09_geometry():
    rng = random.Random(9)
    res = []
    for n in (1, 2, 3):
        res += V.check_geometry(build_B(n), rng, 30, TOL_GEOMETRY)
    for name in SYSTEMS:
        res += V.check_geometry(builtin_system(name, 3), rng, 30, TOL_GEOMETRY)
    orders = []
    for n in (1, 2):
        expected = 2 ** (n + 1) * [1, 1, 2, 6][n + 1]
        r = V.check_group_order(build_B(n), expected)
        orders.append(r.detail)
        res.append(r)
    bad = [r.name for r in _failures(res)]
    _report(9, not bad, f"axioms, hyperplane bases, involution and lift (<= {TOL_GEOMETRY:.0e}); groups: {'; '.join(orders)}; failing {bad}")


def test_criterion_10_derivatives():
    r = V.check_derivatives(random.Random(10), 500, 3, TOL_DERIVATIVES)
    _report(10, r.passed, f"symbolic vs central differences (step {V.FD_STEP:g}) max rel err {r.residual:.2e} <= {TOL_DERIVATIVES:.0e}, 500 expressions")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
