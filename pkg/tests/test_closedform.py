import math
import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from numpy.polynomial import Polynomial as NpPoly
from scipy import special

from pellpoly.closedform import (CONFLUENCE_TOL, DividedDiffTable, ball_addition_kernel,
                                 chebyshev, closed_kernel, cross_check, cube_kernel_sum,
                                 cube_lattice_count_dd, divided_difference, gegenbauer, h0_poly,
                                 h_poly, h_trig, lattice_points, moment_kernel, poly_derivative,
                                 simplex_folded_kernel, zn)
from pellpoly.multiindex import binom, cube_lattice_count
from pellpoly.pell import interior_samples, localized_christoffel

F = Fraction


def test_gegenbauer_examples():
    assert gegenbauer(0.5, 3, 1.0) == pytest.approx(1.0)
    assert gegenbauer(1.0, 2, 0.0) == pytest.approx(-1.0)
    assert zn(0.5, 4, 1.0) == pytest.approx(9.0)


def test_gegenbauer_at_one():
    for lam in (0.25, 0.5, 1.0, 1.5, 3.0):
        for n in range(8):
            want = math.gamma(n + 2 * lam) / (math.factorial(n) * math.gamma(2 * lam))
            assert gegenbauer(lam, n, 1.0) == pytest.approx(want, rel=1e-12)


def test_gegenbauer_matches_scipy_and_recurrence():
    rng = random.Random(0)
    for _ in range(100):
        lam, t = rng.uniform(0.05, 4), rng.uniform(-1, 1)
        c = [gegenbauer(lam, n, t) for n in range(9)]
        for n in range(9):
            assert c[n] == pytest.approx(special.eval_gegenbauer(n, lam, t), rel=1e-9, abs=1e-12)
        for n in range(1, 8):
            lhs = (n + 1) * c[n + 1]
            rhs = 2 * (n + lam) * t * c[n] - (n + 2 * lam - 1) * c[n - 1]
            assert lhs == pytest.approx(rhs, abs=1e-10)


def test_special_cases_of_gegenbauer():
    for t in np.linspace(-1, 1, 11):
        for n in range(7):
            assert gegenbauer(1.0, n, t) == pytest.approx(chebyshev("U", n, t), abs=1e-12)
            # lambda -> 0 limit of Z_n is 2 T_n
            assert zn(1e-9, n, t) == pytest.approx(zn(0.0, n, t), abs=1e-6)
    assert zn(0.0, 0, 0.3) == 1.0
    assert zn(0.0, 3, 0.3) == pytest.approx(2 * chebyshev("T", 3, 0.3))


def test_gegenbauer_errors():
    with pytest.raises(ValueError):
        gegenbauer(-0.5, 2, 0.1)
    with pytest.raises(ValueError):
        gegenbauer(0.5, -1, 0.1)
    with pytest.raises(ValueError):
        chebyshev("V", 2, 0.1)


def test_chebyshev_examples():
    for n in range(11):
        assert chebyshev("T", n, 1.0) == pytest.approx(1.0)
    assert chebyshev("U", 1, 0.5) == pytest.approx(1.0)
    x = 0.25
    assert chebyshev("T", 3, x) ** 2 + (1 - x * x) * chebyshev("U", 2, x) ** 2 == pytest.approx(1.0)
    assert chebyshev("T-normalized", 0, x) == 1.0
    assert chebyshev("T-normalized", 2, x) == pytest.approx(math.sqrt(2) * chebyshev("T", 2, x))
    assert chebyshev("U", -1, x) == 0


def test_chebyshev_against_trig():
    for theta in np.linspace(0.1, 3.0, 9):
        t = math.cos(theta)
        for n in range(8):
            assert chebyshev("T", n, t) == pytest.approx(math.cos(n * theta), abs=1e-12)
            assert chebyshev("U", n, t) == pytest.approx(math.sin((n + 1) * theta) / math.sin(theta), abs=1e-10)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_ball_kernel_on_diagonal(d):
    x = (0.3,) + (0.1,) * (d - 1)
    for n in range(6):
        want = binom(n + d - 1, d - 1) + binom(n + d - 2, d - 1)
        assert ball_addition_kernel(d, n, x, x) == pytest.approx(want)


def test_ball_kernel_examples():
    assert ball_addition_kernel(2, 1, (0, 0), (1, 0)) == pytest.approx(0.0, abs=1e-15)
    theta, phi = 0.7, 2.1
    got = ball_addition_kernel(1, 2, (math.cos(theta),), (math.cos(phi),))
    assert got == pytest.approx(2 * math.cos(2 * (theta - phi)))
    with pytest.raises(ValueError):
        ball_addition_kernel(2, 1, (1, 1), (0, 0))


@pytest.mark.parametrize("d", [2, 3])
def test_sphere_dimension_identity(d):
    lam = (d - 1) / 2
    for n in range(6):
        x = (F(1, 3),) + (F(1, 5),) * (d - 1)
        via_moments = moment_kernel("ball", d, n, x, x)
        want = (2 * n + d - 1) / (d - 1) * gegenbauer(lam, n, 1.0)
        assert via_moments == pytest.approx(want, abs=1e-10)


def test_simplex_folded_kernel():
    x = (0.2, 0.3)
    assert simplex_folded_kernel(2, 2, x, x) == pytest.approx(binom(5, 1) + binom(4, 1))
    with pytest.raises(ValueError):
        simplex_folded_kernel(2, 1, (0.8, 0.8), x)


# ---------------------------------------------------------------------------
# divided differences

def test_divided_difference_examples():
    assert divided_difference([0.7], math.exp) == pytest.approx(math.exp(0.7))
    assert divided_difference([0, 1], lambda t: t * t) == pytest.approx(1.0)
    assert divided_difference([0, 1], NpPoly([0, 0, 1])) == pytest.approx(1.0)
    a = 0.4
    cube = NpPoly([0, 0, 0, 1])
    assert divided_difference([a, a, a], cube) == pytest.approx(3 * a)
    table = DividedDiffTable([a, a, a], poly_derivative(cube))
    assert divided_difference(table, lambda t: t ** 3) == pytest.approx(3 * a)


def test_confluent_needs_derivative():
    with pytest.raises(ValueError):
        divided_difference([0.2, 0.2], math.sin)
    with pytest.raises(ValueError):
        divided_difference([], math.sin)


def test_near_confluence_snaps():
    table = DividedDiffTable([0.3, 0.3 + CONFLUENCE_TOL / 10], lambda k, x: math.cos(x))
    assert divided_difference(table, math.sin) == pytest.approx(math.cos(0.3))


def test_divided_difference_symmetric():
    rng = random.Random(2)
    for _ in range(20):
        f = NpPoly([rng.uniform(-2, 2) for _ in range(4)])
        knots = [rng.uniform(-1, 1) for _ in range(3)]
        base = divided_difference(knots, f)
        assert divided_difference(knots, f) == pytest.approx(f.coef[-1] * sum(knots) + f.coef[2])
        perm = knots[:]
        rng.shuffle(perm)
        assert divided_difference(perm, f) == pytest.approx(base, abs=1e-12)
        assert divided_difference(perm, lambda t: float(f(t))) == pytest.approx(base, abs=1e-9)


def test_confluent_callable_matches_taylor():
    # [a, a, b] f equals the polynomial route
    f = NpPoly([1.0, -2.0, 0.5, 3.0, 1.0])
    table = DividedDiffTable([0.2, 0.6, 0.2], poly_derivative(f))
    assert divided_difference(table, lambda t: float(f(t))) == pytest.approx(
        divided_difference([0.2, 0.2, 0.6], f), abs=1e-12)


# ---------------------------------------------------------------------------
# cube

def test_lattice_points():
    for d in (1, 2, 3):
        for n in range(6):
            pts = list(lattice_points(n, d))
            assert len(pts) == len(set(pts)) == cube_lattice_count(n, d)
            assert all(sum(map(abs, k)) == n for k in pts)


def test_h_poly_matches_trig_form():
    for d in (1, 2, 3, 4):
        for n in range(1, 7):
            for theta in (0.3, 1.1, 2.5):
                assert h_poly(n, d)(math.cos(theta)) == pytest.approx(h_trig(n, d, theta), abs=1e-12)


def test_cube_kernel_examples():
    theta, phi = [0.4], [1.3]
    r = cube_kernel_sum(1, 3, theta, phi)
    assert r.direct == pytest.approx(2 * math.cos(3 * (0.4 - 1.3)))
    assert cube_kernel_sum(1, 3, theta, theta).direct == pytest.approx(2)
    assert cube_kernel_sum(2, 1, [0.5, 0.9], [0.5, 0.9]).divided == pytest.approx(4)
    r0 = cube_kernel_sum(2, 0, [0.5, 0.9], [0.5, 0.9])
    assert r0.direct == r0.divided == pytest.approx(1)


def test_cube_kernel_two_routes_agree():
    rng = random.Random(11)
    for d in (1, 2, 3):
        for n in range(7):
            for trial in range(50):
                theta = [rng.uniform(0, math.pi) for _ in range(d)]
                phi = [rng.uniform(0, math.pi) for _ in range(d)]
                if d > 1 and trial % 5 == 0:
                    # repeated knot cos(theta_1 - phi_1) = cos(theta_2 - phi_2)
                    theta[1], phi[1] = theta[0], phi[0]
                if trial % 7 == 0:
                    phi = theta[:]
                r = cube_kernel_sum(d, n, theta, phi)
                assert abs(r.difference) <= 1e-9, (d, n, theta, phi)


def test_confluent_count_and_generating_function():
    r = sympy.symbols("r")
    for d in (1, 2, 3, 4):
        poly = sympy.Poly(sympy.series((1 + r) ** d / (1 - r) ** d, r, 0, 11).removeO(), r)
        for n in range(11):
            want = int(poly.coeff_monomial(r ** n))
            assert cube_lattice_count_dd(n, d) == pytest.approx(want, rel=1e-9)


def test_printed_degree_zero_form_flagged():
    # the printed n = 0 form is not constant in t; the monic t^{d-1} is
    r = cube_kernel_sum(2, 0, [0.3, 1.2], [0.9, 0.1])
    assert r.divided == pytest.approx(1.0)
    assert r.printed_h0 is not None and abs(r.printed_h0 - 1.0) > 1e-3
    assert h0_poly(3).coef.tolist() == [0, 0, 1]


# ---------------------------------------------------------------------------
# cross-check

def test_cross_check_examples():
    x = (F(1, 2), F(0))
    assert cross_check("ball", 2, 1, [(x, x)]).max_abs_deviation < 1e-10
    x = (F(1, 3), F(-1, 4))
    assert moment_kernel("cube", 2, 2, x, x) == pytest.approx(8)
    for d in (1, 2, 3):
        zero = (F(0),) * d
        assert moment_kernel("ball", d, 0, zero, zero) == pytest.approx(1)
        assert closed_kernel("ball", d, 0, zero, zero) == pytest.approx(1)


def test_cube_weights_reproduce_unnormalized_masses():
    # localized masses 2^{-|eps|} pair with the sqrt(g) weights to give the lattice count
    x = (F(1, 5), F(2, 3))
    for n in range(5):
        assert moment_kernel("cube", 2, n, x, x) == pytest.approx(cube_lattice_count(n, 2))


@pytest.mark.parametrize("domain", ["ball", "simplex", "cube"])
def test_cross_check_boundary_points(domain):
    d = 2
    if domain == "ball":
        pts = [((F(3, 5), F(4, 5)), (F(0), F(1, 2)))]
    elif domain == "simplex":
        pts = [((F(0), F(1, 3)), (F(1, 2), F(1, 2)))]
    else:
        pts = [((F(1), F(1, 3)), (F(-1, 2), F(-1)))]
    for n in range(4):
        assert cross_check(domain, d, n, pts).max_abs_deviation < 1e-10


def test_christoffel_diagonal_matches_closed_form_sum():
    # Lambda_n^{-1} on the ball equals the unit-generator part of sum_m kernels
    x = (F(1, 4), F(1, 3))
    total = sum(moment_kernel("ball", 2, m, x, x) for m in range(4))
    inv = localized_christoffel("ball", 2, "1", 3)(x) + \
        (1 - x[0] ** 2 - x[1] ** 2) * localized_christoffel("ball", 2, "1-|x|^2", 2)(x)
    assert total == pytest.approx(float(inv))
    assert inv == 16


def test_cross_check_random_sample():
    pts = interior_samples("simplex", 3, 10, seed=9)
    rep = cross_check("simplex", 3, 4, list(zip(pts[:5], pts[5:])))
    assert rep.samples == 5 and rep.max_abs_deviation < 1e-9
