"""Closed-form reproducing kernels, used as an oracle for the moment path.

* ball: lift ``x -> (x, sqrt(1-|x|^2))`` to the sphere ``S^d`` and apply
  the spherical addition formula ``Z_n^{(d-1)/2}(<X, Y>)``;
* simplex: lift ``x -> (sqrt(x_1), ..., sqrt(x_d), sqrt(1-|x|))`` to ``S^d``;
  even-degree spherical harmonics fold onto the simplex kernels;
* cube: the lattice sum ``sum_{|k|_1 = n} cos(k . (theta - phi))`` computed
  directly and as a divided difference of ``H_{n,d}``.

This module works in binary floating point only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Polynomial as NpPoly
from numpy.polynomial import chebyshev as npcheb

from .momentmat import LdlFactors, kernel_levels, ldl, moment_matrix
from .measures import equilibrium_moments, localize
from .polyring import make_generators

CONFLUENCE_TOL = 1e-7


# ---------------------------------------------------------------------------
# univariate families

def gegenbauer(lam: float, n: int, t):
    """``C_n^lam(t)`` by the three-term recurrence."""
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    prev, cur = np.ones_like(t, dtype=float) if np.ndim(t) else 1.0, 2 * lam * t
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, (2 * (k + lam) * t * cur - (k + 2 * lam - 1) * prev) / (k + 1)
    return cur


def zn(lam: float, n: int, t):
    """``Z_n^lam = (n + lam)/lam * C_n^lam``, with the limit ``2 T_n`` at ``lam = 0``."""
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if n == 0:
        return np.ones_like(t, dtype=float) if np.ndim(t) else 1.0
    if lam == 0:
        return 2 * chebyshev("T", n, t)
    return (n + lam) / lam * gegenbauer(lam, n, t)


def chebyshev(kind: str, n: int, t):
    """Chebyshev ``T_n``, ``U_n``, or the normalized ``T_hat_n = sqrt(2) T_n``.

    ``U_{-1}`` is taken as 0 so that Pell's equation holds at ``n = 0``.
    """
    if kind not in ("T", "U", "T-normalized"):
        raise ValueError(f"unknown Chebyshev kind {kind!r}")
    if n < 0:
        if kind == "U" and n == -1:
            return 0 * t
        raise ValueError(f"degree must be >= 0, got {n}")
    one = np.ones_like(t, dtype=float) if np.ndim(t) else 1.0
    prev, cur = one, (2 * t if kind == "U" else t)
    if n == 0:
        out = prev
    else:
        for _ in range(1, n):
            prev, cur = cur, 2 * t * cur - prev
        out = cur
    if kind == "T-normalized" and n >= 1:
        out = math.sqrt(2) * out
    return out


# ---------------------------------------------------------------------------
# ball and simplex via the sphere

def _check_ball(x, name):
    r2 = float(sum(float(c) ** 2 for c in x))
    if r2 > 1 + 1e-12:
        raise ValueError(f"{name} = {tuple(x)} lies outside the closed unit ball")
    return max(0.0, 1.0 - r2)


def ball_lift(x: Sequence) -> np.ndarray:
    rest = _check_ball(x, "x")
    return np.array([float(c) for c in x] + [math.sqrt(rest)])


def ball_addition_kernel(d: int, n: int, x: Sequence, y: Sequence) -> float:
    """``Z_n^{(d-1)/2}(<X, Y>)`` for ``X, Y`` the sphere lifts of ``x, y``."""
    X, Y = ball_lift(x), ball_lift(y)
    return float(zn((d - 1) / 2, n, float(np.clip(X @ Y, -1.0, 1.0))))


def simplex_lift(x: Sequence) -> np.ndarray:
    xs = [float(c) for c in x]
    last = 1.0 - sum(xs)
    if min(xs + [last]) < -1e-12:
        raise ValueError(f"x = {tuple(x)} lies outside the simplex")
    return np.sqrt(np.clip(np.array(xs + [last]), 0.0, None))


def simplex_folded_kernel(d: int, m: int, x: Sequence, y: Sequence) -> float:
    """Degree-``2m`` spherical kernel evaluated on simplex lifts."""
    X, Y = simplex_lift(x), simplex_lift(y)
    return float(zn((d - 1) / 2, 2 * m, float(np.clip(X @ Y, -1.0, 1.0))))


# ---------------------------------------------------------------------------
# divided differences

@dataclass
class DividedDiffTable:
    """Knots (repeats allowed) and, for confluent knots, derivative access.

    ``derivative(k, x)`` must return ``f^{(k)}(x)``; it is only consulted
    where knots coincide.
    """

    knots: Sequence[float]
    derivative: Callable[[int, float], float] | None = field(default=None, repr=False)


def _snap(knots: Sequence[float]) -> list[float]:
    z = sorted(float(t) for t in knots)
    for i in range(1, len(z)):
        if abs(z[i] - z[i - 1]) < CONFLUENCE_TOL:
            z[i] = z[i - 1]
    return z


def _dd_polynomial(knots: Sequence[float], p: NpPoly) -> float:
    # [t_1..t_m] x^k = h_{k-m+1}(t_1..t_m), complete homogeneous symmetric
    m = len(knots)
    coef = p.convert(kind=NpPoly).coef
    top = len(coef) - 1
    if top < m - 1:
        return 0.0
    width = top - m + 2
    h = np.zeros(width)
    h[0] = 1.0
    for t in knots:
        for j in range(1, width):
            h[j] += t * h[j - 1]
    return float(sum(coef[k] * h[k - m + 1] for k in range(m - 1, top + 1)))


def divided_difference(table: DividedDiffTable | Sequence[float], f) -> float:
    """``[t_1, ..., t_m] f``.

    ``f`` may be a :class:`numpy.polynomial.Polynomial` (evaluated through
    complete homogeneous symmetric sums, exact in structure for any knot
    configuration) or a callable; for callables the Newton table is built
    on sorted knots, and knots closer than ``1e-7`` are merged and served by
    ``table.derivative``.
    """
    if not isinstance(table, DividedDiffTable):
        table = DividedDiffTable(list(table))
    if len(table.knots) == 0:
        raise ValueError("divided difference needs at least one knot")
    if isinstance(f, NpPoly):
        return _dd_polynomial([float(t) for t in table.knots], f)
    z = _snap(table.knots)
    m = len(z)
    col = [float(f(t)) for t in z]
    for j in range(1, m):
        nxt = []
        for i in range(m - j):
            if z[i + j] == z[i]:
                if table.derivative is None:
                    raise ValueError(f"derivative of order {j} needed at confluent knot {z[i]}")
                nxt.append(table.derivative(j, z[i]) / math.factorial(j))
            else:
                nxt.append((col[i + 1] - col[i]) / (z[i + j] - z[i]))
        col = nxt
    return col[0]


def poly_derivative(p: NpPoly) -> Callable[[int, float], float]:
    return lambda k, x: float(p.deriv(k)(x))


# ---------------------------------------------------------------------------
# cube

@lru_cache(maxsize=None)
def h_poly(n: int, d: int) -> NpPoly:
    """``H_{n,d}`` as a polynomial in ``t = cos(theta)``, ``n >= 1``."""
    if n < 1:
        raise ValueError("use h0_poly for n = 0")
    sign = 2 * (-1) ** ((d - 1) // 2)
    one_minus = NpPoly([1.0, 0.0, -1.0])
    if d % 2:
        tn = NpPoly(npcheb.cheb2poly([0] * n + [1]))
        return sign * one_minus ** ((d - 1) // 2) * tn
    # sin(theta) sin(n theta) = (1 - t^2) U_{n-1}(t)
    u = NpPoly(_cheb_u_coeffs(n - 1))
    return -sign * one_minus ** (d // 2) * u


def _cheb_u_coeffs(n: int) -> list[float]:
    prev, cur = NpPoly([1.0]), NpPoly([0.0, 2.0])
    if n == 0:
        return list(prev.coef)
    for _ in range(1, n):
        prev, cur = cur, NpPoly([0.0, 2.0]) * cur - prev
    return list(cur.coef)


def h_trig(n: int, d: int, theta: float) -> float:
    """``H_{n,d}(cos theta)`` in its trigonometric form, ``n >= 1``."""
    base = 2 * (-1) ** ((d - 1) // 2) * math.sin(theta) ** (d - 1)
    return base * (-math.sin(n * theta) if d % 2 == 0 else math.cos(n * theta))


def h0_poly(d: int) -> NpPoly:
    """A degree-0 generator: any monic polynomial of degree ``d - 1`` works."""
    return NpPoly([0.0] * (d - 1) + [1.0])


def h0_printed(d: int, theta: float) -> float:
    """The ``n = 0`` form as printed alongside the ``n >= 1`` cases."""
    base = 2 * (-1) ** ((d - 1) // 2) * math.sin(theta) ** (d - 1) * math.cos(theta / 2)
    return base * (math.cos(theta / 2) if d % 2 == 0 else math.sin(theta / 2))


def lattice_points(n: int, d: int):
    """All ``k`` in ``Z^d`` with ``sum |k_i| = n``."""
    def comps(total, parts):
        if parts == 1:
            yield (total,)
            return
        for first in range(total + 1):
            for rest in comps(total - first, parts - 1):
                yield (first,) + rest

    for mags in comps(n, d):
        nz = [i for i, a in enumerate(mags) if a]
        for signs in product((1, -1), repeat=len(nz)):
            k = list(mags)
            for i, s_ in zip(nz, signs):
                k[i] *= s_
            yield tuple(k)


@dataclass
class CubeKernelSum:
    direct: float
    divided: float
    difference: float
    printed_h0: float | None = None


def cube_kernel_sum(d: int, n: int, theta: Sequence[float], phi: Sequence[float]) -> CubeKernelSum:
    """``sum_{|k|_1 = n} cos(k . (theta - phi))`` two ways."""
    psi = [float(a) - float(b) for a, b in zip(theta, phi)]
    if len(psi) != d:
        raise ValueError("angle vectors must have length d")
    direct = sum(math.cos(sum(k_i * p for k_i, p in zip(k, psi))) for k in lattice_points(n, d))
    knots = [math.cos(p) for p in psi]
    poly = h_poly(n, d) if n >= 1 else h0_poly(d)
    divided = divided_difference(knots, poly)
    printed = None
    if n == 0:
        z = _snap(knots)
        if len(set(z)) == len(z):
            printed = divided_difference(z, lambda t: h0_printed(d, math.acos(max(-1.0, min(1.0, t)))))
    return CubeKernelSum(direct, divided, direct - divided, printed)


def cube_lattice_count_dd(n: int, d: int) -> float:
    """``H_{n,d}^{(d-1)}(1)/(d-1)!``, the confluent divided difference at 1."""
    poly = h_poly(n, d) if n >= 1 else h0_poly(d)
    return divided_difference(DividedDiffTable([1.0] * d, poly_derivative(poly)),
                              lambda t: float(poly(t)))


# ---------------------------------------------------------------------------
# cross-check against the moment-matrix kernels

@lru_cache(maxsize=1024)
def _factors(domain: str, d: int, label: str, k: int):
    gens = {g.label: g for g in make_generators(domain, d, d + 1)}
    g = gens[label]
    mu = equilibrium_moments(domain, d, 2 * k + g.poly.degree())
    M = moment_matrix(localize(mu, g.poly), k)
    return g, ldl(M), M.basis


def moment_kernel_terms(domain: str, d: int, n: int, x, y) -> list[tuple[float, float]]:
    """``(sqrt(g(x) g(y)), P^{g.mu}_{n - t_g}(x, y))`` per generator, the
    kernel computed exactly from the moment matrices at rational points."""
    out = []
    for g in make_generators(domain, d, n):
        k = n - g.half_degree
        _, F, basis = _factors(domain, d, g.label, k)
        level = kernel_levels(F, basis, x, y)[k]
        gx, gy = g.poly(x), g.poly(y)
        # cube generators are squares of prod sqrt(1-x_j^2); simplex ones of sqrt(x^eps)
        weight = math.sqrt(max(0.0, float(gx))) * math.sqrt(max(0.0, float(gy)))
        out.append((weight, float(level)))
    return out


def moment_kernel(domain: str, d: int, n: int, x, y) -> float:
    """Kernel of the full degree-``n`` space assembled from the moment path."""
    return math.fsum(w * p for w, p in moment_kernel_terms(domain, d, n, x, y))


def closed_kernel(domain: str, d: int, n: int, x, y) -> float:
    if domain == "ball":
        return ball_addition_kernel(d, n, x, y)
    if domain == "simplex":
        return simplex_folded_kernel(d, n, x, y)
    if domain == "cube":
        theta = [math.acos(float(c)) for c in x]
        phi = [math.acos(float(c)) for c in y]
        return cube_kernel_sum(d, n, theta, phi).divided
    raise ValueError(f"unknown domain {domain!r}")


@dataclass
class CrossCheckReport:
    domain: str
    d: int
    n: int
    samples: int
    max_abs_deviation: float
    max_direct_vs_divided: float = 0.0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def cross_check(domain: str, d: int, n: int, samples: Sequence[tuple[Sequence, Sequence]]) -> CrossCheckReport:
    """Compare closed-form kernels with moment-matrix kernels at point pairs.

    Points should be rational (``Fraction``) so the moment side is exact.
    """
    worst, worst_dd = 0.0, 0.0
    for x, y in samples:
        x = tuple(Fraction(c) for c in x)
        y = tuple(Fraction(c) for c in y)
        closed = closed_kernel(domain, d, n, x, y)
        worst = max(worst, abs(closed - moment_kernel(domain, d, n, x, y)))
        if domain == "cube":
            res = cube_kernel_sum(d, n, [math.acos(float(c)) for c in x],
                                  [math.acos(float(c)) for c in y])
            worst_dd = max(worst_dd, abs(res.difference))
    return CrossCheckReport(domain, d, n, len(samples), worst, worst_dd)
