"""Generalized Pell identities for the ball, simplex and cube.

For the probability equilibrium measure ``mu`` of each domain and its
generator set ``G_n``::

    sum_{g in G_n} g(x) * Lambda_{n - t_g}^{g.mu}(x)^{-1} = gamma_n

holds identically in ``x``, and the degree-level version with kernel
diagonals ``P_m`` holds with the per-level constants.  Both sides are
assembled here as exact polynomials, so verification means the residual
polynomial is zero.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .measures import equilibrium_moments, localize
from .momentmat import NotPDError, christoffel_poly
from .multiindex import binom, cube_lattice_count
from .polyring import DOMAINS, EXACT, FLOAT, Generator, Polynomial, make_generators

CHRISTOFFEL = "christoffel"
KERNEL = "kernel"
LEVELS = (CHRISTOFFEL, KERNEL)
FLOAT_RTOL = 1e-8


def _check_domain(domain: str) -> None:
    if domain not in DOMAINS:
        raise ValueError(f"unknown domain {domain!r}")


def pell_constant(domain: str, d: int, n: int) -> int:
    """Right-hand side of the Christoffel-level identity."""
    _check_domain(domain)
    if domain == "ball":
        return binom(d + n, d) + binom(d + n - 1, d)
    if domain == "simplex":
        return binom(2 * n + d, d)
    return sum(binom(d, j) * binom(d + n - j, d) for j in range(d + 1))


def kernel_constant(domain: str, d: int, m: int) -> int:
    """Right-hand side of the degree-``m`` kernel identity."""
    _check_domain(domain)
    if domain == "ball":
        return binom(d + m - 1, d - 1) + binom(d + m - 2, d - 1)
    if domain == "simplex":
        return binom(2 * m + d - 1, d - 1) + binom(2 * m + d - 2, d - 1)
    return cube_lattice_count(m, d)


def gamma(domain: str, d: int, n: int) -> int:
    """Reciprocal of the minimum of the Christoffel function on the domain."""
    return pell_constant(domain, d, n)


# ---------------------------------------------------------------------------
# cached Christoffel polynomials of the localized equilibrium measures

def full_generators(domain: str, d: int, kind: str = EXACT) -> tuple[Generator, ...]:
    return make_generators(domain, d, d + 1, kind).generators


def _generator(domain: str, d: int, label: str, kind: str) -> Generator:
    for g in full_generators(domain, d, kind):
        if g.label == label:
            return g
    raise KeyError(label)


@lru_cache(maxsize=4096)
def localized_christoffel(domain: str, d: int, label: str, k: int, mode: str = EXACT) -> Polynomial:
    """``Lambda_k^{g.mu}(x)^{-1}`` for the generator labelled ``label``."""
    g = _generator(domain, d, label, EXACT)
    mu = equilibrium_moments(domain, d, 2 * k + g.poly.degree())
    if mode == FLOAT:
        mu = mu.to_float()
    return christoffel_poly(localize(mu, g.poly), k)


def localized_kernel_level(domain: str, d: int, label: str, m: int, mode: str = EXACT) -> Polynomial:
    """``P_m^{g.mu}(x, x) = K_m - K_{m-1}`` on the diagonal."""
    top = localized_christoffel(domain, d, label, m, mode)
    if m == 0:
        return top
    return top - localized_christoffel(domain, d, label, m - 1, mode)


def localized_mass(domain: str, d: int, label: str):
    g = _generator(domain, d, label, EXACT)
    return localize(equilibrium_moments(domain, d, g.poly.degree()), g.poly).mass


def assemble_pell_poly(domain: str, d: int, n: int, level: str = CHRISTOFFEL,
                       mode: str = EXACT) -> Polynomial:
    """Left-hand side of the Pell identity as an explicit polynomial.

    ``level="christoffel"``: ``sum_g g * Lambda_{n-t_g}^{g.mu}{}^{-1}``;
    ``level="kernel"``: ``sum_g g * P_{n-t_g}^{g.mu}`` (here ``n`` is the level).
    """
    _check_domain(domain)
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    part = localized_christoffel if level == CHRISTOFFEL else localized_kernel_level
    total = Polynomial.zero(d, mode)
    for g in make_generators(domain, d, n, mode):
        total = total + g.poly * part(domain, d, g.label, n - g.half_degree, mode)
    return total


@dataclass
class PellReport:
    domain: str
    d: int
    n: int
    level: str
    mode: str
    constant_expected: int
    residual_max_abs_coeff: object
    per_generator_masses: list = field(default_factory=list)
    status: str = "failed"
    residual: str = "0"
    error: str | None = None

    @property
    def verified(self) -> bool:
        return self.status == "verified"

    def to_dict(self) -> dict:
        out = asdict(self)
        out["residual_max_abs_coeff"] = _scalar_text(self.residual_max_abs_coeff)
        return out


def _scalar_text(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def verify_pell(domain: str, d: int, n: int, level: str = CHRISTOFFEL,
                mode: str = EXACT) -> PellReport:
    """Assemble and subtract the expected constant.

    Exact mode verifies iff the difference is the zero polynomial; float
    mode iff every coefficient is within ``1e-8 * constant``.
    """
    const = pell_constant(domain, d, n) if level == CHRISTOFFEL else kernel_constant(domain, d, n)
    gens = make_generators(domain, d, n)
    masses = [[g.label, str(localized_mass(domain, d, g.label))] for g in gens]
    report = PellReport(domain, d, n, level, mode, const,
                        Fraction(0) if mode == EXACT else 0.0, masses)
    try:
        lhs = assemble_pell_poly(domain, d, n, level, mode)
    except NotPDError as exc:
        report.error = str(exc)
        return report
    residual = lhs - Polynomial.constant(const, d, mode)
    worst = residual.max_abs_coeff()
    report.residual_max_abs_coeff = worst
    report.residual = residual.to_text()
    if mode == EXACT:
        ok = residual.is_zero()
    else:
        ok = worst <= FLOAT_RTOL * const
    report.status = "verified" if ok else "failed"
    return report


SIMPLEX_READINGS = ("weighted", "unweighted", "weighted-short")


def simplex_kernel_readings(d: int, m: int) -> dict[str, bool]:
    """Which form of the simplex degree-level identity holds exactly.

    ``weighted``: ``sum_eps g_eps P_{m-|eps|/2}^{g_eps.mu}`` over even
    ``|eps| <= 2m``; ``unweighted``: the same sum without the factor
    ``g_eps``; ``weighted-short``: the weighted sum cut at ``|eps| <= m``.
    """
    const = kernel_constant("simplex", d, m)
    out = {}
    for reading in SIMPLEX_READINGS:
        total = Polynomial.zero(d)
        for g in make_generators("simplex", d, m):
            if reading == "weighted-short" and 2 * g.half_degree > m:
                continue
            level = localized_kernel_level("simplex", d, g.label, m - g.half_degree)
            total = total + (level if reading == "unweighted" else g.poly * level)
        out[reading] = (total - const).is_zero()
    return out


def reports_to_csv(reports: Sequence[PellReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["domain", "d", "n", "level", "mode", "constant", "residual", "status"])
    for r in sorted(reports, key=lambda r: (r.domain, r.d, r.n, r.level)):
        w.writerow([r.domain, r.d, r.n, r.level, r.mode, r.constant_expected,
                    _scalar_text(r.residual_max_abs_coeff), r.status])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# boundary minimum

def boundary_certificate(domain: str, d: int, n: int) -> Polynomial:
    """``sum_{g != 1} g * Lambda_{n-t_g}^{g.mu}{}^{-1}``, which equals
    ``gamma_n - Lambda_n^mu{}^{-1}`` and lies in the ideal of the generators."""
    total = Polynomial.zero(d)
    for g in make_generators(domain, d, n):
        if g.half_degree == 0:
            continue
        total = total + g.poly * localized_christoffel(domain, d, g.label, n - g.half_degree)
    return total


def on_boundary(domain: str, x: Sequence[Fraction]) -> bool:
    if domain == "ball":
        return sum(c * c for c in x) == 1
    if domain == "simplex":
        return in_domain(domain, x) and (any(c == 0 for c in x) or sum(x) == 1)
    return in_domain(domain, x) and any(abs(c) == 1 for c in x)


def in_domain(domain: str, x: Sequence[Fraction]) -> bool:
    if domain == "ball":
        return sum(c * c for c in x) <= 1
    if domain == "simplex":
        return all(c >= 0 for c in x) and sum(x) <= 1
    return all(-1 <= c <= 1 for c in x)


def _rand_frac(rng: random.Random, lo: Fraction, hi: Fraction, den: int = 97) -> Fraction:
    return lo + (hi - lo) * Fraction(rng.randint(1, den - 1), den)


def sphere_point(t: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Inverse stereographic projection ``Q^{d-1} -> S^{d-1}``; exact."""
    r2 = sum(c * c for c in t)
    return tuple(2 * c / (r2 + 1) for c in t) + ((r2 - 1) / (r2 + 1),)


def boundary_samples(domain: str, d: int, count: int, seed: int = 0) -> list[tuple]:
    """Rational points of the boundary drawn from random faces."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        if domain == "ball":
            if d == 1:
                out.append((Fraction(rng.choice((-1, 1))),))
                continue
            t = [Fraction(rng.randint(-20, 20), rng.randint(1, 20)) for _ in range(d - 1)]
            p = list(sphere_point(t))
            rng.shuffle(p)
            out.append(tuple(p))
        elif domain == "simplex":
            x = interior_samples(domain, d, 1, rng.randrange(2**31))[0]
            face = rng.randrange(d + 1)
            x = list(x)
            if face < d:
                x[face] = Fraction(0)
            else:
                x[-1] = 1 - sum(x[:-1])
            out.append(tuple(x))
        else:
            x = list(interior_samples(domain, d, 1, rng.randrange(2**31))[0])
            x[rng.randrange(d)] = Fraction(rng.choice((-1, 1)))
            out.append(tuple(x))
    return out


def vertex_samples(domain: str, d: int) -> list[tuple]:
    """Vertices (cube, simplex) or the axis points ``+-e_i`` (ball)."""
    from itertools import product

    if domain == "cube":
        return [tuple(Fraction(s) for s in signs) for signs in product((-1, 1), repeat=d)]
    pts = [tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)]
    if domain == "simplex":
        return [tuple(Fraction(0) for _ in range(d))] + pts
    return pts + [tuple(-c for c in p) for p in pts]


def interior_samples(domain: str, d: int, count: int, seed: int = 0) -> list[tuple]:
    """Rational points of the domain (rejection sampling on a grid)."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        if domain == "simplex":
            x = tuple(_rand_frac(rng, Fraction(0), Fraction(1)) for _ in range(d))
        else:
            x = tuple(_rand_frac(rng, Fraction(-1), Fraction(1)) for _ in range(d))
        if domain == "cube" or (domain == "ball" and sum(c * c for c in x) < 1) or \
                (domain == "simplex" and sum(x) < 1):
            out.append(x)
    return out


@dataclass
class BoundaryReport:
    domain: str
    d: int
    n: int
    gamma: int
    boundary_values: list
    boundary_attained: list
    interior_max: object
    interior_ok: bool
    status: str

    def to_dict(self) -> dict:
        out = asdict(self)
        out["boundary_values"] = [_scalar_text(v) for v in self.boundary_values]
        out["interior_max"] = _scalar_text(self.interior_max)
        return out


def boundary_minimum_check(domain: str, d: int, n: int, samples: Sequence[Sequence],
                           interior: Sequence[Sequence] | None = None,
                           interior_count: int = 50, seed: int = 0) -> BoundaryReport:
    """Evaluate ``Lambda_n^{-1}`` at boundary samples and interior points.

    Checks ``Lambda_n^{-1}(x) == gamma_n`` at every boundary sample and
    ``Lambda_n^{-1} <= gamma_n`` in the interior, exactly.
    """
    _check_domain(domain)
    pts = [tuple(Fraction(c) for c in x) for x in samples]
    for x in pts:
        if len(x) != d or not on_boundary(domain, x):
            raise ValueError(f"sample {x} is not on the boundary of the {domain}")
    if interior is None:
        interior = interior_samples(domain, d, interior_count, seed)
    inv = localized_christoffel(domain, d, full_generators(domain, d)[0].label, n)
    g = gamma(domain, d, n)
    values = [inv(x) for x in pts]
    attained = [v == g for v in values]
    inner = [inv(tuple(Fraction(c) for c in x)) for x in interior]
    inner_max = max(inner, default=Fraction(0))
    inner_ok = all(v <= g for v in inner)
    status = "verified" if all(attained) and inner_ok else "failed"
    return BoundaryReport(domain, d, n, g, values, attained, inner_max, inner_ok, status)
