"""Moment sequences of the equilibrium measures and their localizations.

All three equilibrium measures are arcsine-type, and their moments reduce
to ratios of Pochhammer symbols at half-integers, so they are computed
exactly as rationals:

* ball: the projection of the uniform measure on the sphere ``S^d`` in
  ``R^{d+1}`` onto the first ``d`` coordinates;
* simplex: the Dirichlet law with all ``d+1`` parameters equal to 1/2;
* cube: the product of univariate arcsine laws.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Mapping

from .multiindex import MultiIndex, add, enumerate_basis
from .polyring import EXACT, FLOAT, KindMismatchError, Polynomial, coerce

HALF = Fraction(1, 2)
SCHEMA_VERSION = 1


class OrderExhaustedError(ValueError):
    """Not enough moments to perform the requested operation."""


def pochhammer(a: Fraction, k: int) -> Fraction:
    """Rising factorial ``a (a+1) ... (a+k-1)``."""
    out = Fraction(1)
    for i in range(k):
        out *= a + i
    return out


@dataclass(frozen=True)
class MomentSequence:
    """Linear functional on polynomials of degree <= ``order``."""

    dim: int
    order: int
    values: Mapping[MultiIndex, object] = field(repr=False)
    provenance: str = "custom"
    kind: str = EXACT

    def __getitem__(self, alpha: MultiIndex):
        try:
            return self.values[tuple(alpha)]
        except KeyError:
            raise OrderExhaustedError(
                f"moment {tuple(alpha)} beyond order {self.order}") from None

    @property
    def mass(self):
        return self.values[(0,) * self.dim]

    def apply(self, p: Polynomial):
        """``phi(p) = sum_alpha p_alpha phi_alpha``."""
        if p.degree() > self.order:
            raise OrderExhaustedError(f"deg {p.degree()} > order {self.order}")
        total = coerce(0, self.kind)
        for alpha, c in p.items():
            total += c * self.values[alpha]
        return total

    def to_float(self) -> "MomentSequence":
        if self.kind == FLOAT:
            return self
        return MomentSequence(self.dim, self.order,
                              {a: float(v) for a, v in self.values.items()},
                              self.provenance, FLOAT)

    def truncate(self, order: int) -> "MomentSequence":
        if order > self.order:
            raise OrderExhaustedError(f"cannot extend order {self.order} to {order}")
        vals = {a: v for a, v in self.values.items() if sum(a) <= order}
        return MomentSequence(self.dim, order, vals, self.provenance, self.kind)

    # -- serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        basis = enumerate_basis(self.dim, self.order)
        return {
            "schema_version": SCHEMA_VERSION,
            "domain": self.provenance,
            "d": self.dim,
            "order": self.order,
            "kind": self.kind,
            "moments": [{"alpha": list(a), "value": _value_text(self.values[a])}
                        for a in basis],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "MomentSequence":
        kind = data.get("kind", EXACT)
        parse = Fraction if kind == EXACT else float
        vals = {tuple(m["alpha"]): parse(m["value"]) for m in data["moments"]}
        return cls(data["d"], data["order"], vals, data.get("domain", "custom"), kind)

    @classmethod
    def from_json(cls, text: str) -> "MomentSequence":
        return cls.from_dict(json.loads(text))


def _value_text(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return repr(float(v))


def custom_moments(dim: int, order: int, values: Mapping, kind: str = FLOAT) -> MomentSequence:
    """Raw moment sequence; every ``|alpha| <= order`` must be present."""
    vals = {}
    for alpha in enumerate_basis(dim, order):
        if alpha not in values:
            raise OrderExhaustedError(f"missing moment {alpha}")
        vals[alpha] = coerce(values[alpha], kind)
    return MomentSequence(dim, order, vals, "custom", kind)


# ---------------------------------------------------------------------------
# closed-form moments

def _sphere_projection_moment(alpha: MultiIndex, ambient: int) -> Fraction:
    # E[y^alpha] for y uniform on the unit sphere of R^ambient, alpha padded with zeros
    if any(a % 2 for a in alpha):
        return Fraction(0)
    num = Fraction(1)
    for a in alpha:
        num *= pochhammer(HALF, a // 2)
    return num / pochhammer(Fraction(ambient, 2), sum(alpha) // 2)


def _ball_equilibrium(alpha: MultiIndex) -> Fraction:
    return _sphere_projection_moment(alpha, len(alpha) + 1)


def _simplex_equilibrium(alpha: MultiIndex) -> Fraction:
    d = len(alpha)
    num = Fraction(1)
    for a in alpha:
        num *= pochhammer(HALF, a)
    return num / pochhammer(Fraction(d + 1, 2), sum(alpha))


def _cube_equilibrium(alpha: MultiIndex) -> Fraction:
    out = Fraction(1)
    for a in alpha:
        if a % 2:
            return Fraction(0)
        out *= pochhammer(HALF, a // 2) / factorial(a // 2)
    return out


def _ball_uniform(alpha: MultiIndex) -> Fraction:
    # uniform on B^d is the projection of the uniform measure on S^{d+1}
    return _sphere_projection_moment(alpha, len(alpha) + 2)


def _simplex_uniform(alpha: MultiIndex) -> Fraction:
    d = len(alpha)
    num = 1
    for a in alpha:
        num *= factorial(a)
    return Fraction(num * factorial(d), factorial(sum(alpha) + d))


def _cube_uniform(alpha: MultiIndex) -> Fraction:
    out = Fraction(1)
    for a in alpha:
        if a % 2:
            return Fraction(0)
        out /= a + 1
    return out


_EQUILIBRIUM = {"ball": _ball_equilibrium, "simplex": _simplex_equilibrium,
                "cube": _cube_equilibrium}
_UNIFORM = {"ball": _ball_uniform, "simplex": _simplex_uniform, "cube": _cube_uniform}


def _build(table, tag, domain, d, order) -> MomentSequence:
    if domain not in table:
        raise ValueError(f"unknown domain {domain!r}")
    if d < 1 or order < 0:
        raise ValueError(f"need d >= 1 and order >= 0, got d={d}, order={order}")
    f = table[domain]
    vals = {alpha: f(alpha) for alpha in enumerate_basis(d, order)}
    return MomentSequence(d, order, vals, f"{domain}-{tag}")


@lru_cache(maxsize=256)
def equilibrium_moments(domain: str, d: int, order: int) -> MomentSequence:
    """Exact moments up to total degree ``order`` of the probability
    equilibrium measure of the ball, simplex or cube."""
    return _build(_EQUILIBRIUM, "equilibrium", domain, d, order)


def uniform_moments(domain: str, d: int, order: int) -> MomentSequence:
    """Exact moments of the uniform probability measure on the domain."""
    return _build(_UNIFORM, "uniform", domain, d, order)


# ---------------------------------------------------------------------------
# transformations

def localize(phi: MomentSequence, g: Polynomial) -> MomentSequence:
    """The shifted functional ``(g.phi)_alpha = sum_beta g_beta phi_{alpha+beta}``.

    The result is not renormalized.
    """
    if g.dim != phi.dim:
        raise ValueError(f"dim {g.dim} vs {phi.dim}")
    dg = g.degree()
    if dg > phi.order:
        raise OrderExhaustedError(f"deg g = {dg} exceeds moment order {phi.order}")
    if dg < 0:
        raise ValueError("cannot localize by the zero polynomial")
    if g.kind != phi.kind:
        if phi.kind != FLOAT:
            raise KindMismatchError("float generator against exact moments")
        g = g.to_float()
    order = phi.order - dg
    items = list(g.items())
    vals = {}
    for alpha in enumerate_basis(phi.dim, order):
        total = coerce(0, phi.kind)
        for beta, c in items:
            total += c * phi.values[add(alpha, beta)]
        vals[alpha] = total
    return MomentSequence(phi.dim, order, vals, f"localized({g.to_text()}, {phi.provenance})",
                          phi.kind)


def scale(phi: MomentSequence, gamma) -> MomentSequence:
    if gamma <= 0:
        raise ValueError(f"scale factor must be positive, got {gamma}")
    gamma = coerce(gamma, phi.kind)
    return MomentSequence(phi.dim, phi.order, {a: v * gamma for a, v in phi.values.items()},
                          phi.provenance, phi.kind)
