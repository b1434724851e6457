"""Sparse multivariate polynomials over exact rationals or binary floats.

A :class:`Polynomial` maps exponent tuples to nonzero coefficients.  The
scalar kind is fixed per polynomial: ``"exact"`` stores
:class:`fractions.Fraction` values, ``"float"`` stores Python floats.
Mixing kinds in arithmetic is an error; convert explicitly with
:meth:`Polynomial.to_float`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .multiindex import MultiIndex, graded_key

EXACT = "exact"
FLOAT = "float"
KINDS = (EXACT, FLOAT)


class KindMismatchError(TypeError):
    """Operands carry different scalar kinds."""


class DimensionMismatchError(ValueError):
    """Operands live in different numbers of variables."""


def coerce(value, kind: str):
    """Convert ``value`` to the scalar type of ``kind``.

    Floats are refused in exact kind, since silently rationalising a
    binary float hides rounding that already happened.
    """
    if kind == EXACT:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        raise KindMismatchError(f"cannot use {type(value).__name__} in exact kind")
    if kind == FLOAT:
        out = float(value)
        if math.isnan(out):
            raise ValueError("NaN coefficient")
        return out
    raise ValueError(f"unknown scalar kind {kind!r}")


def _check_point(point: Sequence, dim: int, kind: str) -> list:
    if len(point) != dim:
        raise DimensionMismatchError(f"point has {len(point)} coordinates, expected {dim}")
    return [coerce(c, kind) for c in point]


class Polynomial:
    """Immutable sparse polynomial in ``dim`` variables."""

    __slots__ = ("dim", "kind", "_terms")

    def __init__(self, dim: int, terms: Mapping[MultiIndex, object] | None = None,
                 kind: str = EXACT):
        if kind not in KINDS:
            raise ValueError(f"unknown scalar kind {kind!r}")
        self.dim = dim
        self.kind = kind
        clean = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(alpha)
            if len(alpha) != dim or any(a < 0 for a in alpha):
                raise DimensionMismatchError(f"bad exponent {alpha} for dim {dim}")
            c = coerce(c, kind)
            if c != 0:
                clean[alpha] = clean.get(alpha, 0) + c
        self._terms = {a: c for a, c in clean.items() if c != 0}

    @classmethod
    def _raw(cls, dim, terms, kind):
        # trusted constructor: terms already pruned and coerced
        p = cls.__new__(cls)
        p.dim, p.kind, p._terms = dim, kind, terms
        return p

    # -- constructors -------------------------------------------------------
    @classmethod
    def constant(cls, value, dim: int, kind: str = EXACT) -> "Polynomial":
        return cls(dim, {(0,) * dim: value}, kind)

    @classmethod
    def zero(cls, dim: int, kind: str = EXACT) -> "Polynomial":
        return cls(dim, {}, kind)

    @classmethod
    def variable(cls, i: int, dim: int, kind: str = EXACT) -> "Polynomial":
        """The coordinate ``x_{i+1}`` (``i`` is zero-based)."""
        alpha = [0] * dim
        alpha[i] = 1
        return cls(dim, {tuple(alpha): 1}, kind)

    @classmethod
    def monomial(cls, alpha: MultiIndex, coeff=1, kind: str = EXACT) -> "Polynomial":
        return cls(len(alpha), {tuple(alpha): coeff}, kind)

    # -- inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict[MultiIndex, object]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, alpha: MultiIndex):
        return self._terms.get(tuple(alpha), coerce(0, self.kind))

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(a) for a in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return self.degree() <= 0

    def max_abs_coeff(self):
        return max((abs(c) for c in self._terms.values()), default=coerce(0, self.kind))

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return (self.dim, self.kind, self._terms) == (other.dim, other.kind, other._terms)
        if isinstance(other, (int, float, Fraction)):
            return self._terms == Polynomial.constant(other, self.dim, self.kind)._terms
        return NotImplemented

    def __hash__(self):
        return hash((self.dim, self.kind, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        return f"Polynomial({self.to_text()!r}, dim={self.dim}, kind={self.kind!r})"

    # -- arithmetic ---------------------------------------------------------
    def _compatible(self, other: "Polynomial") -> None:
        if not isinstance(other, Polynomial):
            raise TypeError(f"expected Polynomial, got {type(other).__name__}")
        if other.kind != self.kind:
            raise KindMismatchError(f"{self.kind} vs {other.kind}")
        if other.dim != self.dim:
            raise DimensionMismatchError(f"dim {self.dim} vs {other.dim}")

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial.constant(other, self.dim, self.kind)

    def __add__(self, other) -> "Polynomial":
        other = self._lift(other)
        self._compatible(other)
        out = dict(self._terms)
        for a, c in other._terms.items():
            v = out.get(a, 0) + c
            if v:
                out[a] = v
            else:
                out.pop(a, None)
        return Polynomial._raw(self.dim, out, self.kind)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.dim, {a: -c for a, c in self._terms.items()}, self.kind)

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._lift(other) - self

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._compatible(other)
        out: dict = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                key = tuple(x + y for x, y in zip(a, b))
                out[key] = out.get(key, 0) + ca * cb
        return Polynomial._raw(self.dim, {k: v for k, v in out.items() if v}, self.kind)

    def __rmul__(self, other) -> "Polynomial":
        return self.scale(other)

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(1, self.dim, self.kind)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c) -> "Polynomial":
        c = coerce(c, self.kind)
        if c == 0:
            return Polynomial.zero(self.dim, self.kind)
        return Polynomial._raw(self.dim, {a: v * c for a, v in self._terms.items()}, self.kind)

    # -- evaluation ---------------------------------------------------------
    def __call__(self, point: Sequence):
        return self.eval(point)

    def eval(self, point: Sequence):
        """Evaluate term by term; exact when the kind is exact."""
        x = _check_point(point, self.dim, self.kind)
        deg = self.degree()
        powers = []
        for xi in x:
            row = [coerce(1, self.kind)]
            for _ in range(max(deg, 0)):
                row.append(row[-1] * xi)
            powers.append(row)
        total = coerce(0, self.kind)
        for alpha, c in self._terms.items():
            term = c
            for i, a in enumerate(alpha):
                if a:
                    term = term * powers[i][a]
            total += term
        if self.kind == FLOAT and math.isnan(total):
            raise ValueError("NaN during evaluation")
        return total

    def to_float(self) -> "Polynomial":
        if self.kind == FLOAT:
            return self
        return Polynomial(self.dim, {a: float(c) for a, c in self._terms.items()}, FLOAT)

    # -- text form ----------------------------------------------------------
    def sorted_terms(self) -> list[tuple[MultiIndex, object]]:
        return sorted(self._terms.items(), key=lambda t: graded_key(t[0]))

    def to_text(self) -> str:
        """Canonical text, e.g. ``"1 + 3*x1^2 + 3*x2^2"``."""
        if not self._terms:
            return "0"
        parts = []
        for alpha, c in self.sorted_terms():
            mono = "*".join(
                f"x{i + 1}" if a == 1 else f"x{i + 1}^{a}"
                for i, a in enumerate(alpha) if a
            )
            mag = abs(c)
            mag_s = _scalar_text(mag)
            if not mono:
                body = mag_s
            elif mag == 1:
                body = mono
            else:
                body = f"{mag_s}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    @classmethod
    def from_text(cls, text: str, dim: int, kind: str = EXACT) -> "Polynomial":
        """Parse the form produced by :meth:`to_text`."""
        text = text.strip()
        if text == "0":
            return cls.zero(dim, kind)
        tokens = re.split(r"\s+([+-])\s+", text)
        signed = [("+", tokens[0])] + list(zip(tokens[1::2], tokens[2::2]))
        terms: dict = {}
        for sign, body in signed:
            if body.startswith("-"):
                sign = "-" if sign == "+" else "+"
                body = body[1:]
            coeff = "1"
            alpha = [0] * dim
            for factor in body.split("*"):
                m = _VAR.fullmatch(factor)
                if m:
                    i = int(m.group(1)) - 1
                    if not 0 <= i < dim:
                        raise DimensionMismatchError(f"variable x{i + 1} outside dim {dim}")
                    alpha[i] += int(m.group(2) or 1)
                else:
                    coeff = factor
            value = Fraction(coeff) if kind == EXACT else float(coeff)
            if sign == "-":
                value = -value
            key = tuple(alpha)
            terms[key] = terms.get(key, 0) + value
        return cls(dim, terms, kind)


_VAR = re.compile(r"x(\d+)(?:\^(\d+))?")


def _scalar_text(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return repr(float(c))


def poly_arith(a: Polynomial, b, op: str) -> Polynomial:
    """Functional entry point: ``op`` is one of add, sub, mul, scale."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(b)
    raise ValueError(f"unknown op {op!r}")


def eval_poly(p: Polynomial, x: Sequence):
    return p.eval(x)


# ---------------------------------------------------------------------------
# domain generators

DOMAINS = ("ball", "simplex", "cube")


@dataclass(frozen=True)
class Generator:
    label: str
    poly: Polynomial
    half_degree: int
    eps: tuple[int, ...] | None = None

    @property
    def is_unit(self) -> bool:
        return self.poly.degree() == 0 and self.poly.coefficient((0,) * self.poly.dim) == 1


@dataclass(frozen=True)
class GeneratorSet:
    domain: str
    dim: int
    generators: tuple[Generator, ...]

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def labels(self) -> list[str]:
        return [g.label for g in self.generators]


def half_degree(p: Polynomial) -> int:
    return max(0, math.ceil(p.degree() / 2))


def ball_generator(d: int, kind: str = EXACT) -> Polynomial:
    one = Polynomial.constant(1, d, kind)
    return one - sum((Polynomial.variable(i, d, kind) ** 2 for i in range(d)),
                     Polynomial.zero(d, kind))


def simplex_generator(eps: Sequence[int], kind: str = EXACT) -> Polynomial:
    """``x_1^e_1 ... x_d^e_d (1 - |x|)^e_{d+1}`` for ``eps`` of length d+1."""
    d = len(eps) - 1
    alpha = tuple(eps[:d])
    out = Polynomial.monomial(alpha, 1, kind)
    if eps[d]:
        last = Polynomial.constant(1, d, kind) - sum(
            (Polynomial.variable(i, d, kind) for i in range(d)), Polynomial.zero(d, kind))
        out = out * last
    return out


def cube_generator(eps: Sequence[int], kind: str = EXACT) -> Polynomial:
    d = len(eps)
    out = Polynomial.constant(1, d, kind)
    for j, e in enumerate(eps):
        if e:
            out = out * (1 - Polynomial.variable(j, d, kind) ** 2)
    return out


def _eps_label(eps) -> str:
    return "".join(map(str, eps))


def make_generators(domain: str, d: int, n: int, kind: str = EXACT) -> GeneratorSet:
    """Generators ``g`` with ``t_g <= n``, unit generator first.

    ball: ``{1, 1-|x|^2}``; simplex: ``g_eps`` for ``eps in {0,1}^{d+1}`` with
    even ``|eps|``; cube: ``prod (1-x_j^2)^{eps_j}`` for ``eps in {0,1}^d``.
    Generators whose localizing matrix would have negative order at ``n``
    are left out.
    """
    if d < 1 or n < 0:
        raise ValueError(f"need d >= 1 and n >= 0, got d={d}, n={n}")
    gens: list[Generator] = []
    if domain == "ball":
        gens.append(Generator("1", Polynomial.constant(1, d, kind), 0, None))
        if n >= 1:
            gens.append(Generator("1-|x|^2", ball_generator(d, kind), 1, None))
    elif domain == "simplex":
        for eps in sorted(product((0, 1), repeat=d + 1), key=lambda e: (sum(e), [-x for x in e])):
            k = sum(eps)
            if k % 2 or k // 2 > n:
                continue
            gens.append(Generator(_eps_label(eps), simplex_generator(eps, kind), k // 2, eps))
    elif domain == "cube":
        for eps in sorted(product((0, 1), repeat=d), key=lambda e: (sum(e), [-x for x in e])):
            k = sum(eps)
            if k > n:
                continue
            gens.append(Generator(_eps_label(eps), cube_generator(eps, kind), k, eps))
    else:
        raise ValueError(f"unknown domain {domain!r}")
    return GeneratorSet(domain, d, tuple(gens))


def truncated_cube_generators(d: int, kind: str = EXACT) -> GeneratorSet:
    """``{1, 1-x_1^2, ..., 1-x_d^2}``: the cube without product generators."""
    gens = [Generator("0" * d, Polynomial.constant(1, d, kind), 0, (0,) * d)]
    for j in range(d):
        eps = tuple(int(i == j) for i in range(d))
        gens.append(Generator(_eps_label(eps), cube_generator(eps, kind), 1, eps))
    return GeneratorSet("custom", d, tuple(gens))


def custom_generators(polys: Iterable[Polynomial], labels: Iterable[str] | None = None) -> GeneratorSet:
    """Wrap user polynomials; the unit generator is prepended if missing."""
    polys = list(polys)
    if not polys:
        raise ValueError("empty generator list")
    d, kind = polys[0].dim, polys[0].kind
    labels = list(labels) if labels is not None else [p.to_text() for p in polys]
    gens = [Generator(lab, p, half_degree(p)) for lab, p in zip(labels, polys)]
    if not any(g.is_unit for g in gens):
        gens.insert(0, Generator("1", Polynomial.constant(1, d, kind), 0))
    return GeneratorSet("custom", d, tuple(gens))
