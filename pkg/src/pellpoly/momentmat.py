"""Moment and localizing matrices, LDL factorization, Christoffel polynomials.

Everything here is square-root free: the reciprocal Christoffel function
``v_n(x)^T M_n^{-1} v_n(x)`` is expanded from the exact inverse of the
moment matrix, which is obtained through unit-vector solves against its
LDL factors.  Orthonormal polynomials are never formed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .measures import SCHEMA_VERSION, MomentSequence, OrderExhaustedError, localize
from .multiindex import GradedBasis, MultiIndex, add, enumerate_basis
from .polyring import EXACT, FLOAT, Polynomial, coerce, half_degree

FLOAT_PIVOT_RTOL = 1e-12


class NotPDError(ArithmeticError):
    """A matrix expected to be positive definite is not."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class SymMatrix:
    """Dense symmetric matrix indexed by a graded monomial basis."""

    basis: GradedBasis
    rows: tuple[tuple, ...]
    kind: str = EXACT

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def tolist(self) -> list[list]:
        return [list(r) for r in self.rows]

    def to_dict(self) -> dict:
        fmt = str if self.kind == EXACT else (lambda v: repr(float(v)))
        return {
            "schema_version": SCHEMA_VERSION,
            "d": self.basis.dim,
            "degree": self.basis.degree,
            "kind": self.kind,
            "basis": [list(a) for a in self.basis],
            "entries": [[fmt(v) for v in row] for row in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "SymMatrix":
        from fractions import Fraction

        kind = data.get("kind", EXACT)
        parse = Fraction if kind == EXACT else float
        basis = enumerate_basis(data["d"], data["degree"])
        rows = tuple(tuple(parse(v) for v in row) for row in data["entries"])
        return cls(basis, rows, kind)


@dataclass(frozen=True)
class LdlFactors:
    """``M = L D L^T`` with unit lower-triangular ``L``."""

    L: tuple[tuple, ...]
    D: tuple
    kind: str = EXACT

    def reconstruct(self) -> list[list]:
        n = len(self.D)
        return [[sum((self.L[i][k] * self.D[k] * self.L[j][k] for k in range(min(i, j) + 1)),
                     coerce(0, self.kind))
                 for j in range(n)] for i in range(n)]


def moment_matrix(phi: MomentSequence, n: int) -> SymMatrix:
    """``M_n(phi)[alpha, beta] = phi_{alpha + beta}`` over the graded basis."""
    if n < 0:
        raise OrderExhaustedError(f"negative matrix order {n}")
    if phi.order < 2 * n:
        raise OrderExhaustedError(f"need moments of order {2 * n}, have {phi.order}")
    basis = enumerate_basis(phi.dim, n)
    vals = phi.values
    rows = tuple(tuple(vals[add(a, b)] for b in basis) for a in basis)
    return SymMatrix(basis, rows, phi.kind)


def localizing_matrix(phi: MomentSequence, g: Polynomial, n: int) -> SymMatrix:
    """``M_{n - t_g}(g . phi)`` with ``t_g = ceil(deg g / 2)``."""
    t = half_degree(g)
    if n < t:
        raise OrderExhaustedError(f"n = {n} below half degree {t} of the generator")
    return moment_matrix(localize(phi, g), n - t)


def ldl(M: SymMatrix | Sequence[Sequence], kind: str | None = None) -> LdlFactors:
    """Square-root-free factorization without pivoting.

    Raises :class:`NotPDError` at the first pivot that is not positive
    (exact kind) or falls below ``1e-12 * max|M_ij|`` (float kind).
    """
    if isinstance(M, SymMatrix):
        rows, kind = M.rows, M.kind
    else:
        rows = M
        kind = kind or EXACT
    n = len(rows)
    zero = coerce(0, kind)
    tol = zero
    if kind == FLOAT:
        tol = FLOAT_PIVOT_RTOL * max((abs(v) for r in rows for v in r), default=0.0)
    L = [[zero] * n for _ in range(n)]
    # E[i][k] = L[i][k] * D[k]
    E = [[zero] * n for _ in range(n)]
    D = [zero] * n
    nz: list[list[int]] = [[] for _ in range(n)]  # nonzero columns of row i of L (k < i)
    for j in range(n):
        rj, Ej = nz[j], E[j]
        Lj = L[j]
        dj = rows[j][j] - sum((Lj[k] * Ej[k] for k in rj), zero)
        if dj <= tol:
            raise NotPDError(f"pivot {j} is {dj}, matrix not positive definite", j)
        D[j] = dj
        L[j][j] = coerce(1, kind)
        for i in range(j + 1, n):
            Li = L[i]
            v = rows[i][j] - sum((Li[k] * Ej[k] for k in nz[i] if Lj[k]), zero)
            if v:
                E[i][j] = v
                Li[j] = v / dj
                nz[i].append(j)
    return LdlFactors(tuple(map(tuple, L)), tuple(D), kind)


def ldl_solve(F: LdlFactors, b: Sequence) -> list:
    n = len(F.D)
    L = F.L
    y = list(b)
    for i in range(n):
        Li = L[i]
        acc = y[i]
        for k in range(i):
            if Li[k] and y[k]:
                acc -= Li[k] * y[k]
        y[i] = acc
    x = [y[i] / F.D[i] for i in range(n)]
    for i in range(n - 1, -1, -1):
        acc = x[i]
        for k in range(i + 1, n):
            if L[k][i] and x[k]:
                acc -= L[k][i] * x[k]
        x[i] = acc
    return x


def inverse(M: SymMatrix) -> SymMatrix:
    """Inverse through ``size`` solves against unit vectors."""
    F = ldl(M)
    n = M.size
    zero, one = coerce(0, M.kind), coerce(1, M.kind)
    cols = []
    for j in range(n):
        e = [zero] * n
        e[j] = one
        cols.append(ldl_solve(F, e))
    # symmetrize from the lower triangle so the result is exactly symmetric in float kind
    rows = tuple(tuple(cols[min(i, j)][max(i, j)] for j in range(n)) for i in range(n))
    return SymMatrix(M.basis, rows, M.kind)


@dataclass(frozen=True)
class ChristoffelData:
    """Inverse moment matrix of ``phi`` at order ``n``, ready for kernel work."""

    phi: MomentSequence
    n: int
    inverse: SymMatrix

    @property
    def basis(self) -> GradedBasis:
        return self.inverse.basis

    def quadratic_poly(self) -> Polynomial:
        """``x -> v_n(x)^T M^{-1} v_n(x)`` expanded in monomials."""
        basis, rows = self.basis, self.inverse.rows
        coeffs: dict[MultiIndex, object] = {}
        for i, a in enumerate(basis):
            ri = rows[i]
            for j, b in enumerate(basis):
                c = ri[j]
                if c:
                    key = add(a, b)
                    coeffs[key] = coeffs.get(key, 0) + c
        return Polynomial(basis.dim, coeffs, self.inverse.kind)

    def bilinear(self, x: Sequence, y: Sequence):
        """``v_n(x)^T M^{-1} v_n(y)``."""
        kind = self.inverse.kind
        vx, vy = monomial_vector(self.basis, x, kind), monomial_vector(self.basis, y, kind)
        total = coerce(0, kind)
        for i, row in enumerate(self.inverse.rows):
            if not vx[i]:
                continue
            acc = coerce(0, kind)
            for j, c in enumerate(row):
                if c and vy[j]:
                    acc += c * vy[j]
            total += vx[i] * acc
        return total


def monomial_vector(basis: GradedBasis, x: Sequence, kind: str = EXACT) -> list:
    """``v_n(x)``: values of all basis monomials at ``x``."""
    x = [coerce(c, kind) for c in x]
    if len(x) != basis.dim:
        raise ValueError(f"point has {len(x)} coordinates, basis dim {basis.dim}")
    one = coerce(1, kind)
    powers = []
    for xi in x:
        row = [one]
        for _ in range(basis.degree):
            row.append(row[-1] * xi)
        powers.append(row)
    out = []
    for alpha in basis:
        v = one
        for i, a in enumerate(alpha):
            if a:
                v = v * powers[i][a]
        out.append(v)
    return out


def christoffel_data(phi: MomentSequence, n: int) -> ChristoffelData:
    return ChristoffelData(phi, n, inverse(moment_matrix(phi, n)))


def christoffel_poly(phi: MomentSequence, n: int) -> Polynomial:
    """Reciprocal Christoffel function ``Lambda_n^phi(x)^{-1}`` as a polynomial."""
    return christoffel_data(phi, n).quadratic_poly()


def kernel_level_poly(phi: MomentSequence, m: int) -> Polynomial:
    """Diagonal of the degree-``m`` kernel: ``K_m(x,x) - K_{m-1}(x,x)``."""
    if m == 0:
        return christoffel_poly(phi, 0)
    return christoffel_poly(phi, m) - christoffel_poly(phi, m - 1)


def cd_kernel_eval(phi: MomentSequence, n: int, x: Sequence, y: Sequence):
    """Christoffel-Darboux kernel ``K_n(x, y)``."""
    return christoffel_data(phi, n).bilinear(x, y)


def sos_witness(phi: MomentSequence, n: int) -> LdlFactors:
    """LDL factors of ``M_n(phi)^{-1}``; a positive diagonal certifies that
    the reciprocal Christoffel polynomial is a sum of squares."""
    return ldl(inverse(moment_matrix(phi, n)))


def forward_vector(F: LdlFactors, basis: GradedBasis, x: Sequence) -> list:
    """``w = L^{-1} v_n(x)``; the entries are the monic orthogonal
    polynomials of the graded basis evaluated at ``x``."""
    w = monomial_vector(basis, x, F.kind)
    L = F.L
    for i in range(len(w)):
        Li = L[i]
        acc = w[i]
        for k in range(i):
            if Li[k] and w[k]:
                acc -= Li[k] * w[k]
        w[i] = acc
    return w


def kernel_levels(F: LdlFactors, basis: GradedBasis, x: Sequence, y: Sequence) -> list:
    """``[P_0(x,y), ..., P_n(x,y)]`` from the LDL factors of ``M_n``.

    The leading ``s(k)`` block of the factors is the factorization of
    ``M_k``, so level ``k`` is the degree-``k`` block of
    ``sum_i w_i(x) w_i(y) / D_i``.
    """
    wx = forward_vector(F, basis, x)
    wy = wx if x is y else forward_vector(F, basis, y)
    out = []
    for k in range(basis.degree + 1):
        total = coerce(0, F.kind)
        for i in basis.block(k):
            total += wx[i] * wy[i] / F.D[i]
        out.append(total)
    return out
