"""Multi-index combinatorics in graded lexicographic order."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator

MultiIndex = tuple[int, ...]


def binom(top: int, bottom: int) -> int:
    """Binomial coefficient, zero outside ``0 <= bottom <= top``."""
    if bottom < 0 or top < 0 or bottom > top:
        return 0
    return comb(top, bottom)


def s(n: int, d: int) -> int:
    """Number of monomials of degree at most ``n`` in ``d`` variables."""
    _check(n, d)
    return comb(d + n, d)


def dim_orthogonal_space(n: int, d: int) -> int:
    """Dimension of the orthogonal polynomials of exact degree ``n``."""
    _check(n, d)
    return comb(n + d - 1, n)


def cube_lattice_count(n: int, d: int) -> int:
    """Number of ``k`` in ``Z^d`` with ``|k_1| + ... + |k_d| = n``.

    Uses the closed binomial sum rather than enumeration.
    """
    _check(n, d)
    if n == 0:
        return 1
    return sum(
        comb(d, j) * (binom(d + n - j, d) - binom(d + n - 1 - j, d))
        for j in range(d + 1)
    )


def _check(n: int, d: int) -> None:
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")


def _block(d: int, k: int) -> Iterator[MultiIndex]:
    # exponents of total degree k, lexicographically decreasing (x1 greatest)
    if d == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in _block(d - 1, k - first):
            yield (first,) + rest


def graded_key(alpha: MultiIndex) -> tuple:
    """Sort key realising the graded lexicographic order used everywhere."""
    return (sum(alpha), tuple(-a for a in alpha))


@dataclass(frozen=True)
class GradedBasis:
    """Monomial exponents of degree <= ``degree`` in graded-lex order."""

    dim: int
    degree: int
    order: tuple[MultiIndex, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "_position", {alpha: i for i, alpha in enumerate(self.order)}
        )

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def __getitem__(self, i: int) -> MultiIndex:
        return self.order[i]

    def index(self, alpha: MultiIndex) -> int:
        return self._position[alpha]

    def __contains__(self, alpha) -> bool:
        return alpha in self._position

    def block(self, k: int) -> range:
        """Positions of the monomials of exact degree ``k``."""
        if k < 0:
            return range(0)
        start = comb(self.dim + k - 1, self.dim) if k > 0 else 0
        return range(start, comb(self.dim + k, self.dim))


@lru_cache(maxsize=None)
def enumerate_basis(d: int, n: int) -> GradedBasis:
    """All exponents ``alpha`` with ``|alpha| <= n``, graded-lex ordered.

    >>> enumerate_basis(2, 1).order
    ((0, 0), (1, 0), (0, 1))
    """
    _check(n, d)
    order = tuple(alpha for k in range(n + 1) for alpha in _block(d, k))
    return GradedBasis(d, n, order)


def add(alpha: MultiIndex, beta: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(alpha, beta))


def degree(alpha: MultiIndex) -> int:
    return sum(alpha)
