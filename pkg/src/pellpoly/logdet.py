"""Log-determinant moment problem and its dual Gram matrices.

The primal problem minimizes

    f(phi) = -sum_g log det M_{n - t_g}(g . phi)

over truncated moment vectors ``phi`` of order ``2n`` with ``phi_0 = 1``.
Each localizing matrix is affine in ``phi``, ``M_g(phi) = sum_alpha phi_alpha
A_{g,alpha}``, so the gradient and Hessian are traces of products of
``M_g^{-1}`` with the constant slices ``A_{g,alpha}``.  The dual Gram
matrices are ``Q_g = M_g(phi*)^{-1}``.

Stationarity says that every non-constant coefficient of
``sum_g g(x) v(x)^T Q_g v(x)`` vanishes, which is the partition identity
with constant ``sum_g s(n - t_g)``.

For custom generator sets, compactness of the semialgebraic set is not
checked; without it the iteration may diverge.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .measures import SCHEMA_VERSION, MomentSequence, equilibrium_moments, uniform_moments
from .momentmat import NotPDError, SymMatrix, monomial_vector
from .multiindex import enumerate_basis, s
from .polyring import DOMAINS, FLOAT, GeneratorSet, make_generators, truncated_cube_generators

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 200
ARMIJO = 1e-4
MAX_HALVINGS = 60
# below this relative Newton decrement, f is flat at double precision
DECREMENT_RTOL = 1e-14
POLISH_STEPS = 2


class ConvergenceError(RuntimeError):
    """No convergence (iteration cap or stalled line search); ``report``
    holds the last iterate."""

    def __init__(self, message: str, report: "SolveReport"):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class ProblemSpec:
    """Data of the primal problem; ``domain`` is the geometric domain used
    for sampling and for the equilibrium comparison (``None`` if unknown)."""

    d: int
    n: int
    generators: GeneratorSet
    domain: str | None = None
    kind: str = FLOAT

    def __post_init__(self):
        if self.d < 1 or self.n < 0:
            raise ValueError(f"need d >= 1 and n >= 0, got d={self.d}, n={self.n}")
        if self.generators.dim != self.d:
            raise ValueError("generator dimension does not match d")
        if not any(g.is_unit for g in self.generators):
            raise ValueError("generator set must contain the unit generator")
        for g in self.generators:
            if g.half_degree > self.n:
                raise ValueError(f"generator {g.label} has t_g = {g.half_degree} > n = {self.n}")
        if self.domain is not None and self.domain not in DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")

    @classmethod
    def for_domain(cls, domain: str, d: int, n: int, truncated: bool = False) -> "ProblemSpec":
        if truncated:
            if domain != "cube":
                raise ValueError("the truncated generator set is defined for the cube only")
            gens = truncated_cube_generators(d)
            gens = GeneratorSet(gens.domain, d,
                                tuple(g for g in gens if g.half_degree <= n))
        else:
            gens = make_generators(domain, d, n)
        return cls(d, n, gens, domain)

    @property
    def partition_constant(self) -> int:
        return sum(s(self.n - g.half_degree, self.d) for g in self.generators)


@dataclass
class SolveReport:
    spec: ProblemSpec = field(repr=False)
    phi_star: MomentSequence = field(repr=False)
    objective: float
    gradient_norm: float
    iterations: int
    converged: bool
    stop_reason: str
    Q_star: dict = field(repr=False)
    trace: list = field(repr=False)
    partition_residual: float | None = None
    equilibrium_deviation: float | None = None

    @property
    def dual_objective(self) -> float:
        """``sum_g log det Q_g``; equals ``objective`` since ``Q_g = M_g^{-1}``."""
        return float(sum(np.linalg.slogdet(np.array(Q.rows))[1] for Q in self.Q_star.values()))

    def to_dict(self) -> dict:
        phi = self.phi_star.to_dict()
        return {
            "schema_version": SCHEMA_VERSION,
            "domain": self.spec.domain,
            "d": self.spec.d,
            "n": self.spec.n,
            "generators": self.spec.generators.labels(),
            "converged": self.converged,
            "stop_reason": self.stop_reason,
            "iterations": self.iterations,
            "objective": self.objective,
            "dual_objective": self.dual_objective,
            "gradient_norm": self.gradient_norm,
            "partition_constant": self.spec.partition_constant,
            "partition_residual": self.partition_residual,
            "equilibrium_deviation": self.equilibrium_deviation,
            "objective_trace": self.trace,
            "moments": phi["moments"],
            "gram": {label: Q.to_dict() for label, Q in self.Q_star.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# ---------------------------------------------------------------------------
# affine matrix maps

class _Problem:
    def __init__(self, spec: ProblemSpec):
        self.spec = spec
        d, n = spec.d, spec.n
        self.full = enumerate_basis(d, 2 * n)
        N = len(self.full)
        self.blocks = []
        for g in spec.generators:
            basis = enumerate_basis(d, n - g.half_degree)
            m = len(basis)
            A = np.zeros((N, m, m))
            coeffs = [(beta, float(c)) for beta, c in g.poly.items()]
            for i, a in enumerate(basis):
                for j in range(i, m):
                    b = basis[j]
                    for beta, c in coeffs:
                        k = self.full.index(tuple(x + y + z for x, y, z in zip(a, b, beta)))
                        A[k, i, j] += c
                        if i != j:
                            A[k, j, i] += c
            self.blocks.append((g, basis, A))

    def matrices(self, phi: np.ndarray) -> list[np.ndarray]:
        return [np.tensordot(phi, A, axes=1) for _, _, A in self.blocks]

    def objective(self, phi: np.ndarray) -> float | None:
        """``f(phi)``, or ``None`` outside the PD cone."""
        total = 0.0
        for M in self.matrices(phi):
            try:
                C = np.linalg.cholesky(M)
            except np.linalg.LinAlgError:
                return None
            total -= 2.0 * float(np.sum(np.log(np.diag(C))))
        return total

    def derivatives(self, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Gradient and Hessian in the free coordinates ``alpha != 0``."""
        N = len(self.full)
        grad = np.zeros(N)
        hess = np.zeros((N, N))
        for M, (_, _, A) in zip(self.matrices(phi), self.blocks):
            Minv = np.linalg.inv(M)
            Minv = (Minv + Minv.T) / 2
            B = np.einsum("ij,ajk->aik", Minv, A)
            grad -= np.einsum("aii->a", B)
            hess += np.einsum("aij,bji->ab", B, B)
        return grad[1:], hess[1:, 1:]


def _as_vector(phi: MomentSequence, full) -> np.ndarray:
    if phi.dim != full.dim or phi.order < full.degree:
        raise ValueError("initial moments do not cover the required order")
    return np.array([float(phi[a]) for a in full])


def primal_solve(spec: ProblemSpec, init: MomentSequence | None = None,
                 tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> SolveReport:
    """Damped Newton on the affine slice ``phi_0 = 1``.

    Stops when the gradient norm is at most ``tol``, or after two full
    Newton steps taken once the Newton decrement is below the double
    precision resolution of the objective (the gradient then sits at its
    rounding floor, which grows with ``n``).

    The default start is the uniform probability measure of ``spec.domain``.
    Raises :class:`NotPDError` for an infeasible start and
    :class:`ConvergenceError` past ``max_iter`` iterations.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    prob = _Problem(spec)
    if init is None:
        if spec.domain is None:
            raise ValueError("an initial moment sequence is required for custom problems")
        init = uniform_moments(spec.domain, spec.d, 2 * spec.n)
    phi = _as_vector(init, prob.full)
    phi[0] = 1.0
    f = prob.objective(phi)
    if f is None:
        raise NotPDError("initial moments are not strictly feasible")
    trace = [f]
    gnorm = math.inf
    it = polished = 0
    reason = "iteration cap"
    while True:
        grad, hess = prob.derivatives(phi)
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= tol:
            reason = "gradient"
            break
        if polished >= POLISH_STEPS:
            reason = "decrement"
            break
        if it >= max_iter:
            break
        it += 1
        try:
            step = -np.linalg.solve(hess, grad)
            if not np.all(np.isfinite(step)) or grad @ step >= 0:
                raise np.linalg.LinAlgError("not a descent direction")
            newton = True
        except np.linalg.LinAlgError:
            step, newton = -grad, False
        slope = float(grad @ step)
        if newton and -slope / 2 <= DECREMENT_RTOL * max(1.0, abs(f)):
            # quadratic regime: the decrease is invisible in f, take full steps
            trial = phi.copy()
            trial[1:] += step
            ft = prob.objective(trial)
            if ft is not None:
                phi, f = trial, ft
                trace.append(f)
                polished += 1
                continue
        t = 1.0
        for _ in range(MAX_HALVINGS):
            trial = phi.copy()
            trial[1:] += t * step
            ft = prob.objective(trial)
            if ft is not None and ft <= f + ARMIJO * t * slope:
                break
            t /= 2
        else:
            reason = "line search"
            break
        phi, f = trial, ft
        trace.append(f)
    converged = reason in ("gradient", "decrement")
    report = _finish(spec, prob, phi, f, gnorm, it, converged, reason, trace)
    if not converged:
        raise ConvergenceError(f"no convergence after {it} iterations (|grad| = {gnorm:.3e})",
                               report)
    return report


def _finish(spec, prob, phi, f, gnorm, it, converged, reason, trace) -> SolveReport:
    values = {a: float(v) for a, v in zip(prob.full, phi)}
    phi_star = MomentSequence(spec.d, 2 * spec.n, values,
                              f"logdet({spec.domain or 'custom'})", FLOAT)
    Q = {}
    for M, (g, basis, _) in zip(prob.matrices(phi), prob.blocks):
        Minv = np.linalg.inv(M)
        Minv = (Minv + Minv.T) / 2
        Q[g.label] = SymMatrix(basis, tuple(tuple(float(v) for v in row) for row in Minv), FLOAT)
    report = SolveReport(spec, phi_star, f, gnorm, it, converged, reason, Q, trace)
    report.partition_residual = partition_residual(report, default_samples(spec))
    if spec.domain is not None:
        report.equilibrium_deviation = equilibrium_deviation(report, spec.domain)
    return report


def dual_extract(report: SolveReport) -> dict[str, SymMatrix]:
    """``Q_g = M_{n - t_g}(g . phi*)^{-1}`` for every generator."""
    if not report.converged:
        raise ValueError("solve did not converge")
    prob = _Problem(report.spec)
    phi = _as_vector(report.phi_star, prob.full)
    out = {}
    for M, (g, basis, _) in zip(prob.matrices(phi), prob.blocks):
        try:
            np.linalg.cholesky(M)
        except np.linalg.LinAlgError:
            raise NotPDError(f"localizing matrix of {g.label} is not positive definite") from None
        Minv = np.linalg.inv(M)
        Minv = (Minv + Minv.T) / 2
        out[g.label] = SymMatrix(basis, tuple(tuple(float(v) for v in row) for row in Minv), FLOAT)
    return out


def partition_sum(report: SolveReport, x: Sequence) -> float:
    """``sum_g g(x) v(x)^T Q_g v(x)``."""
    total = 0.0
    for g in report.spec.generators:
        Q = report.Q_star[g.label]
        v = np.array(monomial_vector(Q.basis, x, FLOAT))
        total += float(g.poly.to_float()(tuple(float(c) for c in x))) * float(v @ np.array(Q.rows) @ v)
    return total


def partition_residual(report: SolveReport, samples: Sequence[Sequence]) -> float:
    c = report.spec.partition_constant
    return max((abs(partition_sum(report, x) - c) for x in samples), default=0.0)


def equilibrium_deviation(report: SolveReport, domain: str) -> float:
    """``max |phi*_alpha - mu_alpha|`` against the exact equilibrium moments."""
    spec = report.spec
    mu = equilibrium_moments(domain, spec.d, 2 * spec.n)
    return max(abs(report.phi_star[a] - float(mu[a])) for a in enumerate_basis(spec.d, 2 * spec.n))


def default_samples(spec: ProblemSpec, count: int = 100, seed: int = 0) -> list[tuple]:
    """Deterministic points where every generator is nonnegative."""
    rng = random.Random(seed)
    gens = [g.poly.to_float() for g in spec.generators]
    lo = 0.0 if spec.domain == "simplex" else -1.0
    out = []
    for _ in range(100 * count):
        if len(out) == count:
            break
        x = tuple(rng.uniform(lo, 1.0) for _ in range(spec.d))
        if spec.domain == "ball" and sum(c * c for c in x) > 1:
            continue
        if spec.domain == "simplex" and sum(x) > 1:
            continue
        if all(g(x) >= 0 for g in gens):
            out.append(x)
    return out


def christoffel_ratio(report: SolveReport, x: Sequence) -> float:
    """``s(n) * Lambda_n^{phi*}(x)``, which tends to 1 inside the domain."""
    spec = report.spec
    unit = next(g for g in spec.generators if g.is_unit)
    Q = report.Q_star[unit.label]
    v = np.array(monomial_vector(Q.basis, x, FLOAT))
    return s(spec.n, spec.d) / float(v @ np.array(Q.rows) @ v)


def trend_check(degrees: Sequence[int] = (2, 4, 6), points: Sequence[float] = (-0.5, -0.2, 0.1, 0.3, 0.6)
                ) -> list[tuple[int, float]]:
    """``(n, max |s(n) Lambda_n(x) - 1|)`` for the one-dimensional truncated cube."""
    out = []
    for n in degrees:
        rep = primal_solve(ProblemSpec.for_domain("cube", 1, n, truncated=True))
        out.append((n, max(abs(christoffel_ratio(rep, (x,)) - 1) for x in points)))
    return out
