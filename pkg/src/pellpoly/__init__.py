"""Generalized Pell identities for Christoffel functions on the ball, simplex and cube."""

__version__ = "0.1.0"

from .multiindex import GradedBasis, binom, cube_lattice_count, enumerate_basis, s
from .polyring import (EXACT, FLOAT, Generator, GeneratorSet, Polynomial, custom_generators,
                       make_generators, truncated_cube_generators)
from .measures import MomentSequence, equilibrium_moments, localize, scale, uniform_moments
from .momentmat import (NotPDError, christoffel_poly, inverse, kernel_levels, ldl,
                        localizing_matrix, moment_matrix)
from .pell import (boundary_minimum_check, gamma, kernel_constant, pell_constant, verify_pell)

__all__ = [
    "__version__", "GradedBasis", "binom", "cube_lattice_count", "enumerate_basis", "s",
    "EXACT", "FLOAT", "Generator", "GeneratorSet", "Polynomial", "custom_generators",
    "make_generators", "truncated_cube_generators", "MomentSequence", "equilibrium_moments",
    "localize", "scale", "uniform_moments", "NotPDError", "christoffel_poly", "inverse",
    "kernel_levels", "ldl", "localizing_matrix", "moment_matrix", "boundary_minimum_check",
    "gamma", "kernel_constant", "pell_constant", "verify_pell",
]
