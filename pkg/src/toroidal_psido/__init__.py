"""Pseudo-differential operators on the circle and the integer lattice.

Symbols with weighted class diagnostics, Galerkin quantization, composition
and adjoint expansions, parametrices, compactness and Garding diagnostics,
and a preconditioned Galerkin solver.
"""

from .calculus import compose, formal_adjoint, m_ellipticity, parametrix, parametrix_residual, strong_m_ellipticity
from .diagnostics import (
    compactness_verdict,
    garding_constants,
    garding_lattice,
    gohberg_d,
    sharp_garding_constant,
    sobolev_norm,
    weighted_l2_lattice_norm,
)
from .fourier_core import CoeffVector, GridFunction, forward_transform, inverse_transform, l2_norm
from .library import builtin_symbol, expression_symbol, symbol_from_spec
from .quantization import DenseOperator, apply, lattice_apply, matrix
from .solver import lambda0_estimate, solve
from .symbols import Symbol, check_M_membership, check_S_membership
from .weights import WeightFunction, bracket, power_bracket

__version__ = "0.1.0"

__all__ = [
    "CoeffVector",
    "DenseOperator",
    "GridFunction",
    "Symbol",
    "WeightFunction",
    "apply",
    "bracket",
    "builtin_symbol",
    "check_M_membership",
    "check_S_membership",
    "compactness_verdict",
    "compose",
    "expression_symbol",
    "formal_adjoint",
    "forward_transform",
    "garding_constants",
    "garding_lattice",
    "gohberg_d",
    "inverse_transform",
    "l2_norm",
    "lambda0_estimate",
    "lattice_apply",
    "m_ellipticity",
    "matrix",
    "parametrix",
    "parametrix_residual",
    "power_bracket",
    "sharp_garding_constant",
    "sobolev_norm",
    "solve",
    "strong_m_ellipticity",
    "symbol_from_spec",
    "weighted_l2_lattice_norm",
]
