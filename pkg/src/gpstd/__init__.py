"""Symmetric tensor decomposition through generating polynomials."""

from .catalecticant import cat_matrix, cat_rank, dimension_gap, generic_rank, secant_dim
from .decompose import (
    Decomposition,
    assemble,
    decompose_all,
    decompose_numeric,
    decomposition_error,
    equivalent,
    nls_fit,
    reduce_length,
    weights_from_points,
)
from .errors import (
    DimensionError,
    DomainError,
    InconsistentSystem,
    NoConvergence,
    NumericalError,
    SingularVandermonde,
    StructureError,
)
from .genmat import basis_pair, companion, from_points, parameterize, recover_tensor
from .symtensor import Poly, SymTensor, from_rank_one_sum, from_uptri, norm, unitary_transform
from .syssolve import SolveConfig, all_solve, numeric_solve, random_affine
from .zerosolve import ZeroSet, cgt_zeros, stickelberger_check

__version__ = "0.1.0"
