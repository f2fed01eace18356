"""Catalecticant matrices and the closed-form rank and dimension counts."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .symtensor import MonomialPower, SymTensor, monomials

__all__ = [
    "EXCEPTIONAL",
    "CatMatrix",
    "cat_matrix",
    "cat_rank",
    "dimension_gap",
    "generic_rank",
    "secant_dim",
]

# (m, n) pairs where the generic rank exceeds the naive count by one
EXCEPTIONAL = frozenset({(3, 4), (4, 2), (4, 3), (4, 4)})


@dataclass(frozen=True)
class CatMatrix:
    """Hankel-structured matrix ``(F_{alpha+beta})``.

    Rows are indexed by ``beta`` with ``|beta| <= rows_degree`` and columns
    by ``alpha`` with ``|alpha| <= cols_degree``, both in graded order.
    """

    n: int
    rows_degree: int
    cols_degree: int
    data: np.ndarray

    @property
    def row_index(self) -> tuple[MonomialPower, ...]:
        return monomials(self.n, self.rows_degree)

    @property
    def col_index(self) -> tuple[MonomialPower, ...]:
        return monomials(self.n, self.cols_degree)


def cat_matrix(F: SymTensor, k: int | None = None) -> CatMatrix:
    """Catalecticant of ``F`` with column degree ``k``.

    The default ``k = ceil(m/2)`` gives the most square one.
    """
    if k is None:
        k = (F.m + 1) // 2
    if not 0 <= k <= F.m:
        raise DomainError(f"k must be in 0..{F.m}, got {k}")
    rows = monomials(F.n, F.m - k)
    cols = monomials(F.n, k)
    data = np.array([[F[tuple(a + b for a, b in zip(alpha, beta))] for alpha in cols]
                     for beta in rows], dtype=complex)
    return CatMatrix(F.n, F.m - k, k, data)


def cat_rank(F: SymTensor, tol: float = 1e-8) -> int:
    """Numerical rank of the most square catalecticant.

    Counts singular values above ``tol * sigma_max``.  This is a lower bound
    for the border rank and hence for the symmetric rank.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    s = np.linalg.svd(cat_matrix(F).data, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def generic_rank(n: int, m: int) -> int:
    """Rank of a general tensor in ``S^m(C^{n+1})`` (Alexander-Hirschowitz).

    For ``m = 2`` the count does not apply; ``n + 1`` (a nonsingular
    quadric) is returned with a warning.
    """
    if m == 2:
        warnings.warn("generic_rank: m = 2 is outside the Alexander-Hirschowitz range; "
                      "returning n + 1", stacklevel=2)
        return n + 1
    if m < 2 or n < 1:
        raise DomainError(f"need n >= 1 and m >= 2, got n={n}, m={m}")
    base = -(-math.comb(n + m, m) // (n + 1))
    return base + (1 if (m, n) in EXCEPTIONAL else 0)


def secant_dim(n: int, m: int, r: int) -> int:
    """Projective dimension of the ``r``-th secant variety of the Veronese."""
    if r < 1:
        raise DomainError("r must be positive")
    full = math.comb(n + m, m) - 1
    if m == 2 and 2 <= r <= n:
        return math.comb(r + 1, 2) + r * (n + 1 - r) - 1
    if m == 3 and n == 4 and r == 7:
        return full - 1
    if m == 4 and 2 <= n <= 4 and r == math.comb(n + 2, 2) - 1:
        return full - 1
    return min(r * (n + 1) - 1, full)


def dimension_gap(n: int, m: int, r: int) -> int:
    """``d = r(n+1) - 1 - dim sigma_r``, never negative.

    Lengths above the generic rank are given ``d = 0``: no dimension count
    is used there.
    """
    if r < 1:
        raise DomainError("r must be positive")
    if m >= 3 and r > generic_rank(n, m):
        return 0
    return max(r * (n + 1) - 1 - secant_dim(n, m, r), 0)
