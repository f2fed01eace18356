"""Generating matrices, their linear parameterization and companion matrices.

For the first ``r`` monomials ``B0`` (graded order) and their border ``B1``,
a matrix ``G`` indexed by ``B0 x B1`` encodes one polynomial per border
monomial::

    phi[G, alpha] = sum_{beta in B0} G(beta, alpha) x^beta - x^alpha

``G`` generates ``F`` when every ``phi[G, alpha] * x^gamma`` pairs to zero
with ``F``.  That is one linear system ``A[F, alpha] G(:, alpha) = b[F, alpha]``
per column, so the generating matrices of ``F`` form an affine space
``C + N(omega)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError, InconsistentSystem, SingularVandermonde, StructureError
from .symtensor import (
    MonomialPower,
    Poly,
    SymTensor,
    grlex_key,
    monomial_index,
    monomial_matrix,
    monomials,
    monomials_of_degree,
    norm,
)

__all__ = [
    "BasisPair",
    "CompanionSet",
    "GenMatrix",
    "GenMatrixParam",
    "basis_pair",
    "commutator_residual",
    "companion",
    "from_points",
    "gen_system",
    "is_generating",
    "parameterize",
    "recover_tensor",
]

log = logging.getLogger(__name__)


def _shift(alpha, i):
    out = list(alpha)
    out[i] += 1
    return tuple(out)


@dataclass(frozen=True)
class BasisPair:
    """``b0``: first ``r`` monomials in graded order; ``b1``: their border."""

    n: int
    b0: tuple
    b1: tuple

    @property
    def r(self) -> int:
        return len(self.b0)

    @cached_property
    def b0_index(self) -> dict:
        return {a: k for k, a in enumerate(self.b0)}

    @cached_property
    def b1_index(self) -> dict:
        return {a: k for k, a in enumerate(self.b1)}

    @cached_property
    def shifts(self):
        """Where ``x_i * x^nu`` lands for every ``i`` and ``nu`` in ``b0``.

        ``shifts[i][col] = ("b0", row)`` or ``("b1", border column)``.
        """
        out = []
        for i in range(self.n):
            row = []
            for nu in self.b0:
                target = _shift(nu, i)
                if target in self.b0_index:
                    row.append(("b0", self.b0_index[target]))
                else:
                    row.append(("b1", self.b1_index[target]))
            out.append(tuple(row))
        return tuple(out)

    @property
    def max_degree(self) -> int:
        return max(sum(a) for a in self.b1)


@lru_cache(maxsize=None)
def basis_pair(n: int, r: int) -> BasisPair:
    """The monomial basis ``B0`` of size ``r`` and its border ``B1``."""
    if n < 1 or r < 1:
        raise DomainError(f"need n >= 1 and r >= 1, got n={n}, r={r}")
    b0: list = []
    d = 0
    while len(b0) < r:
        b0.extend(monomials_of_degree(n, d)[: r - len(b0)])
        d += 1
    members = set(b0)
    border = {_shift(a, i) for a in b0 for i in range(n)} - members
    return BasisPair(n, tuple(b0), tuple(sorted(border, key=grlex_key)))


@dataclass(frozen=True)
class GenMatrix:
    """Matrix ``G`` indexed by ``basis.b0 x basis.b1``."""

    basis: BasisPair
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.shape != (self.basis.r, len(self.basis.b1)):
            raise DomainError(f"G must be {self.basis.r}x{len(self.basis.b1)}, got {data.shape}")
        object.__setattr__(self, "data", data)

    def column(self, alpha) -> np.ndarray:
        return self.data[:, self.basis.b1_index[tuple(alpha)]]

    def phi(self, alpha) -> Poly:
        """The polynomial ``phi[G, alpha]``."""
        alpha = tuple(alpha)
        terms = {beta: g for beta, g in zip(self.basis.b0, self.column(alpha))}
        return Poly(self.basis.n, terms) - Poly.monomial(alpha)

    def phi_values(self, points) -> np.ndarray:
        """``phi[G, alpha](v_i)`` for all points (rows) and border columns."""
        points = np.atleast_2d(points)
        return (monomial_matrix(points, self.basis.b0) @ self.data
                - monomial_matrix(points, self.basis.b1))


@dataclass(frozen=True)
class GenMatrixParam:
    """All generating matrices of a tensor: ``G(omega) = C + N(omega)``.

    ``null_bases[k]`` is an orthonormal basis of the kernel of
    ``A[F, b1[k]]``; ``omega`` concatenates the per-column coordinates in the
    order of ``basis.b1``.
    """

    basis: BasisPair
    c: GenMatrix
    null_bases: tuple
    residuals: tuple = field(default=())

    @property
    def omega_len(self) -> int:
        return int(sum(N.shape[1] for N in self.null_bases))

    @cached_property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum([N.shape[1] for N in self.null_bases])]).astype(int)

    def matrix(self, omega=None) -> GenMatrix:
        data = self.c.data.copy()
        if omega is not None and self.omega_len:
            omega = np.asarray(omega, dtype=complex)
            for k, N in enumerate(self.null_bases):
                lo, hi = self.offsets[k], self.offsets[k + 1]
                if hi > lo:
                    data[:, k] += N @ omega[lo:hi]
        return GenMatrix(self.basis, data)

    def project(self, G: GenMatrix) -> np.ndarray:
        """Least-squares ``omega`` with ``C + N(omega)`` closest to ``G``."""
        diff = np.asarray(G.data if isinstance(G, GenMatrix) else G) - self.c.data
        parts = [N.conj().T @ diff[:, k] for k, N in enumerate(self.null_bases)]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)


@dataclass(frozen=True)
class CompanionSet:
    """Multiplication matrices ``M_{x_1}(G), ..., M_{x_n}(G)`` on ``span(B0)``."""

    mats: tuple

    @property
    def n(self) -> int:
        return len(self.mats)

    @property
    def r(self) -> int:
        return self.mats[0].shape[0]


def gen_system(F: SymTensor, alpha: Sequence[int], basis: BasisPair):
    """``(A[F, alpha], b[F, alpha])``: the linear equations on ``G(:, alpha)``.

    Rows run over ``gamma`` in ``N^n_{m - |alpha|}``; ``A`` has entries
    ``F_{beta + gamma}`` for ``beta`` in ``B0`` and ``b`` has ``F_{alpha + gamma}``.
    """
    alpha = tuple(alpha)
    if sum(alpha) > F.m:
        raise DomainError(f"border monomial {alpha} has degree above m={F.m}; r is too large")
    index = monomial_index(F.n, F.m)
    gammas = monomials(F.n, F.m - sum(alpha))
    try:
        A = np.array([[F.data[index[tuple(b + g for b, g in zip(beta, gamma))]]
                       for beta in basis.b0] for gamma in gammas], dtype=complex)
    except KeyError:
        raise DomainError("B0 contains monomials above the tensor order") from None
    b = np.array([F.data[index[tuple(a + g for a, g in zip(alpha, gamma))]] for gamma in gammas],
                 dtype=complex)
    return A, b


def parameterize(F: SymTensor, r: int, tol: float = 1e-8, strict: bool = True) -> GenMatrixParam:
    """Affine parameterization of the generating matrices of ``F``.

    Each column gets the minimum-norm least-squares solution of its system
    and an orthonormal kernel basis from the SVD (relative threshold
    ``tol``).  With ``strict`` an inconsistent column raises
    :class:`InconsistentSystem`; otherwise the least-squares column is kept.
    """
    basis = basis_pair(F.n, r)
    if basis.max_degree > F.m:
        raise DomainError(f"r={r} needs border monomials of degree {basis.max_degree} > m={F.m}")
    scale = norm(F)
    cols, nulls, residuals = [], [], []
    for alpha in basis.b1:
        A, b = gen_system(F, alpha, basis)
        U, s, Vh = np.linalg.svd(A, full_matrices=True)
        rank = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
        c = Vh[:rank].conj().T @ ((U[:, :rank].conj().T @ b) / s[:rank])
        res = float(np.linalg.norm(A @ c - b))
        if strict and res > tol * max(scale, 1e-300):
            raise InconsistentSystem(
                f"A[F,{alpha}] g = b[F,{alpha}] is inconsistent (residual {res:.3g}); "
                "the rank is most likely larger than r, increase the value of r",
                alpha=alpha, residual=res)
        cols.append(c)
        nulls.append(Vh[rank:].conj().T.copy())
        residuals.append(res)
    C = GenMatrix(basis, np.column_stack(cols))
    return GenMatrixParam(basis, C, tuple(nulls), tuple(residuals))


def companion(G: GenMatrix) -> CompanionSet:
    """Companion matrices of ``phi[G]`` in the basis ``B0``.

    Column ``nu`` of ``M_{x_i}`` is the unit vector at ``nu + e_i`` when that
    monomial lies in ``B0``, and ``G(:, nu + e_i)`` when it lies in ``B1``.
    """
    basis = G.basis
    r = basis.r
    mats = []
    for row in basis.shifts:
        M = np.zeros((r, r), dtype=complex)
        for col, (kind, k) in enumerate(row):
            if kind == "b0":
                M[k, col] = 1.0
            else:
                M[:, col] = G.data[:, k]
        mats.append(M)
    return CompanionSet(tuple(mats))


def commutator_residual(cs: CompanionSet) -> np.ndarray:
    """Entries of ``M_i M_j - M_j M_i`` for ``i < j``, stacked."""
    blocks = [(Mi @ Mj - Mj @ Mi).ravel()
              for i, Mi in enumerate(cs.mats) for Mj in cs.mats[i + 1:]]
    return np.concatenate(blocks) if blocks else np.zeros(0, dtype=complex)


def from_points(points, basis: BasisPair, tol: float = 1e-10) -> GenMatrix:
    """The unique generating matrix whose polynomials vanish at ``points``.

    Solves ``V G = W`` where row ``i`` of ``V`` (resp. ``W``) lists the
    monomials of ``B0`` (resp. ``B1``) at the ``i``-th point.
    """
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    if points.shape != (basis.r, basis.n):
        raise DomainError(f"need {basis.r} points in C^{basis.n}, got shape {points.shape}")
    V = monomial_matrix(points, basis.b0)
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond * tol > 1:
        raise SingularVandermonde(f"points are not independent on B0 (cond {cond:.3g})", cond=cond)
    W = monomial_matrix(points, basis.b1)
    return GenMatrix(basis, np.linalg.solve(V, W))


def is_generating(F: SymTensor, G: GenMatrix, tol: float = 1e-8) -> bool:
    """Whether every ``<phi[G, alpha] x^gamma, F>`` vanishes to ``tol * ||F||``."""
    bound = tol * norm(F)
    for k, alpha in enumerate(G.basis.b1):
        A, b = gen_system(F, alpha, G.basis)
        if A.size and np.max(np.abs(A @ G.data[:, k] - b)) > bound:
            return False
    return True


def recover_tensor(G: GenMatrix, first_entries, n: int, m: int,
                   warn_tol: float = 1e-6) -> SymTensor:
    """Rebuild ``F`` from its ``B0`` entries and a generating matrix.

    Entries outside ``B0`` are filled in increasing graded order through
    ``F_{a + gamma} = sum_beta G(beta, a) F_{beta + gamma}`` using the smallest
    border monomial ``a`` dividing the target; the other divisors are
    evaluated as consistency checks.
    """
    basis = G.basis
    if basis.n != n:
        raise DomainError("generating matrix and tensor dimension differ")
    if isinstance(first_entries, Mapping):
        head = {tuple(k): complex(v) for k, v in first_entries.items()}
    else:
        head = dict(zip(basis.b0, (complex(v) for v in first_entries)))
    if set(head) != set(basis.b0):
        raise DomainError("first_entries must provide exactly the B0 entries")
    if max(sum(a) for a in basis.b0) > m:
        raise DomainError("B0 has monomials above the tensor order")

    known = dict(head)
    for alpha in monomials(n, m):
        if alpha in known:
            continue
        values = []
        for a in basis.b1:
            gamma = tuple(x - y for x, y in zip(alpha, a))
            if min(gamma) < 0:
                continue
            try:
                terms = [known[tuple(b + g for b, g in zip(beta, gamma))] for beta in basis.b0]
            except KeyError:
                continue
            values.append(complex(np.dot(G.column(a), terms)))
        if not values:
            raise StructureError(f"monomial {alpha} cannot be reached from the border of B0")
        known[alpha] = values[0]
        spread = max(abs(v - values[0]) for v in values)
        if spread > warn_tol * max(1.0, abs(values[0])):
            log.warning("recover_tensor: splittings of %s disagree by %.3g", alpha, spread)
    return SymTensor.from_terms(n, m, known)
