"""Symmetric tensors indexed by monomial powers.

A tensor ``F`` in ``S^m(C^{n+1})`` is stored through its entries ``F_alpha``
for ``alpha`` in ``N^n_m`` (exponent vectors of length ``n`` with
``|alpha| <= m``).  The entry ``F_{i_1...i_m}`` equals ``F_alpha`` where
``alpha_j`` counts how many of the indices equal ``j`` (index 0 is the
homogenizing variable ``x_0`` and does not appear in ``alpha``).

Entries are kept in graded order: lower degree first, and within one degree
in descending lexicographic order of the exponent vector, so that
``1, x1, x2, x1^2, x1 x2, x2^2, ...``.  This coincides with the
lexicographic order of the nondecreasing index tuples, i.e. the ``uptri``
listing of the tensor.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Tuple

import numpy as np

from .errors import DimensionError, DomainError

MonomialPower = Tuple[int, ...]

__all__ = [
    "MonomialPower",
    "Poly",
    "SymTensor",
    "apolar_apply",
    "entry_by_tuple",
    "from_rank_one_sum",
    "from_uptri",
    "grlex_key",
    "monomials",
    "monomials_of_degree",
    "norm",
    "pairing",
    "unitary_transform",
]


# -- monomial bookkeeping -------------------------------------------------

def grlex_key(alpha: Sequence[int]):
    """Sort key of the graded order used throughout the package."""
    return (sum(alpha), tuple(-a for a in alpha))


@lru_cache(maxsize=None)
def monomials_of_degree(n: int, d: int) -> Tuple[MonomialPower, ...]:
    """Exponent vectors in ``N^n`` of degree exactly ``d``, descending lex."""
    if n == 0:
        return ((),) if d == 0 else ()
    out = []
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(n - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def monomials(n: int, m: int) -> Tuple[MonomialPower, ...]:
    """All of ``N^n_m`` in graded order."""
    return tuple(a for d in range(m + 1) for a in monomials_of_degree(n, d))


@lru_cache(maxsize=None)
def monomial_index(n: int, m: int) -> dict:
    return {a: i for i, a in enumerate(monomials(n, m))}


@lru_cache(maxsize=None)
def _exponents(n: int, m: int) -> np.ndarray:
    """Homogeneous exponents ``(m - |alpha|, alpha)``, one row per entry."""
    alphas = np.array(monomials(n, m), dtype=int).reshape(-1, n)
    return np.column_stack([m - alphas.sum(axis=1), alphas])


@lru_cache(maxsize=None)
def _norm_weights(n: int, m: int) -> np.ndarray:
    """Number of index tuples ``(i_1..i_m)`` that map to each ``alpha``."""
    fact = [math.factorial(k) for k in range(m + 1)]
    return np.array([fact[m] / math.prod(fact[t] for t in row)
                     for row in _exponents(n, m)])


def _as_alpha(alpha, n: int) -> MonomialPower:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != n or any(a < 0 for a in alpha):
        raise DimensionError(f"expected {n} nonnegative exponents, got {alpha}")
    return alpha


def power_table(U: np.ndarray, m: int) -> np.ndarray:
    """``table[i, j, k] = U[i, j] ** k`` for ``k = 0..m``."""
    U = np.asarray(U, dtype=complex)
    table = np.empty(U.shape + (m + 1,), dtype=complex)
    table[..., 0] = 1.0
    for k in range(1, m + 1):
        table[..., k] = table[..., k - 1] * U
    return table


def rank_one_columns(U: np.ndarray, m: int) -> np.ndarray:
    """Matrix whose column ``i`` lists the entries of ``U[i]^{(x) m}``.

    Rows follow the graded order of ``N^n_m``.
    """
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    n = U.shape[1] - 1
    E = _exponents(n, m)
    table = power_table(U, m)
    cols = np.ones((E.shape[0], U.shape[0]), dtype=complex)
    for j in range(n + 1):
        cols *= table[:, j, :][:, E[:, j]].T
    return cols


def monomial_matrix(points: np.ndarray, alphas: Sequence[MonomialPower]) -> np.ndarray:
    """Rows ``[v]_alphas``: entry ``(i, k) = points[i] ** alphas[k]``."""
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    E = np.array(alphas, dtype=int).reshape(len(alphas), points.shape[1])
    deg = int(E.max()) if E.size else 0
    table = power_table(points, deg)
    out = np.ones((points.shape[0], len(alphas)), dtype=complex)
    for j in range(points.shape[1]):
        out *= table[:, j, :][:, E[:, j]]
    return out


# -- polynomials ----------------------------------------------------------

class Poly:
    """Sparse polynomial in ``x = (x_1, ..., x_n)`` with complex coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Sequence[int], complex] | None = None):
        self.n = int(n)
        clean = {}
        for alpha, c in (terms or {}).items():
            alpha = _as_alpha(alpha, self.n)
            c = complex(c)
            if c != 0:
                clean[alpha] = clean.get(alpha, 0) + c
        self.terms = {a: c for a, c in clean.items() if c != 0}

    @classmethod
    def monomial(cls, alpha: Sequence[int], coeff: complex = 1.0) -> "Poly":
        return cls(len(alpha), {tuple(alpha): coeff})

    @classmethod
    def constant(cls, n: int, c: complex = 1.0) -> "Poly":
        return cls(n, {(0,) * n: c})

    @property
    def degree(self) -> int:
        """Largest total degree of a term; ``-1`` for the zero polynomial."""
        return max((sum(a) for a in self.terms), default=-1)

    def coeff(self, alpha: Sequence[int]) -> complex:
        return self.terms.get(tuple(alpha), 0j)

    def __call__(self, x: Sequence[complex]) -> complex:
        x = np.asarray(x, dtype=complex)
        return complex(sum(c * np.prod(x ** np.array(a)) for a, c in self.terms.items()))

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.n, other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, 0) + c
        return Poly(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.n, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            other = complex(other)
            return Poly(self.n, {a: c * other for a, c in self.terms.items()})
        out: dict = {}
        for (a, c), (b, d) in itertools.product(self.terms.items(), other.terms.items()):
            key = tuple(i + j for i, j in zip(a, b))
            out[key] = out.get(key, 0) + c * d
        return Poly(self.n, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Poly) and self.n == other.n and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        parts = [f"({c:.6g})*x^{a}" for a, c in sorted(self.terms.items(), key=lambda t: grlex_key(t[0]))]
        return "Poly(" + " + ".join(parts) + ")"


# -- the tensor type -------------------------------------------------------

class SymTensor:
    """Symmetric tensor of order ``m`` on ``C^{n+1}``.

    ``data[k]`` is the entry at the ``k``-th monomial power of
    :func:`monomials` ``(n, m)``.  Instances are treated as immutable; the
    backing array is flagged read-only.  Order 0 (a scalar) is allowed so that
    :func:`apolar_apply` is closed for ``deg p = m``.
    """

    __slots__ = ("n", "m", "data")

    def __init__(self, n: int, m: int, data: Iterable[complex]):
        if n < 1 or m < 0:
            raise DomainError(f"need n >= 1 and m >= 0, got n={n}, m={m}")
        data = np.array(data, dtype=complex).reshape(-1)
        size = math.comb(n + m, m)
        if data.size != size:
            raise DimensionError(f"S^{m}(C^{n + 1}) has {size} entries, got {data.size}")
        data.flags.writeable = False
        self.n, self.m, self.data = int(n), int(m), data

    @classmethod
    def zeros(cls, n: int, m: int) -> "SymTensor":
        return cls(n, m, np.zeros(math.comb(n + m, m), dtype=complex))

    @classmethod
    def from_terms(cls, n: int, m: int, terms: Mapping[Sequence[int], complex]) -> "SymTensor":
        """Build from an ``alpha -> F_alpha`` map; missing entries are zero."""
        index = monomial_index(n, m)
        data = np.zeros(len(index), dtype=complex)
        for alpha, value in terms.items():
            alpha = _as_alpha(alpha, n)
            if alpha not in index:
                raise DimensionError(f"{alpha} has degree above {m}")
            data[index[alpha]] = value
        return cls(n, m, data)

    @classmethod
    def from_form(cls, n: int, m: int, coeffs: Mapping[Sequence[int], complex]) -> "SymTensor":
        """Tensor of a homogeneous form ``sum_theta c_theta x~^theta``.

        Keys are full exponents ``theta = (theta_0, ..., theta_n)`` with
        ``|theta| = m``.  Since the form of ``F`` is
        ``sum F_theta (m!/theta!) x~^theta``, the entry is
        ``c_theta theta! / m!``.
        """
        terms = {}
        for theta, c in coeffs.items():
            theta = tuple(int(t) for t in theta)
            if len(theta) != n + 1 or sum(theta) != m or min(theta) < 0:
                raise DimensionError(f"bad exponent {theta} for a form of degree {m}")
            w = math.factorial(m) / math.prod(math.factorial(t) for t in theta)
            terms[theta[1:]] = complex(c) / w
        return cls.from_terms(n, m, terms)

    @property
    def alphas(self) -> Tuple[MonomialPower, ...]:
        return monomials(self.n, self.m)

    def __getitem__(self, alpha) -> complex:
        try:
            return complex(self.data[monomial_index(self.n, self.m)[tuple(alpha)]])
        except KeyError:
            raise DimensionError(f"{alpha} is not in N^{self.n}_{self.m}") from None

    def uptri(self) -> np.ndarray:
        """Upper triangular entries, lexicographic in ``(i_1 <= ... <= i_m)``."""
        return self.data.copy()

    def full(self) -> np.ndarray:
        """The whole ``(n+1)^m`` array (desk-scale sizes only)."""
        n, m = self.n, self.m
        index = monomial_index(n, m)
        out = np.empty((n + 1,) * m, dtype=complex)
        for tup in itertools.product(range(n + 1), repeat=m):
            out[tup] = self.data[index[_tuple_to_alpha(tup, n)]]
        return out

    def norm(self) -> float:
        return norm(self)

    def _check_same(self, other):
        if not isinstance(other, SymTensor) or (self.n, self.m) != (other.n, other.m):
            raise DimensionError("tensors must share n and m")

    def __add__(self, other):
        self._check_same(other)
        return SymTensor(self.n, self.m, self.data + other.data)

    def __sub__(self, other):
        self._check_same(other)
        return SymTensor(self.n, self.m, self.data - other.data)

    def __neg__(self):
        return SymTensor(self.n, self.m, -self.data)

    def __mul__(self, scalar):
        return SymTensor(self.n, self.m, self.data * complex(scalar))

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, SymTensor) and (self.n, self.m) == (other.n, other.m)
                and np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.n, self.m, self.data.tobytes()))

    def __repr__(self):
        return f"SymTensor(n={self.n}, m={self.m}, uptri={np.array2string(self.data, precision=4)})"


def _tuple_to_alpha(tup: Sequence[int], n: int) -> MonomialPower:
    alpha = [0] * n
    for i in tup:
        if i:
            alpha[i - 1] += 1
    return tuple(alpha)


# -- operations -------------------------------------------------------------

def from_uptri(n: int, m: int, values: Sequence[complex]) -> SymTensor:
    """Tensor from its upper triangular entries in lexicographic tuple order."""
    values = np.asarray(values, dtype=complex).reshape(-1)
    size = math.comb(n + m, m)
    if values.size != size:
        raise DimensionError(f"uptri of S^{m}(C^{n + 1}) has {size} entries, got {values.size}")
    return SymTensor(n, m, values)


def entry_by_tuple(F: SymTensor, tup: Sequence[int]) -> complex:
    """``F_{i_1 ... i_m}`` for an arbitrary (unsorted) index tuple."""
    tup = tuple(int(i) for i in tup)
    if len(tup) != F.m:
        raise DimensionError(f"expected {F.m} indices, got {len(tup)}")
    if any(i < 0 or i > F.n for i in tup):
        raise IndexError(f"indices must lie in 0..{F.n}, got {tup}")
    return F[_tuple_to_alpha(tup, F.n)]


def from_rank_one_sum(n: int, m: int, vectors) -> SymTensor:
    """``sum_i u_i^{(x) m}`` for the rows ``u_i`` of ``vectors``."""
    U = np.asarray(vectors, dtype=complex)
    if U.size == 0:
        return SymTensor.zeros(n, m)
    U = np.atleast_2d(U)
    if U.shape[1] != n + 1:
        raise DimensionError(f"vectors must have length {n + 1}, got {U.shape[1]}")
    return SymTensor(n, m, rank_one_columns(U, m).sum(axis=1))


def pairing(p: Poly, F: SymTensor) -> complex:
    """Bilinear product ``<p, F> = sum_alpha p_alpha F_alpha``."""
    if p.n != F.n:
        raise DimensionError("polynomial and tensor live in different dimensions")
    if p.degree > F.m:
        raise DomainError(f"deg p = {p.degree} exceeds the order {F.m}")
    return complex(sum(c * F[a] for a, c in p.terms.items()))


def apolar_apply(p: Poly, F: SymTensor) -> SymTensor:
    """Differential action of the homogenized ``p`` on ``F``, rescaled.

    With ``k = deg p`` the result is the order ``m - k`` tensor of
    ``((m-k)!/m!) (p~ o F)``, whose entries reduce to
    ``T_beta = sum_alpha p_alpha F_{alpha + beta}``.  It vanishes exactly
    when ``p`` is a generating polynomial of ``F``.
    """
    if p.n != F.n:
        raise DimensionError("polynomial and tensor live in different dimensions")
    k = max(p.degree, 0)
    if k > F.m:
        raise DomainError(f"deg p = {k} exceeds the order {F.m}")
    out = np.zeros(math.comb(F.n + F.m - k, F.m - k), dtype=complex)
    for i, beta in enumerate(monomials(F.n, F.m - k)):
        out[i] = sum(c * F[tuple(a + b for a, b in zip(alpha, beta))]
                     for alpha, c in p.terms.items())
    return SymTensor(F.n, F.m - k, out)


def norm(F: SymTensor) -> float:
    """Frobenius norm over the full ``(n+1)^m`` index cube.

    Each ``F_alpha`` occurs ``m!/theta!`` times in the cube, with
    ``theta = (m - |alpha|, alpha)``.
    """
    return float(np.sqrt(np.sum(_norm_weights(F.n, F.m) * np.abs(F.data) ** 2)))


def unitary_transform(F: SymTensor, Q) -> SymTensor:
    """``L_Q(F)``, the tensor with ``L_Q(sum u_i^m) = sum (Q u_i)^m``."""
    Q = np.asarray(Q, dtype=complex)
    if Q.shape != (F.n + 1, F.n + 1):
        raise DimensionError(f"Q must be {F.n + 1}x{F.n + 1}")
    s = np.linalg.svd(Q, compute_uv=False)
    if s[-1] <= 1e-14 * s[0]:
        raise DomainError("Q is singular")
    T = F.full()
    for _ in range(F.m):
        # contracting the leading axis and appending the new one cycles all modes
        T = np.tensordot(T, Q, axes=([0], [1]))
    return SymTensor(F.n, F.m, [T[tup] for tup in _uptri_tuples(F.n, F.m)])


@lru_cache(maxsize=None)
def _uptri_tuples(n: int, m: int):
    return tuple(itertools.combinations_with_replacement(range(n + 1), m))
