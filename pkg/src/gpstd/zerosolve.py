"""Common zeros of ``phi[G]`` from commuting companion matrices.

The zeros are read off a Schur form of a generic combination
``N(xi) = sum xi_i M_{x_i}`` (Corless, Gianni and Trager).  Diagonal entries
of the triangular factor that coincide mark one zero; the size of the
cluster is its multiplicity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment
from scipy.linalg import lapack

from .errors import NumericalError
from .genmat import CompanionSet

__all__ = [
    "ZeroSet",
    "cgt_zeros",
    "match_points",
    "random_simplex_weights",
    "stickelberger_check",
    "zero_set_distance",
]

log = logging.getLogger(__name__)

OFF_PATTERN_WARN = 1e-6


@dataclass(frozen=True)
class ZeroSet:
    """Distinct zeros (rows of ``points``) with their multiplicities."""

    points: np.ndarray
    multiplicities: tuple

    @property
    def total(self) -> int:
        return int(sum(self.multiplicities))

    @property
    def nondefective(self) -> bool:
        return all(k == 1 for k in self.multiplicities)

    def __len__(self):
        return len(self.multiplicities)


def random_simplex_weights(n: int, rng: np.random.Generator, floor: float = 0.05) -> np.ndarray:
    """Positive weights summing to one, each at least ``floor``."""
    floor = min(floor, 0.5 / n)
    return floor + (1.0 - n * floor) * rng.dirichlet(np.ones(n))


def _clusters(values: np.ndarray, tol: float) -> np.ndarray:
    """Single-linkage labels: ``a ~ b`` when ``|a - b| <= tol (1 + max|.|)``."""
    r = len(values)
    parent = list(range(r))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    mags = np.abs(values)
    for a in range(r):
        for b in range(a + 1, r):
            if abs(values[a] - values[b]) <= tol * (1.0 + max(mags[a], mags[b])):
                parent[find(a)] = find(b)
    roots = [find(a) for a in range(r)]
    relabel = {}
    return np.array([relabel.setdefault(x, len(relabel)) for x in roots])


def _group_schur(T: np.ndarray, Q: np.ndarray, labels: np.ndarray):
    """Reorder a complex Schur form so that equal labels are contiguous."""
    labels = list(labels)
    order = sorted(range(len(labels)), key=lambda k: labels[k])
    wanted = [labels[k] for k in order]
    for pos, lab in enumerate(wanted):
        cur = labels.index(lab, pos)
        if cur != pos:
            T, Q, info = lapack.ztrexc(T, Q, cur + 1, pos + 1)
            if info != 0:
                raise NumericalError(f"ztrexc failed with info={info}")
            labels.insert(pos, labels.pop(cur))
    return T, Q, np.array(labels)


def cgt_zeros(cs: CompanionSet, seed: int = 0, cluster_tol: float = 1e-6) -> ZeroSet:
    """Zeros of ``phi[G]`` with multiplicities from its companion matrices.

    The caller is responsible for the matrices (nearly) commuting.
    """
    rng = np.random.default_rng(seed)
    xi = random_simplex_weights(cs.n, rng)
    Nxi = sum(w * M for w, M in zip(xi, cs.mats))
    try:
        T, Q = scipy.linalg.schur(Nxi, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"Schur decomposition failed: {exc}") from exc

    labels = _clusters(np.diag(T), cluster_tol)
    T, Q, labels = _group_schur(np.asarray(T, dtype=complex), np.asarray(Q, dtype=complex), labels)

    bounds = np.flatnonzero(np.diff(labels)) + 1
    starts = np.concatenate([[0], bounds])
    stops = np.concatenate([bounds, [len(labels)]])
    sizes = stops - starts
    if sizes.sum() != cs.r:
        raise NumericalError("cluster sizes do not add up to r")

    points = np.empty((len(starts), cs.n), dtype=complex)
    for i, M in enumerate(cs.mats):
        Mt = Q.conj().T @ M @ Q
        for j, (lo, hi) in enumerate(zip(starts, stops)):
            points[j, i] = np.trace(Mt[lo:hi, lo:hi]) / (hi - lo)
            below = np.linalg.norm(Mt[hi:, lo:hi])
            if below > OFF_PATTERN_WARN * (1.0 + np.linalg.norm(M)):
                log.debug("cgt_zeros: block %d of M_x%d has off-pattern mass %.3g", j, i + 1, below)
    return ZeroSet(points, tuple(int(s) for s in sizes))


def stickelberger_check(cs: CompanionSet, zs: ZeroSet, tol: float = 1e-8, seed: int = 0) -> bool:
    """Whether each zero is a joint eigenvalue of the companion matrices.

    For a zero ``v`` the monomial vector ``[v]_{B0}`` satisfies
    ``M_{x_i}^T w = v_i w``; ``w`` is taken as the eigenvector of
    ``N(xi)^T`` whose eigenvalue is closest to ``xi . v``.
    """
    rng = np.random.default_rng(seed)
    xi = random_simplex_weights(cs.n, rng)
    Nxi = sum(w * M for w, M in zip(xi, cs.mats))
    evals, evecs = np.linalg.eig(Nxi.T)
    scale = 1.0 + max(np.linalg.norm(M, 2) for M in cs.mats)
    for v in zs.points:
        k = int(np.argmin(np.abs(evals - xi @ v)))
        w = evecs[:, k] / np.linalg.norm(evecs[:, k])
        res = max(np.linalg.norm(M.T @ w - vi * w) for M, vi in zip(cs.mats, v))
        if res > tol * scale:
            return False
    return True


def match_points(P, Q):
    """Optimal pairing of two equally sized point lists.

    Returns ``(perm, dist)``: ``Q[perm[k]]`` is matched to ``P[k]`` and
    ``dist`` is the largest relative gap ``|p - q|_inf / (1 + |p|_inf)``.
    """
    P = np.atleast_2d(np.asarray(P, dtype=complex))
    Q = np.atleast_2d(np.asarray(Q, dtype=complex))
    if P.shape != Q.shape:
        return None, np.inf
    if P.shape[0] == 0:
        return np.zeros(0, dtype=int), 0.0
    gaps = np.max(np.abs(P[:, None, :] - Q[None, :, :]), axis=2)
    gaps = gaps / (1.0 + np.max(np.abs(P), axis=1))[:, None]
    rows, cols = linear_sum_assignment(gaps)
    perm = np.empty(P.shape[0], dtype=int)
    perm[rows] = cols
    return perm, float(gaps[rows, cols].max())


def zero_set_distance(a: ZeroSet, b: ZeroSet) -> float:
    """Distance between zero sets as multisets (zeros repeated by multiplicity)."""
    pa = np.repeat(a.points, a.multiplicities, axis=0)
    pb = np.repeat(b.points, b.multiplicities, axis=0)
    return match_points(pa, pb)[1]
