"""Symmetric tensor decompositions ``F = sum_i u_i^{(x) m}``.

Two drivers are provided.  :func:`decompose_numeric` warm-starts from a
nonlinear least-squares fit, solves the commutator system once and refines.
:func:`decompose_all` collects every decomposition reachable from a batch
of random starts of the commutator system.  :func:`reduce_length` tries to
shorten a decomposition by dropping its smallest term and refitting.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._lm import levenberg_marquardt
from .catalecticant import dimension_gap, generic_rank
from .errors import NoConvergence, SingularVandermonde
from .genmat import companion, from_points, parameterize
from .symtensor import (
    SymTensor,
    _exponents,
    _norm_weights,
    from_rank_one_sum,
    norm,
    power_table,
    rank_one_columns,
    unitary_transform,
)
from .syssolve import SolveConfig, all_solve, numeric_solve, random_affine, random_start
from .zerosolve import cgt_zeros, match_points

__all__ = [
    "Decomposition",
    "assemble",
    "decompose_all",
    "decompose_numeric",
    "decomposition_error",
    "equivalent",
    "nls_fit",
    "reduce_length",
    "weights_from_points",
]

log = logging.getLogger(__name__)

TINY_LEADING = 1e-6
PERTURB = 1e-3
PERTURB_TRIES = 3


@dataclass(frozen=True)
class Decomposition:
    """Vectors ``u_i`` (rows) and the error ``||sum u_i^m - F||``."""

    vectors: np.ndarray
    error: float
    mode: str = "numeric"

    def __len__(self):
        return int(self.vectors.shape[0])

    def points(self) -> np.ndarray:
        """Dehomogenized points ``v_i`` with ``u_i ~ (1, v_i)``."""
        return self.vectors[:, 1:] / self.vectors[:, :1]


def decomposition_error(F: SymTensor, vectors) -> float:
    """``||sum_i u_i^{(x) m} - F||`` in the full-cube norm."""
    vectors = np.asarray(vectors, dtype=complex)
    if vectors.size == 0:
        return norm(F)
    return norm(from_rank_one_sum(F.n, F.m, vectors) - F)


def equivalent(a, b, m: int, tol: float = 1e-6) -> bool:
    """Equal up to permutation and ``u -> tau u`` with ``tau^m = 1``.

    ``u^m`` determines ``u`` up to an ``m``-th root of unity, so the rank-one
    terms are compared directly.  ``tol`` is relative to the term norms.
    """
    A = np.atleast_2d(np.asarray(getattr(a, "vectors", a), dtype=complex))
    B = np.atleast_2d(np.asarray(getattr(b, "vectors", b), dtype=complex))
    if A.shape != B.shape:
        return False
    TA, TB = rank_one_columns(A, m).T, rank_one_columns(B, m).T
    _, dist = match_points(TA, TB)
    return dist <= tol


# -- nonlinear least squares on the vectors -----------------------------------

def _fit_system(F: SymTensor, r: int):
    n, m = F.n, F.m
    E = _exponents(n, m)
    sw = np.sqrt(_norm_weights(n, m))
    target = sw * F.data

    def unpack(x):
        return x.reshape(r, n + 1)

    def residual(x):
        return sw * rank_one_columns(unpack(x), m).sum(axis=1) - target

    def jacobian(x):
        U = unpack(x)
        table = power_table(U, m)
        # factors[a, i, j] = U[i, j] ** E[a, j]
        factors = np.stack([table[:, j, E[:, j]].T for j in range(n + 1)], axis=2)
        J = np.empty((E.shape[0], r, n + 1), dtype=complex)
        for j in range(n + 1):
            others = np.prod(np.delete(factors, j, axis=2), axis=2)
            lower = table[:, j, np.maximum(E[:, j] - 1, 0)].T
            J[:, :, j] = E[:, j][:, None] * lower * others
        return sw[:, None] * J.reshape(E.shape[0], -1)

    return residual, jacobian


def _random_vectors(F: SymTensor, r: int, rng: np.random.Generator) -> np.ndarray:
    size = (max(norm(F), 1e-12) / r) ** (1.0 / F.m) / np.sqrt(F.n + 1)
    return size * (rng.standard_normal((r, F.n + 1)) + 1j * rng.standard_normal((r, F.n + 1))) / np.sqrt(2)


def nls_fit(F: SymTensor, r: int, start=0, cfg: SolveConfig = SolveConfig()):
    """Locally minimize ``||F - sum_{i<=r} u_i^m||^2``.

    ``start`` is either an ``r x (n+1)`` array or an integer seed for a random
    start.  Returns ``(vectors, residual)``.
    """
    if isinstance(start, (int, np.integer)):
        U0 = _random_vectors(F, r, np.random.default_rng([int(start), 0x715]))
    else:
        U0 = np.array(start, dtype=complex).reshape(r, F.n + 1)
    residual, jacobian = _fit_system(F, r)
    tol = 1e-15 * max(norm(F), 1e-300)
    res = levenberg_marquardt(residual, jacobian, U0.ravel(), tol=tol,
                              max_iters=cfg.nls_max_iters, damping_init=cfg.damping_init)
    U = res.x.reshape(r, F.n + 1)
    return U, decomposition_error(F, U)


# -- from points to vectors ---------------------------------------------------

def weights_from_points(F: SymTensor, points) -> np.ndarray:
    """Least-squares ``lambda`` with ``sum lambda_i (1, v_i)^m ~ F``."""
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    if points.size == 0:
        return np.zeros(0, dtype=complex)
    ones = np.ones((points.shape[0], 1), dtype=complex)
    V = rank_one_columns(np.hstack([ones, points]), F.m)
    sw = np.sqrt(_norm_weights(F.n, F.m))
    lam, *_ = np.linalg.lstsq(sw[:, None] * V, sw * F.data, rcond=None)
    return lam


def _principal_root(lam: np.ndarray, m: int) -> np.ndarray:
    angle = np.angle(lam)
    angle = np.where(angle <= -np.pi, np.pi, angle)
    return np.abs(lam) ** (1.0 / m) * np.exp(1j * angle / m)


def assemble(lam, points, m: int) -> np.ndarray:
    """``u_i = lambda_i^{1/m} (1, v_i)`` with the principal root.

    The root has argument in ``(-pi/m, pi/m]``.
    """
    lam = np.asarray(lam, dtype=complex).reshape(-1)
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    ones = np.ones((points.shape[0], 1), dtype=complex)
    return _principal_root(lam, m)[:, None] * np.hstack([ones, points])


def _dehomogenize(U: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Points ``v_i`` with ``u_i = tau_i (1, v_i)``; random where ``u_i0 ~ 0``."""
    r, n1 = U.shape
    pts = np.empty((r, n1 - 1), dtype=complex)
    for i, u in enumerate(U):
        if abs(u[0]) <= TINY_LEADING * np.linalg.norm(u):
            pts[i] = (rng.standard_normal(n1 - 1) + 1j * rng.standard_normal(n1 - 1)) / np.sqrt(2)
        else:
            pts[i] = u[1:] / u[0]
    return pts


def _interpolating_matrix(points: np.ndarray, basis, rng: np.random.Generator):
    """``from_points`` with small perturbations when the points are degenerate."""
    pts = points
    for attempt in range(PERTURB_TRIES + 1):
        try:
            return from_points(pts, basis)
        except SingularVandermonde:
            if attempt == PERTURB_TRIES:
                raise
            noise = rng.standard_normal(pts.shape) + 1j * rng.standard_normal(pts.shape)
            pts = points + PERTURB * (1.0 + np.abs(points)) * noise / np.sqrt(2)


def _finish(F: SymTensor, param, omega, r: int, cfg: SolveConfig, rng) -> np.ndarray:
    """Zeros of ``phi[G(omega)]``, padded to ``r`` points, turned into vectors."""
    zs = cgt_zeros(companion(param.matrix(omega)), seed=cfg.seed, cluster_tol=cfg.cluster_tol)
    pts = zs.points
    if len(pts) < r:
        log.info("defective zero set (%d distinct of %d); padding with generic points", len(pts), r)
        extra = rng.standard_normal((r - len(pts), F.n)) + 1j * rng.standard_normal((r - len(pts), F.n))
        pts = np.vstack([pts, extra / np.sqrt(2)])
    lam = weights_from_points(F, pts)
    return assemble(lam, pts, F.m)


def decompose_numeric(F: SymTensor, r: int | str = "auto", cfg: SolveConfig = SolveConfig(),
                      transform: bool = False, early_exit: bool = True) -> Decomposition:
    """Decomposition of length ``r`` through one consistent generating matrix.

    Steps: parameterize the generating matrices; fit ``r`` rank-one terms by
    nonlinear least squares and stop if that is already exact; otherwise
    interpolate a generating matrix through the fitted points, project it on
    the parameterization, solve the commutator system from there, extract
    the zeros, solve for the weights and refine.

    ``r = "auto"`` uses the generic rank.  With ``transform`` the tensor is
    first moved by a random unitary ``Q`` and the result mapped back.
    ``early_exit=False`` always goes through the generating matrix, even when
    the first fit is already exact.
    Raises :class:`~gpstd.errors.InconsistentSystem` when ``r`` is too small
    and :class:`~gpstd.errors.NoConvergence` (with ``.decomposition``) when
    the final error stays above ``cfg.error_tol * ||F||``.
    """
    if r == "auto":
        r = generic_rank(F.n, F.m)
    r = int(r)
    rng = np.random.default_rng([cfg.seed, 0xDEC])
    Q = None
    work = F
    if transform:
        Z = rng.standard_normal((F.n + 1, F.n + 1)) + 1j * rng.standard_normal((F.n + 1, F.n + 1))
        Q, _ = np.linalg.qr(Z)
        work = unitary_transform(F, Q)

    def done(U, mode="numeric"):
        if Q is not None:
            U = U @ Q.conj()  # rows u -> Q^H u
        return Decomposition(U, decomposition_error(F, U), mode)

    target = cfg.error_tol * norm(F)
    param = parameterize(work, r)
    d = min(dimension_gap(F.n, F.m, r), param.omega_len)

    U0, res0 = nls_fit(work, r, cfg.seed, cfg)
    if early_exit and res0 <= target:
        return done(U0)

    G0 = _interpolating_matrix(_dehomogenize(U0, rng), param.basis, rng)
    omega0 = param.project(G0)
    ac = random_affine(param.omega_len, d, seed=cfg.seed)
    try:
        omega = numeric_solve(param, ac, omega0, cfg)
        solved = True
    except NoConvergence as exc:
        log.info("commutator system not solved (%.3g); continuing from the best iterate", exc.residual)
        omega, solved = exc.best, False

    U = _finish(work, param, omega, r, cfg, rng)
    U, res = nls_fit(work, r, U, cfg)
    if res > target and res0 < res:
        U = U0
    dec = done(U)
    if dec.error > target:
        raise NoConvergence(
            f"decomposition error {dec.error:.3g} above {target:.3g}"
            + ("" if solved else " (commutator system not solved)"),
            residual=dec.error, decomposition=dec)
    return dec


def decompose_all(F: SymTensor, r: int, cfg: SolveConfig = SolveConfig(),
                  polish: bool = False) -> list:
    """All decompositions found through the solutions of the commutator system.

    The system is cut by ``d`` random affine equations (``d`` the dimension
    gap) and solved from ``cfg.max_restarts`` starts, alternating between
    generating matrices through random points and through the points of a
    randomly started least-squares fit.  Each distinct solution
    gives one decomposition; defective ones and those with error above
    ``cfg.error_tol * ||F||`` are dropped.  ``polish`` runs a short
    least-squares refinement on each.
    """
    r = int(r)
    param = parameterize(F, r)
    d = min(dimension_gap(F.n, F.m, r), param.omega_len)
    ac = random_affine(param.omega_len, d, seed=cfg.seed)
    target = cfg.error_tol * norm(F)

    def starts(k, rng):
        # odd starts: random points; even starts: points of a random local fit
        if k % 2:
            return random_start(param, rng)
        U, _ = nls_fit(F, r, int(rng.integers(2**31)), cfg)
        try:
            return param.project(_interpolating_matrix(_dehomogenize(U, rng), param.basis, rng))
        except SingularVandermonde:
            return random_start(param, rng)

    out: list = []
    for omega in all_solve(param, ac, cfg, starts=starts):
        zs = cgt_zeros(companion(param.matrix(omega)), seed=cfg.seed, cluster_tol=cfg.cluster_tol)
        if not zs.nondefective:
            log.info("decompose_all: skipping a defective solution %s", zs.multiplicities)
            continue
        U = assemble(weights_from_points(F, zs.points), zs.points, F.m)
        if polish:
            U, _ = nls_fit(F, r, U, cfg)
        dec = Decomposition(U, decomposition_error(F, U), "all-solutions")
        if dec.error > target:
            log.info("decompose_all: dropping a solution with error %.3g", dec.error)
            continue
        if any(equivalent(dec, other, F.m, cfg.dedup_tol) for other in out):
            continue
        out.append(dec)
    return out


def reduce_length(F: SymTensor, dec: Decomposition, cfg: SolveConfig = SolveConfig(),
                  all_drops: bool = True) -> Decomposition:
    """Shorten ``dec`` by dropping a vector and refitting the rest.

    The vectors are sorted by decreasing norm and the last one is dropped;
    the remaining ones warm-start :func:`nls_fit` one length lower.  The
    shorter fit is kept if its error is at most ``cfg.error_tol * ||F||``.
    With ``all_drops`` the other vectors are tried in order of increasing
    norm before a length counts as failed.  Stops at the first failed length
    and returns the shortest success (``dec`` itself if none).
    """
    target = cfg.error_tol * norm(F)
    best = dec
    while len(best) > 1:
        order = np.argsort(-np.linalg.norm(best.vectors, axis=1), kind="stable")
        candidates = order[::-1] if all_drops else order[-1:]
        shorter = None
        for drop in candidates:
            U, res = nls_fit(F, len(best) - 1, np.delete(best.vectors, drop, axis=0), cfg)
            if res <= target:
                shorter = Decomposition(U, res, "reduced")
                break
        if shorter is None:
            break
        best = shorter
        log.info("reduce_length: length %d reached, error %.3g", len(best), best.error)
    return best
