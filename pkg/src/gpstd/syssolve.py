"""The quadratic commutator system in the parameter ``omega``.

A generating matrix ``G(omega) = C + N(omega)`` is consistent when its
companion matrices commute.  The commutators are quadratic in ``omega``; when
the fiber of decompositions has positive dimension ``d`` the system is cut by
``d`` random affine equations ``a_k^T omega = b_k``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._lm import levenberg_marquardt
from .errors import DomainError, NoConvergence, SingularVandermonde
from .genmat import GenMatrixParam, companion, from_points
from .zerosolve import cgt_zeros, zero_set_distance

__all__ = [
    "AffineConstraints",
    "CommutatorSystem",
    "SolveConfig",
    "all_solve",
    "numeric_solve",
    "random_affine",
    "random_start",
    "residual_map",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AffineConstraints:
    """Rows ``a`` (``d x l``) and right-hand sides ``b`` of ``a omega = b``."""

    a: np.ndarray
    b: np.ndarray

    @property
    def d(self) -> int:
        return int(self.b.shape[0])

    @classmethod
    def empty(cls, ell: int) -> "AffineConstraints":
        return cls(np.zeros((0, ell), dtype=complex), np.zeros(0, dtype=complex))


@dataclass(frozen=True)
class SolveConfig:
    """Knobs shared by the solvers.

    ``residual_tol`` is relative to ``1 + ||C||`` for the commutator system;
    ``error_tol`` is relative to ``||F||`` for decompositions.
    """

    seed: int = 0
    max_iters: int = 200
    residual_tol: float = 1e-12
    max_restarts: int = 10
    dedup_tol: float = 1e-6
    damping_init: float = 1e-3
    error_tol: float = 1e-9
    cluster_tol: float = 1e-6
    nls_max_iters: int = 500

    def __post_init__(self):
        for name in ("residual_tol", "dedup_tol", "damping_init", "error_tol", "cluster_tol"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive")
        if self.max_iters < 1 or self.max_restarts < 1:
            raise DomainError("max_iters and max_restarts must be at least 1")


def random_affine(ell: int, d: int, seed: int = 0) -> AffineConstraints:
    """``d`` complex Gaussian equations on ``omega`` in ``C^ell``."""
    if d < 0 or d > ell:
        raise DomainError(f"need 0 <= d <= ell, got d={d}, ell={ell}")
    rng = np.random.default_rng([seed, 0xAFF1])
    a = (rng.standard_normal((d, ell)) + 1j * rng.standard_normal((d, ell))) / np.sqrt(2)
    b = (rng.standard_normal(d) + 1j * rng.standard_normal(d)) / np.sqrt(2)
    return AffineConstraints(a, b)


class CommutatorSystem:
    """Residual and Jacobian of the commutator equations plus affine rows.

    ``M_{x_i}(G(omega)) = M_i0 + sum_k omega_k D_ik``; the derivative
    matrices ``D_ik`` are assembled once.
    """

    def __init__(self, param: GenMatrixParam, ac: AffineConstraints | None = None):
        self.param = param
        self.ac = ac if ac is not None else AffineConstraints.empty(param.omega_len)
        if self.ac.a.shape[1:] != (param.omega_len,):
            raise DomainError("affine constraints do not match the parameter length")
        self.n = param.basis.n
        self.r = param.basis.r
        self.ell = param.omega_len
        self.base = companion(param.c).mats
        self.pairs = [(i, j) for i in range(self.n) for j in range(i + 1, self.n)]

    @cached_property
    def derivs(self) -> list:
        ell, r = self.ell, self.r
        out = []
        offsets = self.param.offsets
        for row in self.param.basis.shifts:
            D = np.zeros((ell, r, r), dtype=complex)
            for col, (kind, k) in enumerate(row):
                if kind == "b1":
                    lo, hi = offsets[k], offsets[k + 1]
                    D[lo:hi, :, col] = self.param.null_bases[k].T
            out.append(D)
        return out

    def matrices(self, omega) -> list:
        omega = np.asarray(omega, dtype=complex)
        if not self.ell:
            return list(self.base)
        return [M0 + np.tensordot(omega, D, axes=1) for M0, D in zip(self.base, self.derivs)]

    @property
    def scale(self) -> float:
        return 1.0 + float(np.linalg.norm(self.param.c.data))

    def residual(self, omega) -> np.ndarray:
        mats = self.matrices(omega)
        blocks = [(mats[i] @ mats[j] - mats[j] @ mats[i]).ravel() for i, j in self.pairs]
        if self.ac.d:
            blocks.append(self.ac.a @ np.asarray(omega, dtype=complex) - self.ac.b)
        return np.concatenate(blocks) if blocks else np.zeros(0, dtype=complex)

    def jacobian(self, omega) -> np.ndarray:
        mats = self.matrices(omega)
        D = self.derivs
        rows = []
        for i, j in self.pairs:
            Mi, Mj = mats[i], mats[j]
            dC = (np.matmul(D[i], Mj) - np.matmul(Mj, D[i])
                  + np.matmul(Mi, D[j]) - np.matmul(D[j], Mi))
            rows.append(dC.reshape(self.ell, -1).T)
        if self.ac.d:
            rows.append(self.ac.a)
        return np.vstack(rows) if rows else np.zeros((0, self.ell), dtype=complex)

    def feasible_start(self, omega) -> np.ndarray:
        """Shift ``omega`` minimally onto the affine constraints."""
        omega = np.asarray(omega, dtype=complex)
        if not self.ac.d:
            return omega
        corr = np.linalg.lstsq(self.ac.a, self.ac.b - self.ac.a @ omega, rcond=None)[0]
        return omega + corr

    def solve_from(self, omega0, cfg: SolveConfig):
        return levenberg_marquardt(self.residual, self.jacobian, self.feasible_start(omega0),
                                   tol=cfg.residual_tol * self.scale, max_iters=cfg.max_iters,
                                   damping_init=cfg.damping_init)


def residual_map(param: GenMatrixParam, ac: AffineConstraints | None, omega) -> np.ndarray:
    """Commutators of ``M_{x_i}(C + N(omega))`` followed by ``a omega - b``."""
    return CommutatorSystem(param, ac).residual(omega)


def numeric_solve(param: GenMatrixParam, ac: AffineConstraints | None, omega0,
                  cfg: SolveConfig = SolveConfig()) -> np.ndarray:
    """One solution of the commutator system, starting from ``omega0``.

    Attempt ``k > 0`` restarts from ``omega0`` plus seeded complex noise of
    growing size.  Raises :class:`NoConvergence` carrying the best iterate.
    """
    system = CommutatorSystem(param, ac)
    tol = cfg.residual_tol * system.scale
    if not system.ell:
        res = float(np.linalg.norm(system.residual(np.zeros(0))))
        if res <= tol:
            return np.zeros(0, dtype=complex)
        raise NoConvergence(f"no free parameters and the commutators are {res:.3g}",
                            best=np.zeros(0, dtype=complex), residual=res)
    omega0 = np.asarray(omega0, dtype=complex)
    spread = 1.0 + np.sqrt(np.mean(np.abs(omega0) ** 2))
    best = None
    for k in range(cfg.max_restarts):
        start = omega0
        if k:
            rng = np.random.default_rng([cfg.seed, k, 0x5EED])
            noise = rng.standard_normal(system.ell) + 1j * rng.standard_normal(system.ell)
            start = omega0 + 0.1 * 2.0 ** (k - 1) * spread * noise / np.sqrt(2)
        res = system.solve_from(start, cfg)
        if best is None or res.fnorm < best.fnorm:
            best = res
        if res.converged:
            return res.x
        log.debug("numeric_solve: attempt %d stopped at residual %.3g", k, res.fnorm)
    raise NoConvergence(f"commutator system not solved; best residual {best.fnorm:.3g}",
                        best=best.x, residual=best.fnorm)


def all_solve(param: GenMatrixParam, ac: AffineConstraints | None,
              cfg: SolveConfig = SolveConfig(), starts=None) -> list:
    """Distinct solutions found from ``cfg.max_restarts`` random starts.

    By default each start is the projection of a generating matrix through
    random points (see :func:`random_start`); ``starts(k, rng)`` may supply
    other ones.  Two solutions are the same when the zero sets of their
    generating polynomials match up to permutation within ``cfg.dedup_tol``.
    Start ``k`` uses a generator seeded by ``(cfg.seed, k)``.
    """
    system = CommutatorSystem(param, ac)
    if not system.ell:
        try:
            return [numeric_solve(param, ac, np.zeros(0), cfg)]
        except NoConvergence:
            return []
    found: list = []
    zero_sets: list = []
    for k in range(cfg.max_restarts):
        rng = np.random.default_rng([cfg.seed, k])
        omega0 = random_start(param, rng) if starts is None else starts(k, rng)
        res = system.solve_from(omega0, cfg)
        if not res.converged:
            continue
        try:
            zs = cgt_zeros(companion(param.matrix(res.x)), seed=cfg.seed,
                           cluster_tol=cfg.cluster_tol)
        except Exception as exc:  # a bad solution must not abort the sweep
            log.debug("all_solve: zero extraction failed: %s", exc)
            continue
        if not np.all(np.isfinite(zs.points)):
            continue
        if any(zero_set_distance(zs, other) <= cfg.dedup_tol for other in zero_sets):
            continue
        found.append(res.x)
        zero_sets.append(zs)
        log.info("all_solve: start %d gave solution #%d", k, len(found))
    return found


def random_start(param: GenMatrixParam, rng: np.random.Generator) -> np.ndarray:
    """Parameter of the generating matrix through ``r`` random points.

    Point magnitudes are log-uniform over ``[10^-0.5, 10^2.5]``, one scale per
    point, so that solutions with zeros far from the origin (small weights)
    are reached as well.
    """
    r, n = param.basis.r, param.basis.n
    scale = 10.0 ** rng.uniform(-0.5, 2.5, size=(r, 1))
    pts = scale * (rng.standard_normal((r, n)) + 1j * rng.standard_normal((r, n))) / np.sqrt(2)
    try:
        return param.project(from_points(pts, param.basis, tol=1e-14))
    except SingularVandermonde:
        ell = param.omega_len
        return (rng.standard_normal(ell) + 1j * rng.standard_normal(ell)) / np.sqrt(2)
