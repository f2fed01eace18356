"""Levenberg-Marquardt for holomorphic complex residuals.

For a residual ``f(z)`` that is holomorphic in ``z``, the real
Levenberg-Marquardt step on ``(Re z, Im z)`` is the realification of the
complex step ``(J^H J + mu I) dz = -J^H f``, so the iteration is carried out
in complex arithmetic directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class LMResult:
    x: np.ndarray
    fnorm: float
    iters: int
    converged: bool


def levenberg_marquardt(fun, jac, x0, *, tol: float, max_iters: int = 200,
                        damping_init: float = 1e-3, xtol: float = 1e-15) -> LMResult:
    """Minimize ``||fun(x)||`` from ``x0``.

    ``tol`` is absolute on the residual norm.  The damping is relative to the
    largest squared singular value of the Jacobian and is divided by 10 after
    an accepted step and multiplied by 10 after a rejected one.
    """
    x = np.array(x0, dtype=complex)
    f = fun(x)
    fn = float(np.linalg.norm(f))
    lam = damping_init
    it = 0
    while it < max_iters:
        if fn <= tol:
            return LMResult(x, fn, it, True)
        J = jac(x)
        it += 1
        try:
            U, s, Vh = np.linalg.svd(J, full_matrices=False)
        except np.linalg.LinAlgError:
            break
        if s.size == 0 or s[0] == 0:
            break
        g = U.conj().T @ f
        s2max = s[0] ** 2
        accepted = False
        while lam < 1e16:
            mu = lam * s2max
            step = -(Vh.conj().T @ (g * s / (s ** 2 + mu)))
            x_new = x + step
            f_new = fun(x_new)
            fn_new = float(np.linalg.norm(f_new))
            if np.isfinite(fn_new) and fn_new < fn:
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            break
        small = np.linalg.norm(step) <= xtol * (1.0 + np.linalg.norm(x))
        x, f, fn = x_new, f_new, fn_new
        lam = max(lam / 10.0, 1e-12)
        if small:
            break
    return LMResult(x, fn, it, fn <= tol)
