"""Named example tensors shipped with the package.

Each tensor is built from its printed integer data (upper triangular entries
or the coefficients of the form) and is also stored as a tensor file under
``gpstd/data/``; :func:`load` reads the file, :func:`build` recomputes it.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .symtensor import SymTensor, from_rank_one_sum, from_uptri

__all__ = ["NAMES", "build", "load", "path", "rank_one_rows"]


def _form(n: int, m: int, terms: dict) -> SymTensor:
    """Tensor of ``sum c * prod x_i`` with each monomial given as its variable indices."""
    coeffs = {}
    for idx, c in terms.items():
        theta = [0] * (n + 1)
        for i in idx:
            theta[i] += 1
        coeffs[tuple(theta)] = coeffs.get(tuple(theta), 0) + c
    return SymTensor.from_form(n, m, coeffs)


def rank_one_rows(name: str) -> np.ndarray:
    """Known generating vectors of the fixtures built as sums of powers."""
    if name == "quartic":
        return np.array([[0, 1, -5], [3, 2, -1]], dtype=complex)
    if name == "bcmt_quintic":
        rows = np.array([[1, 2, 3], [1, -2, 3], [1, -12, -3], [1, 12, -13]], dtype=complex)
        weights = np.array([1, 1, 1 / 3, 1 / 5])
        return weights[:, None] ** (1 / 5) * rows
    if name == "example_1_3":
        pts = np.array([[1, -2, -1], [1, 1, 2], [1, 2, -2]], dtype=complex)
        lam = np.array([3, 5, -1], dtype=complex)
        return lam[:, None] ** (1 / 3) * pts
    raise KeyError(name)


def _quartic():
    t = {
        (0, 0, 0, 0): 81, (1, 1, 1, 1): 17, (2, 2, 2, 2): 626, (0, 1, 1, 2): -144,
        (0, 0, 0, 1): 216, (0, 0, 0, 2): -108, (0, 0, 1, 1): 216, (0, 0, 2, 2): 54,
        (0, 1, 1, 1): 96, (0, 2, 2, 2): -12, (1, 1, 1, 2): -52, (1, 1, 2, 2): 174,
        (1, 2, 2, 2): -508, (0, 1, 2, 2): 72, (0, 0, 1, 2): -216,
    }
    return _form(2, 4, t)


def _determinantal():
    t = {(5, 1, 1): -1, (1, 2, 4): 2, (3, 2, 2): -1, (0, 4, 4): -1, (0, 3, 5): 1}
    return _form(5, 3, t)


_BUILDERS = {
    "example_1_3": lambda: from_uptri(2, 3, [7, -3, 9, 13, 20, 19, -27, 6, 6, 45]),
    "example_5_1": lambda: from_uptri(2, 3, [-8, 2, 15, -7, 17, 7, 17, 4, 3, 18]),
    "example_5_2": lambda: from_uptri(
        2, 4, [-7, -2, 11, 18, -7, -1, 3, -2, -15, -9, -13, -14, -11, -13, 18]),
    "unique_s3c4": lambda: from_uptri(
        3, 3, [-20, -17, 16, 10, -4, -8, 3, -1, -19, -6, -6, 7, 9, -13, 1, 17, 11, -17, 7, 9]),
    "unique_s5c3": lambda: from_uptri(
        2, 5, [13, -15, -2, -18, 0, 6, -4, -19, -1, 12, 13, -13, -17, -1, 16, -11, 14, -4, 11, 14, 19]),
    "quartic": _quartic,
    "bcmt_quintic": lambda: from_rank_one_sum(2, 5, rank_one_rows("bcmt_quintic")),
    "determinantal": _determinantal,
}

NAMES = tuple(_BUILDERS)


def build(name: str) -> SymTensor:
    """Recompute fixture ``name`` from its printed data."""
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(NAMES)}") from None


def path(name: str):
    """Location of the stored tensor file of ``name``."""
    if name not in _BUILDERS:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(NAMES)}")
    return resources.files("gpstd") / "data" / f"{name}.tensor"


def load(name: str) -> SymTensor:
    """Read the stored tensor file of ``name``."""
    from .cli import read_tensor

    with resources.as_file(path(name)) as p:
        return read_tensor(p)
