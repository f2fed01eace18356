import math
import warnings

import numpy as np
import pytest

from gpstd import fixtures
from gpstd.catalecticant import cat_matrix, cat_rank, dimension_gap, generic_rank, secant_dim
from gpstd.errors import DomainError
from gpstd.symtensor import Poly, SymTensor, apolar_apply, from_rank_one_sum, from_uptri, norm

from conftest import crandn, random_tensor

TABLE = [
    (3, 3, 4), (4, 3, 5), (5, 3, 8), (6, 3, 10), (7, 3, 12), (8, 3, 15),
    (3, 4, 6), (4, 4, 10), (5, 4, 15), (6, 4, 21),
    (3, 5, 7), (4, 5, 14), (5, 5, 26),
    (3, 6, 10), (4, 6, 21),
]


def test_cat_matrix_order_two():
    F = from_uptri(1, 2, [1, 2, 3])
    assert np.array_equal(cat_matrix(F, 1).data, [[1, 2], [2, 3]])


def test_cat_matrix_example(ex13):
    C = cat_matrix(ex13, 2)
    assert C.data.shape == (3, 6)
    assert C.data[C.row_index.index((0, 0)), C.col_index.index((1, 1))] == 20


def test_cat_matrix_rank_one(rng):
    F = from_rank_one_sum(2, 4, [crandn(rng, 3)])
    for k in range(5):
        s = np.linalg.svd(cat_matrix(F, k).data, compute_uv=False)
        assert np.sum(s > 1e-10 * s[0]) == 1


def test_cat_matrix_bad_k(ex13):
    with pytest.raises(DomainError):
        cat_matrix(ex13, 4)


@pytest.mark.parametrize("n,m", [(n, m) for n in (1, 2, 3) for m in range(1, 6)])
def test_hankel_structure(n, m, rng):
    F = random_tensor(n, m, rng)
    for k in range(m + 1):
        C = cat_matrix(F, k)
        seen = {}
        for i, beta in enumerate(C.row_index):
            for j, alpha in enumerate(C.col_index):
                key = tuple(a + b for a, b in zip(alpha, beta))
                assert seen.setdefault(key, C.data[i, j]) == C.data[i, j]


def test_cat_rank_examples(ex13):
    assert cat_rank(ex13) == 3
    assert cat_rank(fixtures.build("example_5_2")) == 6
    assert cat_rank(SymTensor.zeros(2, 4)) == 0


def test_rank_chain(rng):
    hits = 0
    for seed in range(100):
        g = np.random.default_rng(seed)
        n, m = 2, 4
        r = int(g.integers(1, 7))
        F = from_rank_one_sum(n, m, crandn(g, r, n + 1))
        cr = cat_rank(F)
        assert cr <= r
        hits += cr == min(r, 6)
    assert hits >= 95


def test_kernel_is_apolar(rng):
    F = from_rank_one_sum(2, 4, crandn(rng, 4, 3))
    C = cat_matrix(F, 2)
    _, s, Vh = np.linalg.svd(C.data)
    rank = int(np.sum(s > 1e-10 * s[0]))
    for v in Vh[rank:].conj():
        p = Poly(2, dict(zip(C.col_index, v)))
        assert np.max(np.abs(apolar_apply(p, F).data)) <= 1e-8 * norm(F)


@pytest.mark.parametrize("n1,m,r", TABLE)
def test_generic_rank_table(n1, m, r):
    assert generic_rank(n1 - 1, m) == r


def test_generic_rank_order_two_warns():
    with pytest.warns(UserWarning):
        assert generic_rank(3, 2) == 4


def test_secant_dim_examples():
    assert secant_dim(2, 3, 4) == 9
    assert secant_dim(4, 3, 7) == math.comb(7, 3) - 2
    assert secant_dim(1, 3, 1) == 1


def test_dimension_gap_examples():
    assert dimension_gap(2, 3, 4) == 2
    assert dimension_gap(2, 4, 6) == 3
    assert dimension_gap(3, 3, 5) == 0
    assert dimension_gap(2, 5, 7) == 0
    assert dimension_gap(2, 3, 9) == 0  # above the generic rank


def test_dimension_gap_nonnegative():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for n in range(1, 5):
            for m in range(2, 6):
                for r in range(1, 30):
                    assert dimension_gap(n, m, r) >= 0
