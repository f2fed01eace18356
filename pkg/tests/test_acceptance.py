"""Acceptance criteria, one test per criterion.

Each test records a one-line PASS/FAIL verdict that is printed in the
terminal summary.  Criterion 12 is reported but does not gate the run.
"""

import math
import time
import warnings

import numpy as np
import pytest

from gpstd import fixtures
from gpstd.catalecticant import cat_rank, dimension_gap, generic_rank
from gpstd.decompose import (
    assemble,
    decompose_all,
    decompose_numeric,
    equivalent,
    reduce_length,
    weights_from_points,
)
from gpstd.errors import InconsistentSystem, NoConvergence
from gpstd.genmat import basis_pair, commutator_residual, companion, from_points, parameterize, recover_tensor
from gpstd.symtensor import Poly, SymTensor, apolar_apply, from_rank_one_sum, from_uptri, monomials, norm, pairing
from gpstd.syssolve import CommutatorSystem, SolveConfig, random_affine
from gpstd.zerosolve import cgt_zeros, match_points, zero_set_distance

from conftest import EX13_POINTS, EX13_WEIGHTS, crandn, record


def test_criterion_01_example_13_pipeline():
    t0 = time.perf_counter()
    F = from_uptri(2, 3, [7, -3, 9, 13, 20, 19, -27, 6, 6, 45])
    param = parameterize(F, 3)
    col = param.c.column((2, 0))
    zs = cgt_zeros(companion(param.matrix()))
    perm, gap = match_points(EX13_POINTS, zs.points)
    lam = weights_from_points(F, zs.points[perm])
    U = assemble(lam, zs.points[perm], 3)
    err = norm(from_rank_one_sum(2, 3, U) - F)
    elapsed = time.perf_counter() - t0
    checks = [
        param.omega_len == 0,
        np.max(np.abs(col - [14 / 5, -1 / 5, -4 / 5])) <= 1e-12,
        zs.nondefective and gap <= 1e-9,
        np.max(np.abs(lam - EX13_WEIGHTS)) <= 1e-9,
        err <= 1e-10,
        elapsed < 1.0,
    ]
    ok = record(1, all(checks), f"ell={param.omega_len} zero gap={gap:.1e} error={err:.1e} "
                f"time={elapsed:.2f}s")
    assert ok, checks


def test_criterion_02_tensor_recovery():
    G = from_points(EX13_POINTS, basis_pair(2, 3))
    F = recover_tensor(G, [7, -3, 9], 2, 3)
    expected = {(2, 0): 13, (1, 1): 20, (0, 2): 19, (3, 0): -27, (2, 1): 6, (1, 2): 6, (0, 3): 45}
    worst = max(abs(F[a] - v) for a, v in expected.items())
    ok = record(2, worst <= 1e-12, f"max deviation {worst:.1e}")
    assert ok


def _all_solutions(name, r, d_expected, count, budget_s):
    F = fixtures.build(name)
    d = dimension_gap(F.n, F.m, r)
    t0 = time.perf_counter()
    decs = decompose_all(F, r, SolveConfig(seed=0, max_restarts=500))
    elapsed = time.perf_counter() - t0
    worst = max((x.error for x in decs), default=np.inf)
    distinct = all(not equivalent(a, b, F.m) for i, a in enumerate(decs) for b in decs[:i])
    ok = (d == d_expected and len(decs) == count and worst <= 1e-8 and distinct
          and elapsed < budget_s)
    return ok, f"d={d} found={len(decs)} max error={worst:.1e} time={elapsed:.1f}s"


@pytest.mark.slow
def test_criterion_03_example_51_all():
    ok, detail = _all_solutions("example_5_1", 4, 2, 7, 300)
    assert record(3, ok, detail)


@pytest.mark.slow
def test_criterion_04_example_52_all():
    ok, detail = _all_solutions("example_5_2", 6, 3, 8, 900)
    assert record(4, ok, detail)


@pytest.mark.slow
def test_criterion_05_uniqueness():
    counts = []
    for (n, m, r, name) in [(3, 3, 5, "unique_s3c4"), (2, 5, 7, "unique_s5c3")]:
        assert dimension_gap(n, m, r) == 0
        tensors = [fixtures.build(name)]
        rng = np.random.default_rng([n, m])
        while len(tensors) < 5:
            tensors.append(from_uptri(n, m, rng.integers(-20, 21, size=math.comb(n + m, m))))
        for F in tensors:
            decs = decompose_all(F, r, SolveConfig(seed=0, max_restarts=20))
            counts.append(len(decs))
    ok = record(5, all(c == 1 for c in counts), f"classes per tensor {counts}")
    assert ok


def test_criterion_06_quartic_reduction():
    F = fixtures.build("quartic")
    dec = reduce_length(F, decompose_numeric(F, 6, SolveConfig(seed=0), transform=True))
    target = fixtures.rank_one_rows("quartic")
    same = len(dec) == 2 and equivalent(dec, target, 4, tol=1e-6)
    ok = record(6, same and dec.error <= 1e-8, f"length={len(dec)} error={dec.error:.1e} "
                f"matches (0,1,-5),(3,2,-1): {same}")
    assert ok


def test_criterion_07_bcmt_reduction():
    F = fixtures.build("bcmt_quintic")
    start = decompose_numeric(F, 7, SolveConfig(seed=0))
    dec = reduce_length(F, start, SolveConfig(seed=0))
    ok = record(7, len(start) == 7 and len(dec) == 4 and dec.error <= 1e-8,
                f"length {len(start)} -> {len(dec)}, error={dec.error:.1e}")
    assert ok


def test_criterion_08_catalecticant_ranks():
    a = cat_rank(fixtures.build("example_1_3"))
    b = cat_rank(fixtures.build("example_5_2"))
    assert record(8, (a, b) == (3, 6), f"ranks {a}, {b}")


TABLE = [
    (3, 3, 4), (4, 3, 5), (5, 3, 8), (6, 3, 10), (7, 3, 12), (8, 3, 15),
    (3, 4, 6), (4, 4, 10), (5, 4, 15), (6, 4, 21),
    (3, 5, 7), (4, 5, 14), (5, 5, 26),
    (3, 6, 10), (4, 6, 21),
]


def test_criterion_09_generic_rank_table():
    wrong = [(n1, m, r, generic_rank(n1 - 1, m)) for n1, m, r in TABLE if generic_rank(n1 - 1, m) != r]
    assert record(9, not wrong, f"{len(TABLE) - len(wrong)}/{len(TABLE)} rows match")


@pytest.mark.slow
def test_criterion_10_desk_sweep():
    t0 = time.perf_counter()
    ok_runs = total = 0
    for n1, m in [(3, 3), (4, 3), (3, 4), (3, 5)]:
        for k in range(20):
            rng = np.random.default_rng([n1, m, k, 10])
            F = SymTensor(n1 - 1, m, crandn(rng, math.comb(n1 - 1 + m, m)))
            total += 1
            try:
                dec = decompose_numeric(F, "auto", SolveConfig(seed=k))
                ok_runs += dec.error <= 1e-8 * norm(F)
            except (NoConvergence, InconsistentSystem):
                pass
    elapsed = time.perf_counter() - t0
    ok = ok_runs >= 0.9 * total and elapsed < 600
    assert record(10, ok, f"{ok_runs}/{total} succeeded in {elapsed:.1f}s")


def _apolarity_instances(rng, count=50):
    agree = 0
    for k in range(count):
        n, m = int(rng.integers(1, 4)), int(rng.integers(2, 5))
        deg = int(rng.integers(1, m + 1))
        pts = crandn(rng, deg, n)
        F = from_rank_one_sum(n, m, np.hstack([np.ones((deg, 1)), pts]))
        if k % 2:
            x1 = Poly.monomial((1,) + (0,) * (n - 1))
            g = Poly.constant(n, 1.0)
            for v in pts:
                g = g * (x1 - v[0])
        else:
            g = Poly(n, dict(zip(monomials(n, deg), crandn(rng, len(monomials(n, deg))))))
        scale = norm(F) * max(abs(c) for c in g.terms.values())
        direct = max(abs(pairing(g * Poly.monomial(b), F)) for b in monomials(n, m - g.degree))
        via = np.max(np.abs(apolar_apply(g, F).data))
        agree += (direct <= 1e-10 * scale) == (via <= 1e-10 * scale) == bool(k % 2)
    return agree


def test_criterion_11_property_suites():
    rng = np.random.default_rng(11)
    apolar = _apolarity_instances(rng)

    commute = 0
    for _ in range(50):
        n, r = int(rng.integers(2, 4)), int(rng.integers(2, 8))
        G = from_points(crandn(rng, r, n), basis_pair(n, r))
        commute += np.linalg.norm(commutator_residual(companion(G))) <= 1e-9 * (1 + np.linalg.norm(G.data)) ** 2

    seed_free = 0
    for _ in range(20):
        G = from_points(crandn(rng, 5, 2), basis_pair(2, 5))
        cs = companion(G)
        seed_free += zero_set_distance(cgt_zeros(cs, seed=1), cgt_zeros(cs, seed=2)) <= 1e-8

    F = fixtures.build("example_5_1")
    param = parameterize(F, 4)
    system = CommutatorSystem(param, random_affine(8, 2, seed=0))
    w = crandn(rng, 8)
    J = system.jacobian(w)
    eps = 1e-6
    fd = np.column_stack([(system.residual(w + eps * e) - system.residual(w - eps * e)) / (2 * eps)
                          for e in np.eye(8)])
    jac_gap = np.linalg.norm(fd - J) / np.linalg.norm(J)

    trips = good = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for n, m in [(1, 3), (1, 5), (2, 3), (2, 4), (2, 5), (3, 3), (3, 4)]:
            r = generic_rank(n, m)
            pts, lam = crandn(rng, r, n), crandn(rng, r)
            Ft = from_rank_one_sum(n, m, assemble(lam, pts, m))
            trips += 1
            try:
                good += decompose_numeric(Ft, r, early_exit=False).error <= 1e-8 * norm(Ft)
            except (NoConvergence, InconsistentSystem):
                pass

    ok = apolar == 50 and commute == 50 and seed_free == 20 and jac_gap <= 1e-6 and good >= 0.9 * trips
    detail = (f"apolarity {apolar}/50, commuting {commute}/50, seed-free {seed_free}/20, "
              f"jacobian gap {jac_gap:.1e}, round trips {good}/{trips}")
    assert record(11, ok, detail)


@pytest.mark.slow
def test_criterion_12_determinantal_reported():
    F = fixtures.build("determinantal")
    t0 = time.perf_counter()
    try:
        dec = decompose_numeric(F, 11, SolveConfig(seed=0), transform=True)
        err, ok = dec.error, dec.error <= 1e-8
    except (NoConvergence, InconsistentSystem) as exc:
        err, ok = getattr(getattr(exc, "decomposition", None), "error", np.inf), False
    record(12, ok, f"(non-gating) r=11 error={err:.1e} time={time.perf_counter() - t0:.1f}s")
    if not ok:
        pytest.xfail("determinantal tensor at r=11 did not reach 1e-8 (reported only)")
