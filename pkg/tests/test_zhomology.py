from __future__ import annotations

import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainlift.core import BinMatrix, ChainComplexZ, IntMatrix, betti2, rank2
from chainlift.errors import FillBudgetExceeded, NotAdmissible, RankDeficient, SingularMatrix
from chainlift.lifting import general_lift, has_2torsion, naive_lift
from chainlift.zhomology import bareiss_det, hnf, homology_z, probe_minor_gcd, rank_z, snf, solve_integer, try_sparse_lu

from _factories import corpus, dense_rank_mod2, dense_rank_q, random_binmatrix

CIRCULANT = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]


def cofactor_det(a):
    if not a:
        return 1
    if len(a) == 1:
        return a[0][0]
    return sum((-1) ** j * a[0][j] * cofactor_det([row[:j] + row[j + 1:] for row in a[1:]]) for j in range(len(a)))


def determinantal_factors(dense):
    """Invariant factors from gcds of all k by k minors (fine for tiny matrices)."""
    rows, cols = len(dense), len(dense[0]) if dense else 0
    divisors = [1]
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in itertools.combinations(range(rows), k):
            for cs in itertools.combinations(range(cols), k):
                g = math.gcd(g, cofactor_det([[dense[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        divisors.append(g)
    return tuple(divisors[i] // divisors[i - 1] for i in range(1, len(divisors)))


def random_int_matrix(rng, rows, cols, spread=3, density=0.5):
    return [[rng.randint(-spread, spread) if rng.random() < density else 0 for _ in range(cols)] for _ in range(rows)]


# ---------------------------------------------------------------- Hermite form

def test_hnf_examples():
    assert hnf(IntMatrix.identity(3)).h == IntMatrix.identity(3)
    assert hnf(IntMatrix.from_dense([[2, 4], [0, 3]])).h.to_dense() == [[2, 1], [0, 3]]
    assert hnf(IntMatrix.zeros(2, 3)).h == IntMatrix.zeros(2, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2 ** 32))
def test_hnf_witness_and_shape(rows, cols, seed):
    a = IntMatrix.from_dense(random_int_matrix(random.Random(seed), rows, cols))
    res = hnf(a)
    assert res.transform @ a == res.h
    assert abs(bareiss_det(res.transform.to_dense())) == 1
    h = res.h.to_dense()
    assert res.rank == dense_rank_q(a.to_dense())
    for i, p in enumerate(res.pivots):
        assert h[i][p] > 0
        assert all(h[i][c] == 0 for c in range(p))
        for k in range(i):
            assert 0 <= h[k][p] < h[i][p]
    for i in range(res.rank, rows):
        assert not any(h[i])


def test_solve_integer_finds_a_solution_or_none():
    a = IntMatrix.from_dense([[1, 1], [1, 1]])
    w = solve_integer(a, [1, 1])
    assert [sum(x * y for x, y in zip(row, w)) for row in a.to_dense()] == [1, 1]
    assert solve_integer(IntMatrix.from_dense([[2]]), [1]) is None


# ---------------------------------------------------------------- Smith form

def test_snf_examples():
    assert snf(IntMatrix.from_dense([[2]])).invariant_factors == (2,)
    assert snf(IntMatrix.from_dense([[1, -1], [1, -1]])).invariant_factors == (1,)
    assert snf(IntMatrix.from_dense([[6, 0], [0, 4]])).invariant_factors == (2, 12)
    assert snf(IntMatrix.naive(BinMatrix.from_dense(CIRCULANT))).invariant_factors == (1, 1, 2)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2 ** 32))
def test_snf_matches_determinantal_divisors(rows, cols, seed):
    dense = random_int_matrix(random.Random(seed), rows, cols)
    res = snf(IntMatrix.from_dense(dense), transforms=True)
    assert res.invariant_factors == determinantal_factors(dense)
    for a, b in zip(res.invariant_factors, res.invariant_factors[1:]):
        assert b % a == 0
    assert res.left @ IntMatrix.from_dense(dense) @ res.right == res.diagonal(rows, cols)
    assert abs(bareiss_det(res.left.to_dense())) == 1
    assert abs(bareiss_det(res.right.to_dense())) == 1


def test_has_2torsion_agrees_with_rank_gap_on_500_matrices():
    # the number of even invariant factors is rank over Q minus rank over F2
    rng = random.Random(2024)
    for _ in range(500):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        dense = random_int_matrix(rng, rows, cols, spread=2, density=0.6)
        expect = dense_rank_q(dense) > dense_rank_mod2(dense)
        a = IntMatrix.from_dense(dense)
        assert has_2torsion(a) == expect
        assert has_2torsion(a) == any(d % 2 == 0 for d in snf(a).invariant_factors)


def test_rank_z_and_bareiss():
    assert bareiss_det(CIRCULANT) == 2
    assert rank_z(IntMatrix.from_dense(CIRCULANT)) == 3
    assert bareiss_det([[2, 1], [4, 2]]) == 0


# ---------------------------------------------------------------- homology

def test_homology_of_circulant_lifts():
    src = __import__("chainlift.core", fromlist=["ChainComplex2"]).ChainComplex2.from_boundaries(
        [BinMatrix.from_dense(CIRCULANT)]
    )
    naive = homology_z(naive_lift(src))
    assert naive.degrees[0].torsion == (2,)
    good = homology_z(general_lift(src).lifted)
    assert good.free_ranks == (1, 1)
    assert good.torsion_free


def test_homology_of_zero_complex():
    h = homology_z(ChainComplexZ.zero((2, 3, 1)))
    assert h.free_ranks == (2, 3, 1)
    assert h.torsion_free


def test_homology_rejects_non_admissible():
    from chainlift.codes import gen_toric

    with pytest.raises(NotAdmissible):
        homology_z(naive_lift(gen_toric(2)))


def test_cohomology_torsion_is_shifted_homology_torsion():
    src = __import__("chainlift.core", fromlist=["ChainComplex2"]).ChainComplex2.from_boundaries(
        [BinMatrix.from_dense(CIRCULANT)]
    )
    h = homology_z(naive_lift(src))
    assert h.degrees[1].cohomology_torsion == h.degrees[0].torsion


def test_general_lift_free_ranks_equal_betti_numbers():
    for c in corpus(41, 40):
        h = homology_z(general_lift(c).lifted)
        assert h.torsion_free
        assert h.free_ranks == tuple(betti2(c, j) for j in range(len(c.dims)))


# ---------------------------------------------------------------- sparse LU

def test_lu_identity():
    res = try_sparse_lu(BinMatrix.identity(5))
    assert res.fill == 0
    assert abs(res.det) == 1


def _check_lu(m, res):
    n = m.rows
    pa = [[m.to_dense()[res.row_perm[i]][res.col_perm[j]] for j in range(n)] for i in range(n)]
    assert (res.lower @ res.upper).to_dense() == pa
    assert all(res.lower.to_dense()[i][i] == 1 for i in range(n))
    assert all(res.upper.to_dense()[i][i] == 1 for i in range(n))
    assert res.lifted.mod2() == m
    if n <= 24:
        assert bareiss_det(res.lifted.to_dense()) == res.det
    assert res.det in (1, -1)


def test_lu_random_sparse_full_rank():
    rng = random.Random(9)
    found = 0
    while found < 5:
        m = random_binmatrix(rng, 32, 32, 3 / 32)
        if rank2(m) < 32:
            continue
        found += 1
        _check_lu(m, try_sparse_lu(m))
    for n in (8, 16, 24):
        while True:
            m = random_binmatrix(rng, n, n, 3 / n)
            if rank2(m) == n:
                break
        _check_lu(m, try_sparse_lu(m))


def test_lu_singular_and_budget_errors_are_distinct():
    with pytest.raises(SingularMatrix):
        try_sparse_lu(BinMatrix.from_dense([[1] * 4] * 4))
    dense = BinMatrix.from_dense([[1, 1, 1, 1], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]])
    fill = try_sparse_lu(dense).fill
    if fill > 0:
        with pytest.raises(FillBudgetExceeded):
            try_sparse_lu(dense, fill_budget=fill - 1)
    rng = random.Random(1)
    while True:
        m = random_binmatrix(rng, 20, 20, 0.3)
        if rank2(m) == 20 and try_sparse_lu(m).fill > 0:
            break
    with pytest.raises(FillBudgetExceeded):
        try_sparse_lu(m, fill_budget=try_sparse_lu(m).fill - 1)


# ---------------------------------------------------------------- gcd of minors

def test_minor_gcd_examples():
    assert probe_minor_gcd(IntMatrix.from_dense([[1, 0, 1], [0, 1, 1]])).gcd == 1
    assert probe_minor_gcd(IntMatrix.from_dense([[2, 0, 0], [0, 2, 0]])).gcd == 4
    assert probe_minor_gcd(IntMatrix.identity(4)).gcd == 1


def test_minor_gcd_stops_early_at_one():
    res = probe_minor_gcd(IntMatrix.identity(3), trials=50)
    assert res.trials_used == 1


def test_minor_gcd_is_deterministic_and_rejects_rank_deficiency():
    m = IntMatrix.from_dense([[2, 1, 4, 0], [0, 3, 1, 5]])
    assert probe_minor_gcd(m, seed=5) == probe_minor_gcd(m, seed=5)
    with pytest.raises(RankDeficient):
        probe_minor_gcd(IntMatrix.from_dense([[1, 2], [2, 4]]))


def test_minor_gcd_is_an_upper_bound_on_the_true_gcd():
    rng = random.Random(12)
    for _ in range(20):
        dense = random_int_matrix(rng, 2, 4, spread=3, density=0.8)
        if dense_rank_q(dense) < 2:
            continue
        true = 0
        for cs in itertools.combinations(range(4), 2):
            true = math.gcd(true, cofactor_det([[row[c] for c in cs] for row in dense]))
        got = probe_minor_gcd(IntMatrix.from_dense(dense), trials=8, seed=3).gcd
        assert got % true == 0
