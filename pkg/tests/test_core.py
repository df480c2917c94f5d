from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainlift.codes import gen_cycle, gen_toric
from chainlift.core import (
    BinMatrix,
    ChainComplex2,
    ChainComplexZ,
    IntMatrix,
    betti2,
    kernel2,
    mod2,
    rank2,
    sparsity,
    validate_complex,
)
from chainlift.errors import DimensionMismatch
from chainlift.lifting import naive_lift

from _factories import corpus, dense_matmul, dense_rank_mod2, random_binmatrix


def test_binmatrix_basic_views():
    m = BinMatrix.from_dense([[1, 0, 1], [0, 1, 1]])
    assert m.shape == (2, 3)
    assert m.nnz == 4
    assert m.row_sets == ((0, 2), (1, 2))
    assert m.col_sets == ((0,), (1,), (0, 1))
    assert m.T.to_dense() == [[1, 0], [0, 1], [1, 1]]
    assert m.max_weight() == 2


def test_from_positions_cancels_pairs():
    m = BinMatrix.from_positions(2, 2, [(0, 0), (0, 0), (1, 1)])
    assert m.to_dense() == [[0, 0], [0, 1]]


def test_binmatrix_product_is_mod2():
    a = BinMatrix.from_dense([[1, 1], [1, 1]])
    assert (a @ a).to_dense() == [[0, 0], [0, 0]]


def test_intmatrix_product_and_mod2():
    a = IntMatrix.from_dense([[1, -1], [1, -1]])
    assert (a @ a).to_dense() == [[0, 0], [0, 0]]
    assert IntMatrix.from_dense([[2, 3]]).mod2().to_dense() == [[0, 1]]
    assert (-a).to_dense() == [[-1, 1], [-1, 1]]
    assert IntMatrix.from_dense([[2, -3]]).max_l1() == 5


def test_out_of_range_entry_rejected():
    with pytest.raises(IndexError):
        BinMatrix(2, 2, ((2, 0),))


def test_validate_zero_boundaries_ok():
    c = ChainComplex2.zero((3, 4, 5))
    assert validate_complex(c).ok


def test_validate_toric_three_against_dense_product():
    c = gen_toric(3)
    assert validate_complex(c).ok
    d1, d2 = (b.to_dense() for b in c.boundaries)
    assert all(v % 2 == 0 for row in dense_matmul(d1, d2) for v in row)


def test_validate_random_pair_reports_first_violation():
    rng = random.Random(7)
    a = random_binmatrix(rng, 10, 10, 0.5)
    b = random_binmatrix(rng, 10, 10, 0.5)
    c = ChainComplex2((10, 10, 10), (a, b))
    rep = validate_complex(c)
    prod = dense_matmul(a.to_dense(), b.to_dense())
    bad = [(0, i, j) for i in range(10) for j in range(10) if prod[i][j] % 2]
    assert bad, "seed was chosen so the product is nonzero"
    assert not rep.ok
    assert rep.violation == min(bad)


def test_dimension_mismatch_is_an_error_not_a_failed_check():
    with pytest.raises(DimensionMismatch):
        ChainComplex2((2, 3), (BinMatrix.zeros(3, 3),))
    with pytest.raises(DimensionMismatch):
        ChainComplex2.from_boundaries([BinMatrix.zeros(2, 3), BinMatrix.zeros(2, 2)])


def test_sparsity_examples():
    assert sparsity(ChainComplex2.zero((2, 2))) == 0
    lifted = ChainComplexZ.from_boundaries([IntMatrix.from_dense([[2], [3]])])
    assert sparsity(lifted) == 5
    assert sparsity(gen_toric(3)) == 4


def test_rank2_examples():
    assert rank2(BinMatrix.identity(6)) == 6
    assert rank2(BinMatrix.from_dense([[1, 1], [1, 1]])) == 1
    assert rank2(gen_toric(3).boundaries[0]) == 8


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 64), st.integers(1, 64), st.floats(0.02, 0.6), st.integers(0, 2 ** 32))
def test_rank2_matches_dense_oracle(rows, cols, density, seed):
    m = random_binmatrix(random.Random(seed), rows, cols, density)
    assert rank2(m) == dense_rank_mod2(m.to_dense())


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.integers(1, 30), st.integers(0, 2 ** 32))
def test_kernel2_is_a_kernel_basis(rows, cols, seed):
    m = random_binmatrix(random.Random(seed), rows, cols)
    ker = kernel2(m)
    assert len(ker) == cols - rank2(m)
    for v in ker:
        support = [j for j in range(cols) if v >> j & 1]
        acc = 0
        for j in support:
            acc ^= m.col_bits[j]
        assert acc == 0
    vecs = [[v >> j & 1 for j in range(cols)] for v in ker]
    assert dense_rank_mod2(vecs) == len(ker) if vecs else True


def test_betti_examples():
    for L in (2, 3, 4):
        assert betti2(gen_toric(L), 1) == 2
    assert betti2(ChainComplex2.zero((0, 5, 0)), 1) == 5
    for m in (1, 2, 5, 9):
        assert betti2(gen_cycle(m), 1) == 1


def test_betti_degree_out_of_range():
    with pytest.raises(IndexError):
        betti2(gen_toric(2), 3)


def test_mod2_examples():
    c = ChainComplexZ.from_boundaries([IntMatrix.from_dense([[2]])])
    assert mod2(c).boundaries[0].to_dense() == [[0]]
    for src in corpus(3, 20):
        assert mod2(naive_lift(src)) == src


def test_naive_lift_keeps_sparsity():
    for src in corpus(4, 30):
        assert sparsity(naive_lift(src)) == sparsity(src)


def test_generated_complexes_validate():
    for src in corpus(5, 50):
        assert validate_complex(src).ok
