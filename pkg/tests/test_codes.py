from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainlift.codes import (
    CssCode,
    FiberBundleSpec,
    check_ldpc,
    complex_to_css,
    css_to_complex,
    distance,
    gen_cycle,
    gen_fiber_bundle,
    gen_hypergraph_product,
    gen_toric,
    systolic_ratio,
)
from chainlift.core import BinMatrix, ChainComplex2, betti2, validate_complex
from chainlift.errors import CommutationError, DimensionMismatch, DistanceBudgetExceeded, NoLogicalOperator

from _factories import corpus, dense_rank_mod2, random_bundle_spec, random_hypergraph_complex


def brute_distance(c: ChainComplex2, side: str) -> int:
    """Minimum weight over every support, with membership decided by dense ranks."""
    d_x, d_z = (b.to_dense() for b in c.boundaries)
    q = c.dims[1]
    if side == "homology":
        checks = d_x  # rows are checks on qubits
        image = [list(col) for col in zip(*d_z)] if d_z and d_z[0] else []
    else:
        checks = [list(col) for col in zip(*d_z)] if d_z and d_z[0] else []
        image = [row[:] for row in d_x]
    base_rank = dense_rank_mod2(image) if image else 0
    best = None
    for mask in range(1, 1 << q):
        w = bin(mask).count("1")
        if best is not None and w >= best:
            continue
        v = [mask >> i & 1 for i in range(q)]
        if any(sum(a * b for a, b in zip(row, v)) % 2 for row in checks):
            continue
        if dense_rank_mod2(image + [v]) > base_rank:
            best = w
    return best


def test_two_qubit_code_gives_all_ones_boundary():
    code = CssCode(2, [[0, 1], [0, 1]], [])
    c = css_to_complex(code)
    assert c.dims == (2, 2, 0)
    assert c.boundaries[0].to_dense() == [[1, 1], [1, 1]]


def test_empty_code():
    c = css_to_complex(CssCode(0, [], []))
    assert c.dims == (0, 0, 0)
    assert complex_to_css(c) == CssCode(0, [], [])


def test_commutation_violation_rejected():
    with pytest.raises(CommutationError):
        CssCode(3, [[0, 1]], [[1, 2]])


def test_code_complex_round_trip():
    code = complex_to_css(gen_toric(2))
    assert complex_to_css(css_to_complex(code)) == code
    assert css_to_complex(code) == gen_toric(2)
    for c in corpus(21, 30):
        code = complex_to_css(c)
        assert css_to_complex(code) == c
        assert validate_complex(css_to_complex(code)).ok


def test_complex_to_css_needs_three_degrees():
    with pytest.raises(DimensionMismatch):
        complex_to_css(gen_cycle(3))


def test_check_ldpc_examples():
    rep = check_ldpc(complex_to_css(gen_toric(3)), 4)
    assert rep.ok and rep.worst == 4
    rep = check_ldpc(CssCode(10, [list(range(10))], []), 4)
    assert not rep.ok and rep.worst == 10
    assert check_ldpc(CssCode(0, [], []), 4) == type(rep)(True, 0)


def test_gen_cycle_examples():
    one = gen_cycle(1)
    assert one.dims == (1, 1) and one.boundaries[0].to_dense() == [[0]]
    from chainlift.core import rank2

    assert rank2(gen_cycle(3).boundaries[0]) == 2
    for m in range(1, 8):
        assert betti2(gen_cycle(m), 1) == 1


def test_hypergraph_product_shapes_and_validity():
    rng = random.Random(3)
    for _ in range(20):
        a = random_hypergraph_complex(rng, rng.randint(1, 4), rng.randint(1, 4))
        b = random_hypergraph_complex(rng, rng.randint(1, 4), rng.randint(1, 4))
        c = gen_hypergraph_product(a, b)
        (a0, a1), (b0, b1) = a.dims, b.dims
        assert c.dims == (a0 * b0, a1 * b0 + a0 * b1, a1 * b1)
        assert validate_complex(c).ok
    empty = ChainComplex2((0, 0), (BinMatrix.zeros(0, 0),))
    assert gen_hypergraph_product(gen_cycle(3), empty).dims == (0, 0, 0)


def test_toric_generator():
    assert gen_toric(2).dims[1] == 8
    assert validate_complex(gen_toric(1)).ok
    assert betti2(gen_toric(3), 1) == 2


def test_bundle_with_zero_twists_is_the_product():
    rng = random.Random(5)
    for _ in range(15):
        spec = random_bundle_spec(rng)
        plain = FiberBundleSpec(spec.base, spec.fiber_len, {})
        assert gen_fiber_bundle(plain) == gen_hypergraph_product(spec.base, gen_cycle(spec.fiber_len))


def test_bundle_with_fiber_one_is_untwisted():
    base = gen_cycle(3)
    assert gen_fiber_bundle(FiberBundleSpec(base, 1)) == gen_hypergraph_product(base, gen_cycle(1))


def test_twisted_bundle_validates():
    spec = FiberBundleSpec(gen_cycle(3), 3, {(0, 0): 1})
    assert validate_complex(gen_fiber_bundle(spec)).ok
    rng = random.Random(8)
    for _ in range(20):
        assert validate_complex(gen_fiber_bundle(random_bundle_spec(rng))).ok


def test_twist_spec_validation():
    with pytest.raises(ValueError):
        FiberBundleSpec(gen_cycle(3), 3, {(0, 2): 1})  # 1-cell 0 does not touch 0-cell 2
    with pytest.raises(ValueError):
        FiberBundleSpec(gen_cycle(3), 3, {(0, 0): 3})
    with pytest.raises(ValueError):
        FiberBundleSpec(gen_cycle(3), 0)


def test_distance_examples():
    assert distance(gen_toric(3), "homology") == 3
    assert distance(gen_toric(2), "cohomology") == 2
    with pytest.raises(NoLogicalOperator):
        distance(ChainComplex2.from_boundaries([BinMatrix.identity(2), BinMatrix.zeros(2, 0)]))


def test_distance_matches_brute_force_on_toric_two():
    c = gen_toric(2)
    for side in ("homology", "cohomology"):
        assert distance(c, side) == brute_distance(c, side) == 2


def _small_codes(seed, count, max_q=12):
    out = []
    for c in corpus(seed, 400):
        if 0 < c.dims[1] <= max_q and betti2(c, 1) > 0:
            out.append(c)
        if len(out) == count:
            break
    return out


def test_distance_matches_brute_force_on_random_codes():
    for c in _small_codes(31, 25):
        for side in ("homology", "cohomology"):
            assert distance(c, side) == brute_distance(c, side)


def test_meet_in_the_middle_agrees_with_plain_search():
    for c in _small_codes(32, 25, max_q=16):
        for side in ("homology", "cohomology"):
            assert distance(c, side, mitm=True) == distance(c, side, mitm=False)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_distance_invariant_under_relabeling(seed):
    rng = random.Random(seed)
    c = gen_toric(3)
    code = complex_to_css(c)
    perm = list(range(code.q))
    rng.shuffle(perm)
    xs = [[perm[i] for i in s] for s in code.x_stabs]
    zs = [[perm[i] for i in s] for s in code.z_stabs]
    rng.shuffle(xs)
    rng.shuffle(zs)
    other = css_to_complex(CssCode(code.q, xs, zs))
    for side in ("homology", "cohomology"):
        assert distance(other, side) == distance(c, side)


def test_distance_budget():
    with pytest.raises(DistanceBudgetExceeded) as info:
        distance(gen_toric(3), "homology", budget=2)
    assert info.value.budget == 2


def test_systolic_ratio_toric():
    for L in (2, 3):
        rep = systolic_ratio(gen_toric(L))
        assert (rep.d_hom, rep.d_cohom, rep.n) == (L, L, 2 * L * L)
        assert rep.sr == Fraction(1, 2)
        assert isinstance(rep.sr, Fraction)


def test_systolic_ratio_of_acyclic_product_has_no_logical():
    path = ChainComplex2.from_boundaries([BinMatrix.from_dense([[1, 0], [1, 1], [0, 1]])])
    with pytest.raises(NoLogicalOperator):
        systolic_ratio(gen_hypergraph_product(path, path))
