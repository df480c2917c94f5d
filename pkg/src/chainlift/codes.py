"""CSS codes, the code/complex dictionary, code-family generators and distances.

A CSS code with ``x`` X-stabilizers, ``q`` qubits and ``z`` Z-stabilizers is the
three-term complex with ``dims == (x, q, z)``:

* ``boundaries[0]`` is ``x by q`` with a one where a qubit lies in an X-stabilizer;
* ``boundaries[1]`` is ``q by z`` with a one where a qubit lies in a Z-stabilizer.

Products and bundles of 1-complexes order their middle cells with the block
``a1 x b0`` first and ``a0 x b1`` second; a pair ``(alpha, beta)`` sits at
``alpha * dim_b + beta`` inside its block.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .core import BinMatrix, ChainComplex2, betti2, reduce_by, xor_basis
from .errors import (
    CommutationError,
    DimensionMismatch,
    DistanceBudgetExceeded,
    NoLogicalOperator,
)

__all__ = [
    "CssCode",
    "LdpcReport",
    "FiberBundleSpec",
    "SystolicReport",
    "css_to_complex",
    "complex_to_css",
    "check_ldpc",
    "gen_cycle",
    "gen_hypergraph_product",
    "gen_fiber_bundle",
    "gen_toric",
    "distance",
    "systolic_ratio",
]


@dataclass(frozen=True)
class CssCode:
    """Stabilizer supports of a CSS code; supports are stored sorted."""

    q: int
    x_stabs: tuple
    z_stabs: tuple

    def __post_init__(self):
        xs = tuple(tuple(sorted(set(s))) for s in self.x_stabs)
        zs = tuple(tuple(sorted(set(s))) for s in self.z_stabs)
        for s in xs + zs:
            for i in s:
                if not 0 <= i < self.q:
                    raise DimensionMismatch(f"qubit {i} outside 0..{self.q - 1}")
        object.__setattr__(self, "x_stabs", xs)
        object.__setattr__(self, "z_stabs", zs)
        zsets = [set(s) for s in zs]
        for a, xs_a in enumerate(xs):
            for k, zk in enumerate(zsets):
                if len(zk.intersection(xs_a)) % 2:
                    raise CommutationError(
                        f"X-stabilizer {a} and Z-stabilizer {k} overlap on an odd number of qubits"
                    )


def css_to_complex(code: CssCode) -> ChainComplex2:
    d_x = BinMatrix(len(code.x_stabs), code.q, tuple((i, j) for i, s in enumerate(code.x_stabs) for j in s))
    d_z = BinMatrix(code.q, len(code.z_stabs), tuple((i, k) for k, s in enumerate(code.z_stabs) for i in s))
    return ChainComplex2((len(code.x_stabs), code.q, len(code.z_stabs)), (d_x, d_z))


def complex_to_css(c: ChainComplex2) -> CssCode:
    if len(c.dims) != 3:
        raise DimensionMismatch(f"a code needs exactly three degrees, got {len(c.dims)}")
    d_x, d_z = c.boundaries
    return CssCode(c.dims[1], d_x.row_sets, d_z.col_sets)


@dataclass(frozen=True)
class LdpcReport:
    ok: bool
    worst: int


def check_ldpc(code: CssCode, bound: int) -> LdpcReport:
    """Check that every stabilizer and every qubit column has weight at most ``bound``."""
    weights = [len(s) for s in code.x_stabs] + [len(s) for s in code.z_stabs]
    for stabs in (code.x_stabs, code.z_stabs):
        per_qubit = [0] * code.q
        for s in stabs:
            for i in s:
                per_qubit[i] += 1
        weights += per_qubit
    worst = max(weights, default=0)
    return LdpcReport(worst <= bound, worst)


# ---------------------------------------------------------------- generators

def gen_cycle(m: int) -> ChainComplex2:
    """Cycle graph with ``m`` vertices and ``m`` edges; edge ``i`` joins ``i`` and ``i + 1``.

    For ``m == 1`` the single edge is a loop whose boundary vanishes mod 2.
    """
    if m < 1:
        raise ValueError("cycle length must be at least 1")
    d = BinMatrix.from_positions(m, m, [p for i in range(m) for p in ((i, i), ((i + 1) % m, i))])
    return ChainComplex2((m, m), (d,))


def _require_1complex(c: ChainComplex2, name: str) -> BinMatrix:
    if len(c.dims) != 2:
        raise DimensionMismatch(f"{name} must be a 1-complex (two degrees), got {len(c.dims)}")
    return c.boundaries[0]


def product_layout(a_dims, b_dims):
    """Offsets of the two middle blocks of a product; used by generators and lifts."""
    a0, a1 = a_dims
    b0, b1 = b_dims
    return a1 * b0, (a0 * b0, a1 * b0 + a0 * b1, a1 * b1)


def gen_hypergraph_product(a: ChainComplex2, b: ChainComplex2) -> ChainComplex2:
    """Tensor product of two 1-complexes, reduced mod 2."""
    from .lifting import product_lift
    from .core import mod2

    return mod2(product_lift(a, b))


@dataclass(frozen=True)
class FiberBundleSpec:
    """Circle bundle over a 1-complex.

    ``twists`` maps (base 1-cell, incident base 0-cell) to a cyclic shift in
    ``[0, fiber_len)``; incident pairs missing from the map get shift 0.
    """

    base: ChainComplex2
    fiber_len: int
    twists: Mapping = field(default_factory=dict)

    def __post_init__(self):
        d = _require_1complex(self.base, "bundle base")
        if self.fiber_len < 1:
            raise ValueError("fiber length must be at least 1")
        tw = {}
        for (b1, a0), s in dict(self.twists).items():
            b1, a0, s = int(b1), int(a0), int(s)
            if not 0 <= b1 < d.cols or a0 not in d.col_sets[b1]:
                raise ValueError(f"twist given for non-incident pair (1-cell {b1}, 0-cell {a0})")
            if not 0 <= s < self.fiber_len:
                raise ValueError(f"twist {s} outside [0, {self.fiber_len})")
            tw[b1, a0] = s
        object.__setattr__(self, "twists", tw)

    def shift(self, b1: int, a0: int) -> int:
        return self.twists.get((b1, a0), 0)


def gen_fiber_bundle(spec: FiberBundleSpec) -> ChainComplex2:
    from .lifting import fiber_bundle_lift
    from .core import mod2

    return mod2(fiber_bundle_lift(spec))


def gen_toric(L: int) -> ChainComplex2:
    """Toric code on an ``L`` by ``L`` torus, as the product of two ``L``-cycles."""
    cyc = gen_cycle(L)
    return gen_hypergraph_product(cyc, cyc)


# ---------------------------------------------------------------- distances

def _sides(c: ChainComplex2, side: str):
    """Check columns (as bitmasks) and image generators (as bitmasks) for one side."""
    if len(c.dims) != 3:
        raise DimensionMismatch("distance needs a three-term complex")
    d_x, d_z = c.boundaries
    if side == "homology":
        # cycles: kernel of d_x; trivial ones: image of d_z
        return d_x.col_bits, d_z.col_bits
    if side == "cohomology":
        return d_z.row_bits, d_x.row_bits
    raise ValueError(f"side must be 'homology' or 'cohomology', got {side!r}")


def _popcount(x: int) -> int:
    return bin(x).count("1")


def distance(c: ChainComplex2, side: str = "homology", budget: int | None = None, mitm: bool | None = None) -> int:
    """Minimum weight of a nontrivial middle-degree cycle (or cocycle).

    Supports are enumerated by increasing weight in lexicographic order.  Above
    weight 12, or whenever ``mitm`` is true, each weight is searched by meeting
    in the middle on syndromes.
    """
    if betti2(c, 1) == 0:
        raise NoLogicalOperator("middle homology is trivial")
    checks, image = _sides(c, side)
    q = c.dims[1]
    budget = q if budget is None else min(budget, q)
    trivial = xor_basis(image)

    def nontrivial(support: int) -> bool:
        return reduce_by(support, trivial) != 0

    for w in range(1, budget + 1):
        use_mitm = mitm if mitm is not None else w > 12
        found = _search_mitm(checks, q, w, nontrivial) if use_mitm else _search_plain(checks, q, w, nontrivial)
        if found:
            return w
    raise DistanceBudgetExceeded(budget)


def _search_plain(checks, q, w, nontrivial) -> bool:
    for combo in itertools.combinations(range(q), w):
        syn = 0
        for i in combo:
            syn ^= checks[i]
        if syn == 0:
            support = 0
            for i in combo:
                support |= 1 << i
            if nontrivial(support):
                return True
    return False


def _search_mitm(checks, q, w, nontrivial) -> bool:
    left_w = (w + 1) // 2
    right_w = w - left_w
    table: dict = {}
    for combo in itertools.combinations(range(q), right_w):
        syn = 0
        mask = 0
        for i in combo:
            syn ^= checks[i]
            mask |= 1 << i
        table.setdefault(syn, []).append(mask)
    for combo in itertools.combinations(range(q), left_w):
        syn = 0
        mask = 0
        for i in combo:
            syn ^= checks[i]
            mask |= 1 << i
        for other in table.get(syn, ()):
            # overlapping halves give a lighter word that an earlier weight already covered
            if mask & other:
                continue
            if nontrivial(mask | other):
                return True
    return False


@dataclass(frozen=True)
class SystolicReport:
    d_hom: int
    d_cohom: int
    n: int
    sr: Fraction


def systolic_ratio(c: ChainComplex2, budget: int | None = None, mitm: bool | None = None) -> SystolicReport:
    """Both distances and ``d_hom * d_cohom / n`` as an exact fraction."""
    d_hom = distance(c, "homology", budget, mitm)
    d_cohom = distance(c, "cohomology", budget, mitm)
    n = c.dims[1]
    return SystolicReport(d_hom, d_cohom, n, Fraction(d_hom * d_cohom, n))
