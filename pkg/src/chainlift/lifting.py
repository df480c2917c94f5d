"""Lifts of binary chain complexes to integer chain complexes.

A lift replaces every entry of every boundary by an integer of the same
parity.  It is admissible when consecutive lifted boundaries still compose to
zero over the integers.  Five constructions are provided:

* ``naive_lift``: 1 becomes 1.
* ``general_lift``: always admissible with torsion-free homology, but dense.
* ``sparse_lift``: keeps a chosen lift of the first boundary and solves a
  small integer system per 2-cell for the second.
* ``product_lift``: signed tensor product of two 1-complexes.
* ``fiber_bundle_lift``: signed twisted product of a 1-complex with a circle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Union

from .core import (
    BinMatrix,
    ChainComplex2,
    ChainComplexZ,
    IntMatrix,
    ValidationReport,
    kernel2,
    mod2,
    reduce_by,
    sparsity,
    validate_complex,
    xor_basis,
)
from .errors import DimensionMismatch, LiftBoundExceeded, NoSparseLift
from .zhomology import snf, solve_integer

__all__ = [
    "LiftResult",
    "LocalLiftMatrix",
    "naive_lift",
    "check_admissible",
    "general_lift",
    "product_lift",
    "fiber_bundle_lift",
    "local_matrix",
    "has_2torsion",
    "solve_lift_vector",
    "sparse_lift",
    "BOUND_SCHEDULE",
]

#: sup-norm bounds tried in turn by ``sparse_lift`` when searching lift vectors
BOUND_SCHEDULE = (3, 6, 12, 24, 48, 65)


@dataclass(frozen=True)
class LiftResult:
    lifted: ChainComplexZ
    parity_ok: bool
    admissible: bool
    sparsity_in: int
    sparsity_out: int
    max_local_l1: int | None = None  # largest |v_z|_1 chosen by sparse_lift


def _parity_ok(lifted: ChainComplexZ, source: ChainComplex2) -> bool:
    return lifted.dims == source.dims and mod2(lifted).boundaries == source.boundaries


def describe_lift(lifted: ChainComplexZ, source: ChainComplex2, max_local_l1=None) -> LiftResult:
    return LiftResult(
        lifted,
        _parity_ok(lifted, source),
        validate_complex(lifted).ok,
        sparsity(source),
        sparsity(lifted),
        max_local_l1,
    )


def naive_lift(c: ChainComplex2) -> ChainComplexZ:
    return ChainComplexZ(c.dims, tuple(IntMatrix.naive(b) for b in c.boundaries))


def check_admissible(c: ChainComplexZ) -> ValidationReport:
    """Whether consecutive boundaries compose to zero over Z, with the first violation."""
    return validate_complex(c)


# ---------------------------------------------------------------- products and bundles

def lift_1complex(c: ChainComplex2) -> ChainComplexZ:
    """Torsion-free lift of a binary 1-complex.

    When every column has at most two ones the complex is a graph and each
    edge is oriented from its lower to its higher endpoint (-1 at the tail,
    +1 at the head); incidence matrices of oriented graphs are totally
    unimodular.  Anything else goes through :func:`general_lift`.
    """
    if len(c.dims) != 2:
        raise DimensionMismatch(f"expected a 1-complex (two degrees), got {len(c.dims)}")
    d = c.boundaries[0]
    if all(len(col) <= 2 for col in d.col_sets):
        ents = []
        for e, col in enumerate(d.col_sets):
            if len(col) == 1:
                ents.append((col[0], e, 1))
            elif len(col) == 2:
                ents += [(col[0], e, -1), (col[1], e, 1)]
        return ChainComplexZ(c.dims, (IntMatrix.from_dict(d.rows, d.cols, {(r, k): v for r, k, v in ents}),))
    return general_lift(c).lifted


def _as_int_1complex(c, name: str) -> ChainComplexZ:
    if len(c.dims) != 2:
        raise DimensionMismatch(f"{name} must be a 1-complex (two degrees), got {len(c.dims)}")
    return lift_1complex(c) if isinstance(c, ChainComplex2) else c


def product_lift(a, b) -> ChainComplexZ:
    """Signed tensor product of two 1-complexes.

    Binary factors are lifted with :func:`lift_1complex` first.  Cells are ordered as
    ``a0 b0`` in degree 0, ``[a1 b0 | a0 b1]`` in degree 1 and ``a1 b1`` in
    degree 2, and the boundary follows the Koszul rule
    ``d(x y) = dx y + (-1)^deg(x) x dy``.
    """
    a = _as_int_1complex(a, "first factor")
    b = _as_int_1complex(b, "second factor")
    (a0, a1), (b0, b1) = a.dims, b.dims
    da, db = a.boundaries[0], b.boundaries[0]
    off = a1 * b0
    d1 = {}
    for u, e, val in da.entries:
        for v in range(b0):
            d1[u * b0 + v, e * b0 + v] = val
    for v, f, val in db.entries:
        for u in range(a0):
            d1[u * b0 + v, off + u * b1 + f] = val
    d2 = {}
    for u, e, val in da.entries:
        for f in range(b1):
            d2[off + u * b1 + f, e * b1 + f] = val
    for v, f, val in db.entries:
        for e in range(a1):
            d2[e * b0 + v, e * b1 + f] = -val
    dims = (a0 * b0, a1 * b0 + a0 * b1, a1 * b1)
    return ChainComplexZ(
        dims,
        (IntMatrix.from_dict(dims[0], dims[1], d1), IntMatrix.from_dict(dims[1], dims[2], d2)),
    )


def fiber_bundle_lift(spec) -> ChainComplexZ:
    """Signed lift of a circle bundle over a 1-complex.

    The fiber circle has ``m`` vertices and ``m`` edges, edge ``e`` running
    from vertex ``e`` to vertex ``e + 1`` with lifted boundary head minus tail.
    A twist shifts fiber cells cyclically.  The base is lifted with
    :func:`lift_1complex`, and the twisted base term carries the base sign on
    fiber vertices and its negative on fiber edges so that the two
    boundaries compose to zero.  The cell order matches :func:`product_lift`;
    with zero twists the binary complexes coincide, while the integer ones
    differ by the fiber's wrap-around orientation and an overall sign on the
    second boundary.
    """
    d = lift_1complex(spec.base).boundaries[0]
    m = spec.fiber_len
    b0, b1 = spec.base.dims
    off = b1 * m
    d1: dict = {}
    d2: dict = {}

    def bump(target, key, val):
        nv = target.get(key, 0) + val
        if nv:
            target[key] = nv
        else:
            target.pop(key, None)

    for e in range(b1):
        for a, sign in d.col_dicts[e].items():
            s = spec.shift(e, a)
            for j in range(m):
                bump(d1, (a * m + (j + s) % m, e * m + j), sign)
                bump(d2, (off + a * m + (j + s) % m, e * m + j), -sign)
    for a in range(b0):
        for j in range(m):
            bump(d1, (a * m + (j + 1) % m, off + a * m + j), 1)
            bump(d1, (a * m + j, off + a * m + j), -1)
    for e in range(b1):
        for j in range(m):
            bump(d2, (e * m + (j + 1) % m, e * m + j), 1)
            bump(d2, (e * m + j, e * m + j), -1)
    dims = (b0 * m, b1 * m + b0 * m, b1 * m)
    return ChainComplexZ(
        dims,
        (IntMatrix.from_dict(dims[0], dims[1], d1), IntMatrix.from_dict(dims[1], dims[2], d2)),
    )


# ---------------------------------------------------------------- general lift

def _bits_to_list(v: int):
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def _apply_boundary(d: BinMatrix, v: int) -> int:
    out = 0
    for j in _bits_to_list(v):
        out ^= d.col_bits[j]
    return out


def _adapted_bases(c: ChainComplex2):
    """Per degree, columns [boundaries | homology | complement] of a basis change.

    Working from the top degree down, the complement vectors of degree ``j + 1``
    map to the boundary block of degree ``j`` in order, so in the new bases every
    boundary matrix is a partial identity.
    """
    n = len(c.dims)
    blocks = [None] * n
    incoming: list[int] = []
    for j in range(n - 1, -1, -1):
        dim = c.dims[j]
        out_b = c.boundaries[j - 1] if j >= 1 else None
        kernel = kernel2(out_b) if out_b is not None else [1 << i for i in range(dim)]
        span = xor_basis(incoming)
        if len(span) != len(incoming):
            raise AssertionError("images of complement vectors must be independent")
        harmonic = []
        for v in kernel:
            r = reduce_by(v, span)
            if r:
                span[r.bit_length() - 1] = r
                harmonic.append(v)
        complement = []
        for i in range(dim):
            v = 1 << i
            r = reduce_by(v, span)
            if r:
                span[r.bit_length() - 1] = r
                complement.append(v)
        blocks[j] = (list(incoming), harmonic, complement)
        incoming = [_apply_boundary(out_b, v) for v in complement] if out_b is not None else []
    return blocks


def _elementary_lift(columns: list[int], n: int):
    """Integer lifts of a binary basis change and of its inverse.

    ``columns`` are the basis vectors as bitmasks.  Gauss-Jordan reduction
    writes the change of basis as a product of swaps and transvections; each
    factor is lifted on its own (a transvection to ``I + e_ij``), which makes
    the two returned dense matrices exact integer inverses of each other.
    """
    rows = [0] * n
    for c, v in enumerate(columns):
        for r in _bits_to_list(v):
            rows[r] |= 1 << c
    fwd = [[int(i == j) for j in range(n)] for i in range(n)]  # lift of R
    inv = [[int(i == j) for j in range(n)] for i in range(n)]  # lift of R^-1
    for col in range(n):
        piv = next(r for r in range(col, n) if rows[r] >> col & 1)
        if piv != col:
            rows[piv], rows[col] = rows[col], rows[piv]
            inv[piv], inv[col] = inv[col], inv[piv]
            for row in fwd:
                row[piv], row[col] = row[col], row[piv]
        for r in range(n):
            if r != col and rows[r] >> col & 1:
                rows[r] ^= rows[col]
                # row r += row col on the inverse side, column col -= column r on the forward side
                inv[r] = [x + y for x, y in zip(inv[r], inv[col])]
                for row in fwd:
                    row[col] -= row[r]
    return fwd, inv


def general_lift(c: ChainComplex2) -> LiftResult:
    """Admissible, torsion-free lift of any valid binary complex.

    Each space gets a new basis in which every boundary becomes a partial
    identity.  The partial identities and the basis changes are lifted
    separately, and each lifted boundary is the conjugate of its partial
    identity by the lifted basis changes.
    """
    report = validate_complex(c)
    if not report.ok:
        raise ValueError(f"input is not a complex: violation at {report.violation}")
    blocks = _adapted_bases(c)
    lifts = [_elementary_lift(sum(blk, []), dim) for blk, dim in zip(blocks, c.dims)]
    out = []
    for j in range(len(c.boundaries)):
        fwd_lo = lifts[j][0]
        inv_hi = lifts[j + 1][1]
        n_bnd_hi = len(blocks[j + 1][0]) + len(blocks[j + 1][1])
        acc: dict = {}
        # complement vector k of degree j+1 maps to boundary vector k of degree j
        for k in range(len(blocks[j + 1][2])):
            left_col = [fwd_lo[r][k] for r in range(c.dims[j])]
            right_row = inv_hi[n_bnd_hi + k]
            for r, lv in enumerate(left_col):
                if not lv:
                    continue
                for cc, rv in enumerate(right_row):
                    if rv:
                        acc[r, cc] = acc.get((r, cc), 0) + lv * rv
        out.append(IntMatrix.from_dict(c.dims[j], c.dims[j + 1], acc))
    lifted = ChainComplexZ(c.dims, tuple(out))
    return describe_lift(lifted, c)


# ---------------------------------------------------------------- sparse lift

@dataclass(frozen=True)
class LocalLiftMatrix:
    """Lifted first boundary restricted to the cells around one 2-cell."""

    two_cell: int
    row_cells: tuple
    col_cells: tuple
    mat: IntMatrix


def local_matrix(z: int, lifted_d1: IntMatrix, d2: BinMatrix) -> LocalLiftMatrix:
    if not 0 <= z < d2.cols:
        raise IndexError(f"2-cell {z} outside 0..{d2.cols - 1}")
    cols = tuple(d2.col_sets[z])
    rows = tuple(sorted({r for e in cols for r in lifted_d1.col_dicts[e]}))
    pos = {r: i for i, r in enumerate(rows)}
    ents = tuple((pos[r], k, v) for k, e in enumerate(cols) for r, v in lifted_d1.col_dicts[e].items())
    return LocalLiftMatrix(z, rows, cols, IntMatrix(len(rows), len(cols), ents))


def has_2torsion(a: IntMatrix) -> bool:
    """True when some Smith invariant factor of ``a`` is even."""
    return any(d % 2 == 0 for d in snf(a).invariant_factors)


def _odd_vectors(n: int, level: int, bound: int):
    """All vectors with odd entries of magnitude <= bound and l1 norm ``level``, sorted."""
    extra = (level - n) // 2
    cap = (bound - 1) // 2
    out = []

    def compositions(k, left):
        if k == 1:
            if left <= cap:
                yield (left,)
            return
        for x in range(min(left, cap) + 1):
            for rest in compositions(k - 1, left - x):
                yield (x,) + rest

    for comp in compositions(n, extra):
        mags = [1 + 2 * e for e in comp]
        for signs in itertools.product((-1, 1), repeat=n):
            out.append(tuple(s * m for s, m in zip(signs, mags)))
    out.sort()
    return out


def solve_lift_vector(a, bound: int = BOUND_SCHEDULE[0]) -> tuple:
    """Odd integer kernel vector of minimal l1 norm.

    Ties go to the smallest correction ``w = (1 - v) / 2`` in l1 norm, then to
    the lexicographically smallest vector, so ``v = 1`` wins whenever it works.

    ``a`` is a :class:`LocalLiftMatrix` or a bare :class:`IntMatrix`.  A seed
    solution ``1 - 2w`` comes from solving ``A w = (A 1) / 2`` over Z; the
    minimum is then found by exhaustive search of odd vectors with entries
    bounded by ``bound`` in absolute value, level by level in l1 norm.
    """
    two_cell = a.two_cell if isinstance(a, LocalLiftMatrix) else -1
    mat = a.mat if isinstance(a, LocalLiftMatrix) else a
    n = mat.cols
    if n == 0:
        return ()
    ones = [sum(row.values()) for row in mat.row_dicts]
    if any(x % 2 for x in ones):
        raise ValueError("A times the all-ones vector must be even")
    if has_2torsion(mat):
        raise NoSparseLift(two_cell)
    w = solve_integer(mat, [x // 2 for x in ones])
    if w is None:  # cannot happen without 2-torsion; kept as a guard
        raise NoSparseLift(two_cell)
    seed = tuple(1 - 2 * x for x in w)
    seed_l1 = sum(abs(x) for x in seed)
    top = n * bound if bound % 2 else n * (bound - 1)
    if max(abs(x) for x in seed) <= bound:
        top = min(top, seed_l1)
    rows = mat.row_dicts
    for level in range(n, top + 1, 2):
        hits = [v for v in _odd_vectors(n, level, bound) if all(sum(val * v[c] for c, val in row.items()) == 0 for row in rows)]
        if hits:
            return min(hits, key=lambda v: (sum(abs(1 - x) for x in v), v))
    raise LiftBoundExceeded(bound, None if two_cell < 0 else two_cell)


def sparse_lift(c: ChainComplex2, d1_lift: Union[str, IntMatrix] = "naive") -> LiftResult:
    """Keep a lift of the first boundary and solve for the second cell by cell.

    ``d1_lift`` is ``"naive"`` or an explicit integer matrix of the right
    parity.  Each 2-cell's column is the lift vector of its local matrix; the
    sup-norm bound steps through ``BOUND_SCHEDULE`` before giving up.
    """
    if len(c.dims) != 3:
        raise DimensionMismatch("sparse lift needs a three-term complex")
    d1, d2 = c.boundaries
    if isinstance(d1_lift, str):
        if d1_lift != "naive":
            raise ValueError(f"unknown first-boundary lift {d1_lift!r}")
        ld1 = IntMatrix.naive(d1)
    else:
        ld1 = d1_lift
        if ld1.shape != d1.shape or ld1.mod2() != d1:
            raise ValueError("first-boundary lift does not reduce to the source mod 2")
    cols: dict = {}
    worst = 0
    for z in range(d2.cols):
        local = local_matrix(z, ld1, d2)
        for k, bound in enumerate(BOUND_SCHEDULE):
            try:
                v = solve_lift_vector(local, bound)
                break
            except LiftBoundExceeded:
                if k == len(BOUND_SCHEDULE) - 1:
                    raise LiftBoundExceeded(bound, z) from None
        worst = max(worst, sum(abs(x) for x in v))
        for e, val in zip(local.col_cells, v):
            cols[e, z] = val
    lifted = ChainComplexZ(c.dims, (ld1, IntMatrix.from_dict(d2.rows, d2.cols, cols)))
    return describe_lift(lifted, c, worst)
