"""Exact integer linear algebra: Hermite and Smith forms, integer homology,
and two torsion probes (sparse LU over F2 and gcd of maximal minors).

Normal forms work on dense Python-int copies of the input; entries are
arbitrary precision, so intermediate growth never overflows.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .core import BinMatrix, ChainComplexZ, IntMatrix, validate_complex
from .errors import FillBudgetExceeded, NotAdmissible, RankDeficient, SingularMatrix

__all__ = [
    "HnfResult",
    "SnfResult",
    "DegreeHomology",
    "HomologySummary",
    "LuResult",
    "MinorGcdResult",
    "hnf",
    "snf",
    "bareiss_det",
    "rank_z",
    "homology_z",
    "try_sparse_lu",
    "probe_minor_gcd",
]


def _dense(m: IntMatrix) -> list[list[int]]:
    return m.to_dense()


def _eye(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y == g >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# ---------------------------------------------------------------- Hermite

@dataclass(frozen=True)
class HnfResult:
    """Row-style Hermite form: ``transform @ matrix == h``.

    ``h`` is in row echelon form with positive pivots, and each entry above a
    pivot lies in ``[0, pivot)``.
    """

    h: IntMatrix
    transform: IntMatrix
    rank: int
    pivots: tuple


def hnf(m: IntMatrix) -> HnfResult:
    a = _dense(m)
    rows, cols = m.rows, m.cols
    u = _eye(rows)
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        # fold every lower entry of column c into row r with extended-gcd steps
        for i in range(r + 1, rows):
            if a[i][c] == 0:
                continue
            if a[r][c] == 0:
                a[r], a[i] = a[i], a[r]
                u[r], u[i] = u[i], u[r]
                continue
            g, x, y = _xgcd(a[r][c], a[i][c])
            p, s = a[r][c] // g, a[i][c] // g
            ar, ai = a[r], a[i]
            a[r] = [x * vr + y * vi for vr, vi in zip(ar, ai)]
            a[i] = [p * vi - s * vr for vr, vi in zip(ar, ai)]
            ur, ui = u[r], u[i]
            u[r] = [x * vr + y * vi for vr, vi in zip(ur, ui)]
            u[i] = [p * vi - s * vr for vr, vi in zip(ur, ui)]
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-v for v in a[r]]
            u[r] = [-v for v in u[r]]
        piv = a[r][c]
        for i in range(r):
            q = a[i][c] // piv
            if q:
                a[i] = [vi - q * vr for vi, vr in zip(a[i], a[r])]
                u[i] = [vi - q * vr for vi, vr in zip(u[i], u[r])]
        pivots.append(c)
        r += 1
    return HnfResult(IntMatrix.from_dense(a, cols), IntMatrix.from_dense(u, rows), r, tuple(pivots))


def solve_integer(m: IntMatrix, rhs: list[int]) -> list[int] | None:
    """One integer solution ``x`` of ``m @ x == rhs``, or ``None`` if there is none.

    Uses the Hermite form of the transpose: ``U @ m.T == H`` gives
    ``m @ U.T == H.T``, a triangular system in the new unknowns.
    """
    res = hnf(m.T)
    h = res.h.to_dense()
    y = [0] * m.cols
    for i, pc in enumerate(res.pivots):
        acc = sum(y[k] * h[k][pc] for k in range(i))
        num = rhs[pc] - acc
        if num % h[i][pc]:
            return None
        y[i] = num // h[i][pc]
    ut = res.transform.T
    x = [sum(v * y[c] for c, v in ut.row_dicts[r].items()) for r in range(ut.rows)]
    check = [sum(v * x[c] for c, v in row.items()) for row in m.row_dicts]
    return x if check == list(rhs) else None


# ---------------------------------------------------------------- Smith

@dataclass(frozen=True)
class SnfResult:
    """Smith form ``left @ matrix @ right == diag(invariant_factors)``."""

    invariant_factors: tuple
    rank: int
    left: IntMatrix | None = None
    right: IntMatrix | None = None

    def diagonal(self, rows: int, cols: int) -> IntMatrix:
        return IntMatrix(rows, cols, tuple((i, i, d) for i, d in enumerate(self.invariant_factors)))


def snf(m: IntMatrix, transforms: bool = False) -> SnfResult:
    """Smith normal form by minimal-magnitude pivoting.

    Ties between equally small pivots go to the lowest Markowitz count
    ``(row nonzeros - 1) * (col nonzeros - 1)``, then to the lexicographically
    first position.
    """
    a = _dense(m)
    rows, cols = m.rows, m.cols
    left = _eye(rows) if transforms else None
    right = _eye(cols) if transforms else None

    def swap_rows(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            if left is not None:
                left[i], left[j] = left[j], left[i]

    def swap_cols(i, j):
        if i != j:
            for row in a:
                row[i], row[j] = row[j], row[i]
            if right is not None:
                for row in right:
                    row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        a[dst] = [vd + q * vs for vd, vs in zip(a[dst], a[src])]
        if left is not None:
            left[dst] = [vd + q * vs for vd, vs in zip(left[dst], left[src])]

    def add_col(dst, src, q):
        for row in a:
            row[dst] += q * row[src]
        if right is not None:
            for row in right:
                row[dst] += q * row[src]

    factors = []
    t = 0
    while t < min(rows, cols):
        best = None
        row_nz = [sum(1 for j in range(t, cols) if a[i][j]) for i in range(rows)]
        col_nz = [sum(1 for i in range(t, rows) if a[i][j]) for j in range(cols)]
        for i in range(t, rows):
            for j in range(t, cols):
                v = a[i][j]
                if v:
                    key = (abs(v), (row_nz[i] - 1) * (col_nz[j] - 1), i, j)
                    if best is None or key < best:
                        best = key
        if best is None:
            break
        swap_rows(t, best[2])
        swap_cols(t, best[3])
        p = a[t][t]
        dirty = False
        for i in range(t + 1, rows):
            if a[i][t]:
                add_row(i, t, -(a[i][t] // p))
                dirty = dirty or a[i][t] != 0
        for j in range(t + 1, cols):
            if a[t][j]:
                add_col(j, t, -(a[t][j] // p))
                dirty = dirty or a[t][j] != 0
        if dirty:
            continue  # a smaller remainder appeared; choose a new pivot
        bad = next(
            (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p),
            None,
        )
        if bad is not None:
            add_row(t, bad, 1)
            continue
        if p < 0:
            a[t] = [-v for v in a[t]]
            if left is not None:
                left[t] = [-v for v in left[t]]
        factors.append(a[t][t])
        t += 1
    return SnfResult(
        tuple(factors),
        len(factors),
        IntMatrix.from_dense(left, rows) if left is not None else None,
        IntMatrix.from_dense(right, cols) if right is not None else None,
    )


def bareiss_det(a: list[list[int]]) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def rank_z(m: IntMatrix) -> int:
    """Rank over the rationals (equal to the number of nonzero Smith factors)."""
    return hnf(m).rank


# ---------------------------------------------------------------- homology

@dataclass(frozen=True)
class DegreeHomology:
    free_rank: int
    torsion: tuple  # invariant factors > 1
    cohomology_torsion: tuple


@dataclass(frozen=True)
class HomologySummary:
    degrees: tuple

    @property
    def free_ranks(self) -> tuple:
        return tuple(d.free_rank for d in self.degrees)

    @property
    def torsion_free(self) -> bool:
        return all(not d.torsion for d in self.degrees)


def homology_z(c: ChainComplexZ) -> HomologySummary:
    """Integer homology per degree.

    Homology torsion in degree ``j`` comes from the boundary arriving at ``j``.
    Cohomology torsion in degree ``j`` equals homology torsion in degree ``j - 1``.
    """
    report = validate_complex(c)
    if not report.ok:
        raise NotAdmissible(f"boundaries do not compose to zero at {report.violation}")
    smiths = [snf(b) for b in c.boundaries]
    ranks = [s.rank for s in smiths]
    out = []
    prev_torsion: tuple = ()
    for j, dim in enumerate(c.dims):
        r_out = ranks[j - 1] if j >= 1 else 0
        r_in = ranks[j] if j < len(ranks) else 0
        torsion = tuple(d for d in smiths[j].invariant_factors if d > 1) if j < len(smiths) else ()
        out.append(DegreeHomology(dim - r_out - r_in, torsion, prev_torsion))
        prev_torsion = torsion
    return HomologySummary(tuple(out))


# ---------------------------------------------------------------- sparse LU probe

@dataclass(frozen=True)
class LuResult:
    """``matrix[row_perm][:, col_perm] == lower @ upper`` over F2.

    ``lifted`` is the integer matrix obtained by undoing the permutations on
    the product of the naive lifts of the two triangular factors; it reduces
    to the input mod 2 and has determinant ``det`` (always +1 or -1).
    """

    row_perm: tuple
    col_perm: tuple
    lower: BinMatrix
    upper: BinMatrix
    fill: int
    lifted: IntMatrix
    det: int


def _perm_sign(perm) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def try_sparse_lu(m: BinMatrix, fill_budget: int | None = None) -> LuResult:
    """Markowitz-pivoted LU over F2 of a square binary matrix."""
    if m.rows != m.cols:
        raise ValueError(f"LU needs a square matrix, got {m.shape}")
    n = m.rows
    rows = list(m.row_bits)
    active_rows = set(range(n))
    col_count = [len(s) for s in m.col_sets]
    row_order, col_order = [], []
    lower_pos = []  # (original row, step)
    upper_rows = []  # bitmask over original columns
    nnz_l = nnz_u = 0
    for step in range(n):
        best = None
        for r in sorted(active_rows):
            bits = rows[r]
            rc = bin(bits).count("1")
            while bits:
                low = bits & -bits
                c = low.bit_length() - 1
                bits ^= low
                key = ((rc - 1) * (col_count[c] - 1), r, c)
                if best is None or key < best:
                    best = key
        if best is None:
            raise SingularMatrix(f"no nonzero pivot left at step {step} of {n}")
        _, pr, pc = best
        prow = rows[pr]
        active_rows.discard(pr)
        row_order.append(pr)
        col_order.append(pc)
        upper_rows.append(prow)
        nnz_u += bin(prow).count("1")
        # remove the pivot row's contribution to column counts
        bits = prow
        while bits:
            low = bits & -bits
            col_count[low.bit_length() - 1] -= 1
            bits ^= low
        for r in active_rows:
            if rows[r] >> pc & 1:
                before = rows[r]
                rows[r] ^= prow
                changed = before ^ rows[r]
                while changed:
                    low = changed & -changed
                    c = low.bit_length() - 1
                    col_count[c] += 1 if rows[r] & low else -1
                    changed ^= low
                lower_pos.append((r, step))
                nnz_l += 1
        # nnz(L) + nnz(U) only grows, so the budget can be enforced as we go
        if fill_budget is not None and nnz_l + nnz_u - m.nnz > fill_budget:
            raise FillBudgetExceeded(nnz_l + nnz_u - m.nnz, fill_budget)
    # unit diagonal of the lower factor is not stored in nnz_l, so the n terms cancel
    fill = nnz_l + nnz_u - m.nnz
    row_pos = {r: k for k, r in enumerate(row_order)}
    col_pos = {c: k for k, c in enumerate(col_order)}
    lower = BinMatrix(n, n, tuple([(k, k) for k in range(n)] + [(row_pos[r], s) for r, s in lower_pos]))
    upper_ents = []
    for k, bits in enumerate(upper_rows):
        while bits:
            low = bits & -bits
            upper_ents.append((k, col_pos[low.bit_length() - 1]))
            bits ^= low
    upper = BinMatrix(n, n, tuple(upper_ents))
    prod = IntMatrix.naive(lower) @ IntMatrix.naive(upper)
    lifted = IntMatrix(n, n, tuple((row_order[a], col_order[b], v) for a, b, v in prod.entries))
    det = _perm_sign(row_order) * _perm_sign(col_order)
    return LuResult(tuple(row_order), tuple(col_order), lower, upper, fill, lifted, det)


# ---------------------------------------------------------------- gcd of maximal minors

@dataclass(frozen=True)
class MinorGcdResult:
    gcd: int
    trials_used: int
    determinants: tuple


def _independent_columns(a: list[list[int]], order: list[int], need: int) -> list[int]:
    """Greedily pick columns in ``order`` that are linearly independent over Q."""
    basis: list[tuple[int, list[Fraction]]] = []  # (pivot index, reduced vector)
    chosen = []
    for c in order:
        vec = [Fraction(row[c]) for row in a]
        for piv, b in basis:
            if vec[piv]:
                f = vec[piv] / b[piv]
                vec = [x - f * y for x, y in zip(vec, b)]
        piv = next((i for i, x in enumerate(vec) if x), None)
        if piv is None:
            continue
        basis.append((piv, vec))
        chosen.append(c)
        if len(chosen) == need:
            break
    return chosen


def probe_minor_gcd(m: IntMatrix, trials: int = 16, seed: int = 0) -> MinorGcdResult:
    """Running gcd of sampled full-rank maximal minors, stopping early at 1.

    The result is a multiple of the true gcd of all maximal minors, so a value
    of 1 certifies that the cokernel is torsion free.
    """
    if rank_z(m) != m.rows:
        raise RankDeficient(f"matrix of shape {m.shape} lacks full row rank")
    a = m.to_dense()
    rng = random.Random(seed)
    g = 0
    dets = []
    used = 0
    for _ in range(trials):
        used += 1
        order = list(range(m.cols))
        rng.shuffle(order)
        chosen = sorted(_independent_columns(a, order, m.rows))
        det = bareiss_det([[row[c] for c in chosen] for row in a])
        dets.append(det)
        g = math.gcd(g, det)
        if g == 1:
            break
    return MinorGcdResult(g, used, tuple(dets))
