"""Sparse exact matrices over F2 and Z, and chain complexes built from them.

Index convention, used everywhere in the package: ``boundaries[j]`` maps
degree ``j + 1`` to degree ``j``, so its shape is ``(dims[j], dims[j + 1])``.
A CSS code is a complex with ``dims == (x, q, z)``: degree 0 holds the
X-stabilizers, degree 1 the qubits, degree 2 the Z-stabilizers.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

from .errors import DimensionMismatch

__all__ = [
    "BinMatrix",
    "IntMatrix",
    "ChainComplex2",
    "ChainComplexZ",
    "ValidationReport",
    "validate_complex",
    "sparsity",
    "rank2",
    "betti2",
    "mod2",
    "xor_basis",
    "reduce_by",
    "kernel2",
]


@dataclass(frozen=True)
class BinMatrix:
    """Sparse matrix over F2, stored as sorted ``(row, col)`` positions of ones."""

    rows: int
    cols: int
    entries: tuple = ()

    def __post_init__(self):
        ents = tuple(sorted((int(r), int(c)) for r, c in self.entries))
        for k, (r, c) in enumerate(ents):
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise IndexError(f"position ({r}, {c}) outside {self.rows}x{self.cols}")
            if k and ents[k - 1] == (r, c):
                raise ValueError(f"duplicate position ({r}, {c})")
        object.__setattr__(self, "entries", ents)

    @classmethod
    def from_positions(cls, rows: int, cols: int, positions: Iterable) -> "BinMatrix":
        """Build from positions that may repeat; repeats cancel in pairs."""
        odd = set()
        for pos in positions:
            odd ^= {tuple(pos)}
        return cls(rows, cols, tuple(odd))

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]], cols: int | None = None) -> "BinMatrix":
        rows = len(dense)
        if cols is None:
            cols = len(dense[0]) if rows else 0
        return cls(rows, cols, tuple((r, c) for r, row in enumerate(dense) for c, v in enumerate(row) if v % 2))

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Iterable[int]]) -> "BinMatrix":
        return cls.from_positions(rows, len(columns), ((r, c) for c, col in enumerate(columns) for r in col))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BinMatrix":
        return cls(rows, cols, ())

    @classmethod
    def identity(cls, n: int) -> "BinMatrix":
        return cls(n, n, tuple((i, i) for i in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    @cached_property
    def row_sets(self) -> tuple:
        out = [[] for _ in range(self.rows)]
        for r, c in self.entries:
            out[r].append(c)
        return tuple(tuple(x) for x in out)

    @cached_property
    def col_sets(self) -> tuple:
        out = [[] for _ in range(self.cols)]
        for r, c in self.entries:
            out[c].append(r)
        return tuple(tuple(x) for x in out)

    @cached_property
    def row_bits(self) -> tuple:
        """Each row as an int bitmask over columns."""
        return tuple(sum(1 << c for c in row) for row in self.row_sets)

    @cached_property
    def col_bits(self) -> tuple:
        """Each column as an int bitmask over rows."""
        return tuple(sum(1 << r for r in col) for col in self.col_sets)

    def __getitem__(self, pos) -> int:
        r, c = pos
        return 1 if c in self.row_sets[r] else 0

    @property
    def T(self) -> "BinMatrix":
        return BinMatrix(self.cols, self.rows, tuple((c, r) for r, c in self.entries))

    def __matmul__(self, other: "BinMatrix") -> "BinMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for r, row in enumerate(self.row_sets):
            acc = 0
            for k in row:
                acc ^= other.row_bits[k]
            c = 0
            while acc:
                if acc & 1:
                    out.append((r, c))
                acc >>= 1
                c += 1
        return BinMatrix(self.rows, other.cols, tuple(out))

    def to_dense(self) -> list[list[int]]:
        dense = [[0] * self.cols for _ in range(self.rows)]
        for r, c in self.entries:
            dense[r][c] = 1
        return dense

    def max_weight(self) -> int:
        """Largest row or column weight."""
        weights = [len(x) for x in self.row_sets] + [len(x) for x in self.col_sets]
        return max(weights, default=0)


@dataclass(frozen=True)
class IntMatrix:
    """Sparse integer matrix, stored as sorted ``(row, col, value)`` triplets."""

    rows: int
    cols: int
    entries: tuple = ()

    def __post_init__(self):
        ents = tuple(sorted((int(r), int(c), int(v)) for r, c, v in self.entries))
        for k, (r, c, v) in enumerate(ents):
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise IndexError(f"position ({r}, {c}) outside {self.rows}x{self.cols}")
            if v == 0:
                raise ValueError(f"stored zero at ({r}, {c})")
            if k and ents[k - 1][:2] == (r, c):
                raise ValueError(f"duplicate position ({r}, {c})")
        object.__setattr__(self, "entries", ents)

    @classmethod
    def from_dict(cls, rows: int, cols: int, values: dict) -> "IntMatrix":
        return cls(rows, cols, tuple((r, c, v) for (r, c), v in values.items() if v))

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = len(dense)
        if cols is None:
            cols = len(dense[0]) if rows else 0
        return cls(rows, cols, tuple((r, c, v) for r, row in enumerate(dense) for c, v in enumerate(row) if v))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, ())

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple((i, i, 1) for i in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    @cached_property
    def as_dict(self) -> dict:
        return {(r, c): v for r, c, v in self.entries}

    @cached_property
    def row_dicts(self) -> tuple:
        out = [dict() for _ in range(self.rows)]
        for r, c, v in self.entries:
            out[r][c] = v
        return tuple(out)

    @cached_property
    def col_dicts(self) -> tuple:
        out = [dict() for _ in range(self.cols)]
        for r, c, v in self.entries:
            out[c][r] = v
        return tuple(out)

    def __getitem__(self, pos) -> int:
        return self.as_dict.get(tuple(pos), 0)

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple((c, r, v) for r, c, v in self.entries))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        acc = defaultdict(int)
        for r, row in enumerate(self.row_dicts):
            for k, a in row.items():
                for c, b in other.row_dicts[k].items():
                    acc[r, c] += a * b
        return IntMatrix.from_dict(self.rows, other.cols, acc)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple((r, c, -v) for r, c, v in self.entries))

    def to_dense(self) -> list[list[int]]:
        dense = [[0] * self.cols for _ in range(self.rows)]
        for r, c, v in self.entries:
            dense[r][c] = v
        return dense

    def mod2(self) -> BinMatrix:
        return BinMatrix(self.rows, self.cols, tuple((r, c) for r, c, v in self.entries if v % 2))

    def max_l1(self) -> int:
        """Largest l1 norm over all rows and columns."""
        rows = [0] * self.rows
        cols = [0] * self.cols
        for r, c, v in self.entries:
            rows[r] += abs(v)
            cols[c] += abs(v)
        return max(rows + cols, default=0)

    def max_abs(self) -> int:
        return max((abs(v) for _, _, v in self.entries), default=0)

    @classmethod
    def naive(cls, m: BinMatrix) -> "IntMatrix":
        """Naive lift: 0 -> 0 and 1 -> 1 entrywise."""
        return cls(m.rows, m.cols, tuple((r, c, 1) for r, c in m.entries))


Matrix = Union[BinMatrix, IntMatrix]


class _Complex:
    dims: tuple
    boundaries: tuple
    _matrix_type: type

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        bds = tuple(self.boundaries)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "boundaries", bds)
        if any(d < 0 for d in dims):
            raise DimensionMismatch(f"negative dimension in {dims}")
        if len(bds) != max(len(dims) - 1, 0):
            raise DimensionMismatch(f"{len(dims)} spaces need {max(len(dims) - 1, 0)} boundaries, got {len(bds)}")
        for j, b in enumerate(bds):
            if not isinstance(b, self._matrix_type):
                raise TypeError(f"boundary {j} is {type(b).__name__}, expected {self._matrix_type.__name__}")
            if b.shape != (dims[j], dims[j + 1]):
                raise DimensionMismatch(
                    f"boundary {j} has shape {b.shape}, expected {(dims[j], dims[j + 1])}"
                )

    @property
    def length(self) -> int:
        """Number of spaces (degrees)."""
        return len(self.dims)

    def boundary_out(self, j: int):
        """Boundary leaving degree ``j`` or ``None`` at degree 0."""
        return self.boundaries[j - 1] if j >= 1 else None

    def boundary_in(self, j: int):
        """Boundary arriving at degree ``j`` or ``None`` at the top degree."""
        return self.boundaries[j] if j < len(self.boundaries) else None


@dataclass(frozen=True)
class ChainComplex2(_Complex):
    """Chain complex over F2; see the module docstring for the index convention."""

    dims: tuple
    boundaries: tuple
    _matrix_type = BinMatrix

    @classmethod
    def from_boundaries(cls, boundaries: Sequence[BinMatrix]) -> "ChainComplex2":
        if not boundaries:
            raise DimensionMismatch("need at least one boundary to infer dimensions")
        dims = [boundaries[0].rows] + [b.cols for b in boundaries]
        return cls(tuple(dims), tuple(boundaries))

    @classmethod
    def zero(cls, dims: Sequence[int]) -> "ChainComplex2":
        dims = tuple(dims)
        return cls(dims, tuple(BinMatrix.zeros(dims[j], dims[j + 1]) for j in range(len(dims) - 1)))


@dataclass(frozen=True)
class ChainComplexZ(_Complex):
    """Chain complex over the integers; same index convention as ``ChainComplex2``."""

    dims: tuple
    boundaries: tuple
    _matrix_type = IntMatrix

    @classmethod
    def from_boundaries(cls, boundaries: Sequence[IntMatrix]) -> "ChainComplexZ":
        if not boundaries:
            raise DimensionMismatch("need at least one boundary to infer dimensions")
        dims = [boundaries[0].rows] + [b.cols for b in boundaries]
        return cls(tuple(dims), tuple(boundaries))

    @classmethod
    def zero(cls, dims: Sequence[int]) -> "ChainComplexZ":
        dims = tuple(dims)
        return cls(dims, tuple(IntMatrix.zeros(dims[j], dims[j + 1]) for j in range(len(dims) - 1)))


Complex = Union[ChainComplex2, ChainComplexZ]


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violation: tuple | None = None  # (j, row, col): entry of boundaries[j] @ boundaries[j+1]
    value: int = 0

    def __bool__(self) -> bool:
        return self.ok


def validate_complex(c: Complex) -> ValidationReport:
    """Check that every consecutive product of boundaries vanishes in the coefficient ring."""
    for j in range(len(c.boundaries) - 1):
        a, b = c.boundaries[j], c.boundaries[j + 1]
        if a.cols != b.rows:
            raise DimensionMismatch(f"boundaries {j} and {j + 1} do not compose")
        prod = a @ b
        if prod.entries:
            first = prod.entries[0]
            value = first[2] if len(first) == 3 else 1
            return ValidationReport(False, (j, first[0], first[1]), value)
    return ValidationReport(True)


def sparsity(c: Complex) -> int:
    """Maximum l1 norm of any row or column of any boundary."""
    best = 0
    for b in c.boundaries:
        best = max(best, b.max_l1() if isinstance(b, IntMatrix) else b.max_weight())
    return best


def xor_basis(vectors: Iterable[int]) -> dict:
    """Reduce bitmask vectors to an echelon basis keyed by leading bit."""
    basis: dict = {}
    for v in vectors:
        v = reduce_by(v, basis)
        if v:
            basis[v.bit_length() - 1] = v
    return basis


def reduce_by(v: int, basis: dict) -> int:
    """Reduce ``v`` against an echelon basis produced by :func:`xor_basis`.

    Leading bits without a pivot are kept, so the result is zero exactly when
    ``v`` lies in the span.
    """
    kept = 0
    while v:
        h = v.bit_length() - 1
        piv = basis.get(h)
        if piv is None:
            kept |= 1 << h
            v ^= 1 << h
        else:
            v ^= piv
    return kept


def rank2(m: BinMatrix) -> int:
    """Rank over F2 by elimination on row bitmasks."""
    return len(xor_basis(m.row_bits))


def kernel2(m: BinMatrix) -> list[int]:
    """Basis of the right kernel of ``m`` as column-index bitmasks."""
    # Gauss-Jordan on columns: track which combination of unit vectors yields each reduced column.
    pivots: dict = {}  # leading row bit -> (reduced column, combination)
    kernel = []
    for j, col in enumerate(m.col_bits):
        comb = 1 << j
        while col:
            h = col.bit_length() - 1
            if h not in pivots:
                pivots[h] = (col, comb)
                break
            pcol, pcomb = pivots[h]
            col ^= pcol
            comb ^= pcomb
        if not col:
            kernel.append(comb)
    return kernel


def betti2(c: ChainComplex2, j: int) -> int:
    """F2 Betti number in degree ``j``; absent boundaries count as zero maps."""
    if not 0 <= j < len(c.dims):
        raise IndexError(f"degree {j} outside 0..{len(c.dims) - 1}")
    out_b, in_b = c.boundary_out(j), c.boundary_in(j)
    r_out = rank2(out_b) if out_b is not None else 0
    r_in = rank2(in_b) if in_b is not None else 0
    return c.dims[j] - r_out - r_in


def mod2(c: ChainComplexZ) -> ChainComplex2:
    return ChainComplex2(c.dims, tuple(b.mod2() for b in c.boundaries))
