"""Exception hierarchy.

Every error raised on purpose by the package derives from ``ChainliftError`` so
the command line can map domain failures to exit status 1.
"""

from __future__ import annotations


class ChainliftError(Exception):
    """Base class for domain errors."""


class DimensionMismatch(ChainliftError, ValueError):
    """Boundary shapes do not fit the declared space dimensions."""


class CommutationError(ChainliftError, ValueError):
    """An X- and a Z-stabilizer overlap on an odd number of qubits."""


class NotAdmissible(ChainliftError, ValueError):
    """An integer complex whose consecutive boundaries do not compose to zero."""


class NoSparseLift(ChainliftError):
    """A local matrix has 2-torsion, so no odd kernel vector exists for it."""

    def __init__(self, two_cell: int, message: str | None = None):
        self.two_cell = two_cell
        super().__init__(message or f"local matrix of 2-cell {two_cell} has 2-torsion")


class LiftBoundExceeded(ChainliftError):
    """No odd kernel vector was found inside the current sup-norm bound."""

    def __init__(self, bound: int, two_cell: int | None = None):
        self.bound = bound
        self.two_cell = two_cell
        where = "" if two_cell is None else f" for 2-cell {two_cell}"
        super().__init__(f"no lift vector with |v|_inf <= {bound}{where}")


class NoLogicalOperator(ChainliftError):
    """The middle homology is trivial, so there is no distance to report."""


class DistanceBudgetExceeded(ChainliftError):
    """The weight enumeration reached its budget without finding a logical."""

    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"no nontrivial representative of weight <= {budget}")


class SingularMatrix(ChainliftError):
    """LU elimination ran out of pivots before the matrix was exhausted."""


class FillBudgetExceeded(ChainliftError):
    def __init__(self, fill: int, budget: int):
        self.fill = fill
        self.budget = budget
        super().__init__(f"fill-in {fill} exceeds budget {budget}")


class RankDeficient(ChainliftError, ValueError):
    """Input matrix lacks full row rank."""


class DegreeCapExceeded(ChainliftError, ValueError):
    def __init__(self, vertex: int, degree: int, cap: int):
        self.vertex = vertex
        self.degree = degree
        self.cap = cap
        super().__init__(f"vertex {vertex} has degree {degree} > cap {cap}")


class RetriesExhausted(ChainliftError):
    def __init__(self, retries: int, best: int | None = None):
        self.retries = retries
        self.best = best
        super().__init__(f"no attempt met the multiplicity bound in {retries} tries")


class PairingError(ChainliftError):
    """Signed half-edges at an X-stabilizer do not cancel."""

    def __init__(self, z_stab: int, x_stab: int, total: int):
        self.z_stab = z_stab
        self.x_stab = x_stab
        self.total = total
        super().__init__(
            f"Z-stabilizer {z_stab}: signed half-edge sum at X-stabilizer {x_stab} is {total}"
        )


class StageError(ChainliftError, ValueError):
    """A skeleton operation was applied at the wrong construction stage."""


class FormatError(ChainliftError, ValueError):
    """Malformed text input; carries the offending line number."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        prefix = "" if lineno is None else f"line {lineno}: "
        super().__init__(prefix + message)
