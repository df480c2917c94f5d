"""Lifting binary chain complexes to integer ones, and the tools around it."""

from __future__ import annotations

from .core import (
    BinMatrix,
    ChainComplex2,
    ChainComplexZ,
    IntMatrix,
    betti2,
    mod2,
    rank2,
    sparsity,
    validate_complex,
)

__version__ = "0.1.0"

__all__ = [
    "BinMatrix",
    "IntMatrix",
    "ChainComplex2",
    "ChainComplexZ",
    "validate_complex",
    "sparsity",
    "rank2",
    "betti2",
    "mod2",
]
