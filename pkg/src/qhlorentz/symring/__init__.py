"""Exact rational-function arithmetic over Q in coordinates, parameters and formal exponentials."""

from .core import (
    DEFAULT_VARSET,
    ExpGenerator,
    Expr,
    FormalFunction,
    VarSet,
    arith,
    at_point,
    differentiate,
    substitute,
)
from .factor import LocusReport, common_zero_locus, factor, gcd, squarefree_part
from .linear import LinearSystem, coefficient_system
from .parse import parse

__all__ = [
    "DEFAULT_VARSET", "ExpGenerator", "Expr", "FormalFunction", "VarSet", "arith", "at_point",
    "differentiate", "substitute", "parse", "LinearSystem", "coefficient_system",
    "LocusReport", "common_zero_locus", "factor", "gcd", "squarefree_part",
]
