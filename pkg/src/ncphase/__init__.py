"""Noncommutative phase-space algebra: star products, Weyl quantization,
deformed oscillators, Bogoliubov transforms and matrix gauge models."""

from .algebra import (
    Bivector,
    DimensionError,
    PhasePoly,
    SingularBivectorError,
    moyal_bracket,
    poisson_bracket,
    star,
)
from .fock import FockBasis, OperatorMatrix, interior_block, mode_operators, weyl_quantize
from .grammar import parse_symbol, render

__all__ = [
    "Bivector",
    "DimensionError",
    "FockBasis",
    "OperatorMatrix",
    "PhasePoly",
    "SingularBivectorError",
    "interior_block",
    "mode_operators",
    "moyal_bracket",
    "parse_symbol",
    "poisson_bracket",
    "render",
    "star",
    "weyl_quantize",
]
