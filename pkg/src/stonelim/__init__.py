"""Exact Stone pairings of finite structures, valued in the doubled unit interval.

Submodules: ``gamma`` (flavored values), ``lattice`` (finite distributive
lattices), ``measures``, ``fo`` (first-order models and pairings), ``limits``
(sequences and convergence) and ``plogic`` (probabilistic atoms).
"""

from .errors import (ArityError, DomainError, FilterError, FormulaError, FormulaSyntaxError,
                     LatticeError, MeasureError, StoneLimError, StructureError,
                     UnknownSymbolError)
from .gamma import ONE, ZERO, GammaValue, circ, minus, mip, miss, parse_gamma, plus

__version__ = "0.1.0"

__all__ = [
    "ArityError", "DomainError", "FilterError", "FormulaError", "FormulaSyntaxError",
    "LatticeError", "MeasureError", "StoneLimError", "StructureError", "UnknownSymbolError",
    "ONE", "ZERO", "GammaValue", "circ", "minus", "mip", "miss", "parse_gamma", "plus",
]
