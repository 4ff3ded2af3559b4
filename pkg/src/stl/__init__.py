"""
STL Module
==========

Signal temporal logic formulas, parser and robustness semantics.
"""

from .formula import (
    Signal, Expr, Const, Coord, Neg, BinOp, Func,
    Formula, BoolConst, Predicate, Not, And, Or, Eventually, Always, Until,
    robustness, robustness_batch
)
from .parser import parse, load_formula

__all__ = [
    'Signal', 'Expr', 'Const', 'Coord', 'Neg', 'BinOp', 'Func',
    'Formula', 'BoolConst', 'Predicate', 'Not', 'And', 'Or', 'Eventually', 'Always', 'Until',
    'robustness', 'robustness_batch', 'parse', 'load_formula'
]
