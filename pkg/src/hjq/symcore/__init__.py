"""Exact symbolic kernel: trees, normal forms, calculus and linear algebra."""

from hjq.symcore.canonical import (
    CyclicBinding,
    ZeroVerdict,
    canonical_form,
    differentiate,
    equals_zero,
    evaluate,
    same,
    substitute,
    zero_test,
)
from hjq.symcore.expr import (
    Add,
    Div,
    Expr,
    Func,
    Mul,
    Num,
    Pow,
    Symbol,
    as_expr,
    cos,
    exp,
    log,
    sin,
    sqrt,
    symbols,
)
from hjq.symcore.linalg import (
    ExprMatrix,
    InconsistentSystem,
    LinearSolveError,
    NonlinearInUnknown,
    UnderdeterminedSystem,
    matrix_rank,
    pivot_denominators,
    solve_linear_system,
)
from hjq.symcore.parser import ParseError, UnknownIdentifier, parse_expr
from hjq.symcore.printing import to_string
from hjq.symcore.table import SymbolTable, momentum_name, velocity_name

__all__ = [
    "Add", "CyclicBinding", "Div", "Expr", "ExprMatrix", "Func", "InconsistentSystem",
    "LinearSolveError", "Mul", "NonlinearInUnknown", "Num", "ParseError", "Pow", "Symbol",
    "SymbolTable", "UnderdeterminedSystem", "UnknownIdentifier", "ZeroVerdict", "as_expr",
    "canonical_form", "cos", "differentiate", "equals_zero", "evaluate", "exp", "log",
    "matrix_rank", "momentum_name", "parse_expr", "pivot_denominators", "same", "sin",
    "solve_linear_system", "sqrt", "substitute", "symbols", "to_string", "velocity_name",
    "zero_test",
]
