"""Expression language with exact first and second derivatives."""

from .field import U, V, ZERO, ScalarField2, linear_combination
from .jet import EvalDomainError, Jet2, eval_jet2, eval_value
from .nodes import (
    Add,
    BinOp,
    Call,
    Const,
    Div,
    Expression,
    Mul,
    Neg,
    Num,
    Pow,
    Sub,
    Var,
    num,
    to_source,
)
from .parser import ExprSyntaxError, UnknownIdentifierError, parse

__all__ = [
    "Add",
    "BinOp",
    "Call",
    "Const",
    "Div",
    "EvalDomainError",
    "ExprSyntaxError",
    "Expression",
    "Jet2",
    "Mul",
    "Neg",
    "Num",
    "Pow",
    "ScalarField2",
    "Sub",
    "U",
    "UnknownIdentifierError",
    "V",
    "Var",
    "ZERO",
    "eval_jet2",
    "eval_value",
    "linear_combination",
    "num",
    "parse",
    "to_source",
]
