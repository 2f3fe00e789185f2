"""Expression trees over the variables ``u`` and ``v``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

VARIABLES = ("u", "v")
CONSTANTS = {"pi": math.pi, "e": math.e}
FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")
BINARY_OPS = ("+", "-", "*", "/", "^")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: Expression


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Call:
    func: str
    arg: Expression


Expression = Union[Num, Var, Const, Neg, BinOp, Call]


def num(x: float) -> Expression:
    """Literal node; negative values become ``Neg(Num(|x|))`` so they print and re-parse identically."""
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"non-finite literal {x!r}")
    if x < 0 or (x == 0 and math.copysign(1.0, x) < 0):
        return Neg(Num(-x))
    return Num(x)


def Add(a, b):
    return BinOp("+", a, b)


def Sub(a, b):
    return BinOp("-", a, b)


def Mul(a, b):
    return BinOp("*", a, b)


def Div(a, b):
    return BinOp("/", a, b)


def Pow(a, b):
    return BinOp("^", a, b)


def has_variables(e: Expression) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, (Num, Const)):
        return False
    if isinstance(e, Neg):
        return has_variables(e.operand)
    if isinstance(e, Call):
        return has_variables(e.arg)
    return has_variables(e.left) or has_variables(e.right)


# binding strength used by the printer; mirrors the parser's grammar levels
_ADD, _MUL, _NEG, _POW, _ATOM = 1, 2, 3, 4, 5
_BINOP_PREC = {"+": _ADD, "-": _ADD, "*": _MUL, "/": _MUL, "^": _POW}


def _prec(e: Expression) -> int:
    if isinstance(e, BinOp):
        return _BINOP_PREC[e.op]
    if isinstance(e, Neg):
        return _NEG
    return _ATOM


def _format_number(x: float) -> str:
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def to_source(e: Expression) -> str:
    """Print with the minimum parentheses needed to re-parse to the same tree."""
    if isinstance(e, Num):
        if e.value < 0 or math.isnan(e.value) or math.isinf(e.value):
            raise ValueError(f"literal {e.value!r} has no source form; build it with num()")
        return _format_number(e.value)
    if isinstance(e, (Var, Const)):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_source(e.arg)})"
    if isinstance(e, Neg):
        inner = to_source(e.operand)
        if _prec(e.operand) < _NEG:
            inner = f"({inner})"
        return f"-{inner}"
    p = _BINOP_PREC[e.op]
    left, right = to_source(e.left), to_source(e.right)
    if e.op == "^":
        if _prec(e.left) <= _POW:
            left = f"({left})"
        if _prec(e.right) < _NEG:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left}{e.op}{right}"
