from __future__ import annotations

from .jet import Jet2, eval_jet2
from .nodes import BinOp, Expression, Neg, Num, Var, num, to_source
from .parser import parse


class ScalarField2:
    """A twice-differentiable scalar function of ``(u, v)`` backed by an expression tree.

    Arithmetic between fields (and with plain numbers) builds a new tree, so
    combined fields keep a printable source form.
    """

    __slots__ = ("expr",)

    def __init__(self, expr: Expression | str):
        if isinstance(expr, str):
            expr = parse(expr)
        self.expr = expr

    @classmethod
    def parse(cls, source: str) -> ScalarField2:
        return cls(parse(source))

    @classmethod
    def constant(cls, c: float) -> ScalarField2:
        return cls(num(c))

    @property
    def source(self) -> str:
        return to_source(self.expr)

    def jet(self, u, v) -> Jet2:
        return eval_jet2(self.expr, u, v)

    def __call__(self, u, v):
        return self.jet(u, v).value

    def is_zero(self) -> bool:
        return isinstance(self.expr, Num) and self.expr.value == 0

    def __repr__(self):
        return f"ScalarField2({self.source!r})"

    def __eq__(self, other):
        return isinstance(other, ScalarField2) and self.expr == other.expr

    def __hash__(self):
        return hash(self.expr)

    @staticmethod
    def _coerce(x) -> Expression:
        if isinstance(x, ScalarField2):
            return x.expr
        return num(x)

    def __add__(self, other):
        return ScalarField2(BinOp("+", self.expr, self._coerce(other)))

    def __radd__(self, other):
        return ScalarField2(BinOp("+", self._coerce(other), self.expr))

    def __sub__(self, other):
        return ScalarField2(BinOp("-", self.expr, self._coerce(other)))

    def __rsub__(self, other):
        return ScalarField2(BinOp("-", self._coerce(other), self.expr))

    def __mul__(self, other):
        return ScalarField2(BinOp("*", self.expr, self._coerce(other)))

    def __rmul__(self, other):
        return ScalarField2(BinOp("*", self._coerce(other), self.expr))

    def __truediv__(self, other):
        return ScalarField2(BinOp("/", self.expr, self._coerce(other)))

    def __neg__(self):
        return ScalarField2(Neg(self.expr))


U = ScalarField2(Var("u"))
V = ScalarField2(Var("v"))
ZERO = ScalarField2(Num(0.0))


def linear_combination(terms, constant: float = 0.0) -> ScalarField2:
    """``constant + sum(c * f)`` skipping zero coefficients, so rigid-motion fields print compactly."""
    out = None
    if constant != 0:
        out = ScalarField2.constant(constant)
    for c, f in terms:
        if c == 0 or f.is_zero():
            continue
        if c == 1:
            term, negative = f.expr, False
        elif c == -1:
            term, negative = f.expr, True
        else:
            term, negative = BinOp("*", Num(abs(float(c))), f.expr), c < 0
        if out is None:
            out = ScalarField2(Neg(term) if negative else term)
        else:
            out = ScalarField2(BinOp("-" if negative else "+", out.expr, term))
    return out if out is not None else ZERO
