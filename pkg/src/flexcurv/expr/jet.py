"""Second-order forward-mode differentiation in two variables.

A :class:`Jet2` carries a value together with its gradient and (symmetric)
Hessian with respect to ``(u, v)``.  Components may be floats or numpy arrays
of a common shape, so a whole quadrature grid is evaluated in one pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericalDomainError
from .nodes import CONSTANTS, BinOp, Call, Const, Expression, Neg, Num, Var, has_variables, to_source


@dataclass(frozen=True)
class Jet2:
    value: object
    du: object = 0.0
    dv: object = 0.0
    duu: object = 0.0
    duv: object = 0.0
    dvv: object = 0.0

    @property
    def gradient(self):
        return (self.du, self.dv)

    @property
    def hessian(self):
        return (self.duu, self.duv, self.dvv)

    @classmethod
    def constant(cls, c) -> Jet2:
        return cls(c)

    def broadcast(self, shape) -> Jet2:
        return Jet2(*(np.broadcast_to(np.asarray(c, dtype=float), shape).copy() for c in self._parts()))

    def _parts(self):
        return (self.value, self.du, self.dv, self.duu, self.duv, self.dvv)

    def __add__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value + other, self.du, self.dv, self.duu, self.duv, self.dvv)
        return Jet2(*(a + b for a, b in zip(self._parts(), other._parts())))

    __radd__ = __add__

    def __neg__(self):
        return Jet2(*(-a for a in self._parts()))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(*(a * other for a in self._parts()))
        a, b = self, other
        return Jet2(
            a.value * b.value,
            a.du * b.value + a.value * b.du,
            a.dv * b.value + a.value * b.dv,
            a.duu * b.value + 2 * a.du * b.du + a.value * b.duu,
            a.duv * b.value + a.du * b.dv + a.dv * b.du + a.value * b.duv,
            a.dvv * b.value + 2 * a.dv * b.dv + a.value * b.dvv,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            return self * (1.0 / other)
        return self * other.reciprocal()

    def reciprocal(self) -> Jet2:
        r = 1.0 / self.value
        return self.chain(r, -r * r, 2 * r * r * r)

    def chain(self, g0, g1, g2) -> Jet2:
        """Compose with a scalar function whose value and first two derivatives at ``self.value`` are g0, g1, g2."""
        a = self
        return Jet2(
            g0,
            g1 * a.du,
            g1 * a.dv,
            g2 * a.du * a.du + g1 * a.duu,
            g2 * a.du * a.dv + g1 * a.duv,
            g2 * a.dv * a.dv + g1 * a.dvv,
        )


def _first_bad(mask, u, v):
    """Coordinates of the first point where ``mask`` holds."""
    mask = np.asarray(mask)
    uu, vv = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    if mask.ndim == 0:
        return (float(uu.flat[0]), float(vv.flat[0]))
    mask = np.broadcast_to(mask, uu.shape) if mask.shape != uu.shape else mask
    k = int(np.flatnonzero(mask)[0])
    return (float(uu.flat[k]), float(vv.flat[k]))


class EvalDomainError(NumericalDomainError):
    def __init__(self, reason: str, subexpr: str, point):
        self.reason = reason
        self.subexpr = subexpr
        super().__init__(f"{reason} in '{subexpr}' at (u, v) = ({point[0]!r}, {point[1]!r})", point)


class _Evaluator:
    def __init__(self, u, v):
        self.u = u
        self.v = v

    def fail(self, reason, node, mask):
        raise EvalDomainError(reason, to_source(node), _first_bad(mask, self.u, self.v))

    def __call__(self, e: Expression) -> Jet2:
        if isinstance(e, Num):
            return Jet2(e.value)
        if isinstance(e, Const):
            return Jet2(CONSTANTS[e.name])
        if isinstance(e, Var):
            if e.name == "u":
                return Jet2(self.u, 1.0, 0.0)
            return Jet2(self.v, 0.0, 1.0)
        if isinstance(e, Neg):
            return -self(e.operand)
        if isinstance(e, Call):
            return self.call(e)
        return self.binop(e)

    def binop(self, e: BinOp) -> Jet2:
        a = self(e.left)
        if e.op == "^":
            return self.power(e, a)
        b = self(e.right)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        zero = np.asarray(b.value) == 0
        if np.any(zero):
            self.fail("division by zero", e, zero)
        return a / b

    def power(self, e: BinOp, a: Jet2) -> Jet2:
        b = self(e.right)
        if not has_variables(e.right) and float(b.value).is_integer():
            n = float(b.value)
            if n == 0:
                return Jet2(1.0)
            if n < 0:
                zero = np.asarray(a.value) == 0
                if np.any(zero):
                    self.fail("division by zero (negative integer power of zero)", e, zero)
            # power rule; exponents of a stay non-negative for n >= 2 so a <= 0 is fine
            x = a.value
            g2 = 0.0 if n == 1 else n * (n - 1) * np.power(x, n - 2)
            return a.chain(np.power(x, n), n * np.power(x, n - 1), g2)
        bad = np.asarray(a.value) <= 0
        if np.any(bad):
            self.fail("non-integer power of a non-positive base", e, bad)
        if not has_variables(e.right):
            p = float(b.value)
            x = a.value
            return a.chain(np.power(x, p), p * np.power(x, p - 1), p * (p - 1) * np.power(x, p - 2))
        # a^b = exp(b log a)
        log_a = a.chain(np.log(a.value), 1.0 / a.value, -1.0 / (a.value * a.value))
        z = b * log_a
        ez = np.exp(z.value)
        return z.chain(ez, ez, ez)

    def call(self, e: Call) -> Jet2:
        a = self(e.arg)
        x = a.value
        f = e.func
        if f == "sin":
            s, c = np.sin(x), np.cos(x)
            return a.chain(s, c, -s)
        if f == "cos":
            s, c = np.sin(x), np.cos(x)
            return a.chain(c, -s, -c)
        if f == "exp":
            ex = np.exp(x)
            return a.chain(ex, ex, ex)
        if f == "log":
            bad = np.asarray(x) <= 0
            if np.any(bad):
                self.fail("log of a non-positive value", e, bad)
            return a.chain(np.log(x), 1.0 / x, -1.0 / (x * x))
        if f == "sqrt":
            neg = np.asarray(x) < 0
            if np.any(neg):
                self.fail("sqrt of a negative value", e, neg)
            zero = np.asarray(x) == 0
            if np.any(zero):
                self.fail("sqrt is not differentiable at 0", e, zero)
            r = np.sqrt(x)
            return a.chain(r, 0.5 / r, -0.25 / (r * x))
        raise ValueError(f"unknown function {f!r}")


def eval_jet2(e: Expression, u, v) -> Jet2:
    """Value, gradient and Hessian of ``e`` at ``(u, v)``.

    ``u`` and ``v`` may be scalars or broadcast-compatible arrays; every
    component of the result has their broadcast shape (floats for scalars).
    """
    scalar = np.ndim(u) == 0 and np.ndim(v) == 0
    if scalar:
        uu, vv = float(u), float(v)
    else:
        uu, vv = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    with np.errstate(all="ignore"):
        jet = _Evaluator(uu, vv)(e)
    if scalar:
        return Jet2(*(float(np.asarray(c)) for c in jet._parts()))
    return jet.broadcast(uu.shape)


def eval_value(e: Expression, u, v):
    return eval_jet2(e, u, v).value

