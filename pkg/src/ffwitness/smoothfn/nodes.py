"""AST node types for smooth expressions.

Nodes are frozen dataclasses, so structural equality and hashing come for
free.  Python operators build simplified trees (constant folding, neutral
elements) through :mod:`ffwitness.smoothfn.calculus`; the parser builds raw
nodes directly so that formatting round-trips.
"""
from __future__ import annotations

from dataclasses import dataclass
from numbers import Real

FUNCTIONS = ("sin", "cos", "exp", "bump")


class SmoothExpr:
    __slots__ = ()

    def __add__(self, other):
        from .calculus import add
        return add(self, as_expr(other))

    def __radd__(self, other):
        from .calculus import add
        return add(as_expr(other), self)

    def __sub__(self, other):
        from .calculus import sub
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        from .calculus import sub
        return sub(as_expr(other), self)

    def __mul__(self, other):
        from .calculus import mul
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        from .calculus import mul
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        from .calculus import div
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        from .calculus import div
        return div(as_expr(other), self)

    def __neg__(self):
        from .calculus import neg
        return neg(self)

    def __pow__(self, n):
        from .calculus import power
        return power(self, n)

    def __str__(self):
        from ..exprparse import format_expr
        return format_expr(self)


def as_expr(value) -> SmoothExpr:
    if isinstance(value, SmoothExpr):
        return value
    if isinstance(value, Real):
        return Const(float(value))
    raise TypeError(f"cannot convert {value!r} to an expression")


@dataclass(frozen=True)
class Const(SmoothExpr):
    value: float
    symbol: str | None = None


@dataclass(frozen=True)
class Var(SmoothExpr):
    name: str


@dataclass(frozen=True)
class Add(SmoothExpr):
    left: SmoothExpr
    right: SmoothExpr


@dataclass(frozen=True)
class Sub(SmoothExpr):
    left: SmoothExpr
    right: SmoothExpr


@dataclass(frozen=True)
class Mul(SmoothExpr):
    left: SmoothExpr
    right: SmoothExpr


@dataclass(frozen=True)
class Div(SmoothExpr):
    left: SmoothExpr
    right: SmoothExpr


@dataclass(frozen=True)
class Neg(SmoothExpr):
    operand: SmoothExpr


@dataclass(frozen=True)
class Pow(SmoothExpr):
    base: SmoothExpr
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or self.exponent < 0:
            raise ValueError(f"Pow exponent must be a nonnegative int, got {self.exponent!r}")


@dataclass(frozen=True)
class Apply(SmoothExpr):
    func: str
    arg: SmoothExpr

    def __post_init__(self):
        if self.func not in FUNCTIONS:
            raise ValueError(f"unknown function {self.func!r}")


@dataclass(frozen=True)
class BumpDeriv(SmoothExpr):
    """``order``-th derivative of the bump profile, applied to ``arg``."""

    order: int
    arg: SmoothExpr


BINARY = (Add, Sub, Mul, Div)


def is_const(e, value=None) -> bool:
    return isinstance(e, Const) and (value is None or e.value == value)
