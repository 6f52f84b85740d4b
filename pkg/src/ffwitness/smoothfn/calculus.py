"""Symbolic manipulation: simplifying constructors, differentiation,
substitution and free-variable analysis.

``diff``, ``substitute`` and ``free_vars`` are single-dispatch functions so
that other modules (the cylinder operators) can register their own nodes.
"""
from __future__ import annotations

import math
from functools import singledispatch

from .nodes import (
    Add, Apply, BumpDeriv, Const, Div, Mul, Neg, Pow, SmoothExpr, Sub, Var, is_const,
)

ZERO = Const(0.0)
ONE = Const(1.0)


def const(value: float) -> Const:
    return Const(float(value))


# -- simplifying constructors ----------------------------------------------

def add(a: SmoothExpr, b: SmoothExpr) -> SmoothExpr:
    if is_const(a) and is_const(b):
        return const(a.value + b.value)
    if is_const(a, 0.0):
        return b
    if is_const(b, 0.0):
        return a
    # (p - q) + q -> p
    if isinstance(a, Sub) and a.right == b:
        return a.left
    if isinstance(b, Neg):
        return sub(a, b.operand)
    if isinstance(a, Neg):
        return sub(b, a.operand)
    return Add(a, b)


def sub(a: SmoothExpr, b: SmoothExpr) -> SmoothExpr:
    if is_const(a) and is_const(b):
        return const(a.value - b.value)
    if is_const(b, 0.0):
        return a
    if a == b:
        return ZERO
    if is_const(a, 0.0):
        return neg(b)
    return Sub(a, b)


def mul(a: SmoothExpr, b: SmoothExpr) -> SmoothExpr:
    if is_const(a) and is_const(b):
        return const(a.value * b.value)
    if is_const(a, 0.0) or is_const(b, 0.0):
        return ZERO
    if is_const(a, 1.0):
        return b
    if is_const(b, 1.0):
        return a
    if is_const(a, -1.0):
        return neg(b)
    if is_const(b, -1.0):
        return neg(a)
    # keep constants on the left and merged
    if is_const(b):
        a, b = b, a
    if is_const(a) and isinstance(b, Mul) and is_const(b.left):
        return mul(const(a.value * b.left.value), b.right)
    return Mul(a, b)


def div(a: SmoothExpr, b: SmoothExpr) -> SmoothExpr:
    if is_const(a, 0.0):
        return ZERO
    if is_const(b, 1.0):
        return a
    if is_const(a) and is_const(b) and b.value != 0.0:
        return const(a.value / b.value)
    return Div(a, b)


def neg(a: SmoothExpr) -> SmoothExpr:
    if is_const(a):
        return const(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def power(a: SmoothExpr, n: int) -> SmoothExpr:
    if isinstance(n, float) and n.is_integer():
        n = int(n)
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"exponent must be a nonnegative integer, got {n!r}")
    if n == 0:
        return ONE
    if n == 1:
        return a
    if is_const(a):
        return const(a.value ** n)
    return Pow(a, n)


def apply(func: str, arg: SmoothExpr) -> SmoothExpr:
    if is_const(arg) and func != "bump":
        return const(getattr(math, func)(arg.value))
    return Apply(func, arg)


def bump_deriv(order: int, arg: SmoothExpr) -> SmoothExpr:
    if order == 0:
        return Apply("bump", arg)
    return BumpDeriv(order, arg)


def simplify(e: SmoothExpr) -> SmoothExpr:
    """Rebuild a tree bottom-up through the simplifying constructors."""
    return _rebuild(e)


@singledispatch
def _rebuild(e):
    return e


@_rebuild.register
def _(e: Add):
    return add(_rebuild(e.left), _rebuild(e.right))


@_rebuild.register
def _(e: Sub):
    return sub(_rebuild(e.left), _rebuild(e.right))


@_rebuild.register
def _(e: Mul):
    return mul(_rebuild(e.left), _rebuild(e.right))


@_rebuild.register
def _(e: Div):
    return div(_rebuild(e.left), _rebuild(e.right))


@_rebuild.register
def _(e: Neg):
    return neg(_rebuild(e.operand))


@_rebuild.register
def _(e: Pow):
    return power(_rebuild(e.base), e.exponent)


@_rebuild.register
def _(e: Apply):
    return apply(e.func, _rebuild(e.arg))


@_rebuild.register
def _(e: BumpDeriv):
    return bump_deriv(e.order, _rebuild(e.arg))


# -- differentiation ---------------------------------------------------------

@singledispatch
def diff(e: SmoothExpr, var: str) -> SmoothExpr:
    raise TypeError(f"cannot differentiate {type(e).__name__}")


def diff_symbolic(e: SmoothExpr, var: str, times: int = 1) -> SmoothExpr:
    """``times``-fold symbolic derivative of ``e`` in ``var``."""
    for _ in range(times):
        e = diff(e, var)
    return e


@diff.register
def _(e: Const, var):
    return ZERO


@diff.register
def _(e: Var, var):
    return ONE if e.name == var else ZERO


@diff.register
def _(e: Add, var):
    return add(diff(e.left, var), diff(e.right, var))


@diff.register
def _(e: Sub, var):
    return sub(diff(e.left, var), diff(e.right, var))


@diff.register
def _(e: Mul, var):
    return add(mul(diff(e.left, var), e.right), mul(e.left, diff(e.right, var)))


@diff.register
def _(e: Div, var):
    da, db = diff(e.left, var), diff(e.right, var)
    if is_const(db, 0.0):
        return div(da, e.right)
    return div(sub(mul(da, e.right), mul(e.left, db)), power(e.right, 2))


@diff.register
def _(e: Neg, var):
    return neg(diff(e.operand, var))


@diff.register
def _(e: Pow, var):
    if e.exponent == 0:
        return ZERO
    return mul(mul(const(e.exponent), power(e.base, e.exponent - 1)), diff(e.base, var))


@diff.register
def _(e: Apply, var):
    darg = diff(e.arg, var)
    if is_const(darg, 0.0):
        return ZERO
    if e.func == "sin":
        outer = apply("cos", e.arg)
    elif e.func == "cos":
        outer = neg(apply("sin", e.arg))
    elif e.func == "exp":
        outer = e
    else:
        outer = bump_deriv(1, e.arg)
    return mul(outer, darg)


@diff.register
def _(e: BumpDeriv, var):
    darg = diff(e.arg, var)
    if is_const(darg, 0.0):
        return ZERO
    return mul(bump_deriv(e.order + 1, e.arg), darg)


# -- substitution and free variables ----------------------------------------

@singledispatch
def substitute(e: SmoothExpr, mapping: dict) -> SmoothExpr:
    raise TypeError(f"cannot substitute into {type(e).__name__}")


@substitute.register
def _(e: Const, mapping):
    return e


@substitute.register
def _(e: Var, mapping):
    return mapping.get(e.name, e)


@substitute.register(Add)
@substitute.register(Sub)
@substitute.register(Mul)
@substitute.register(Div)
def _(e, mapping):
    build = {Add: add, Sub: sub, Mul: mul, Div: div}[type(e)]
    return build(substitute(e.left, mapping), substitute(e.right, mapping))


@substitute.register
def _(e: Neg, mapping):
    return neg(substitute(e.operand, mapping))


@substitute.register
def _(e: Pow, mapping):
    return power(substitute(e.base, mapping), e.exponent)


@substitute.register
def _(e: Apply, mapping):
    return apply(e.func, substitute(e.arg, mapping))


@substitute.register
def _(e: BumpDeriv, mapping):
    return bump_deriv(e.order, substitute(e.arg, mapping))


@singledispatch
def free_vars(e: SmoothExpr) -> frozenset:
    raise TypeError(f"unknown node {type(e).__name__}")


@free_vars.register
def _(e: Const):
    return frozenset()


@free_vars.register
def _(e: Var):
    return frozenset({e.name})


@free_vars.register(Add)
@free_vars.register(Sub)
@free_vars.register(Mul)
@free_vars.register(Div)
def _(e):
    return free_vars(e.left) | free_vars(e.right)


@free_vars.register
def _(e: Neg):
    return free_vars(e.operand)


@free_vars.register
def _(e: Pow):
    return free_vars(e.base)


@free_vars.register(Apply)
@free_vars.register(BumpDeriv)
def _(e):
    return free_vars(e.arg)
