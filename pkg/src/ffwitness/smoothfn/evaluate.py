"""Numerical evaluation of expressions to jets (vectorized over points)."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache, singledispatch
from math import factorial

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import expit

from ..errors import EvaluationError
from ..jets import Jet, compose_derivs, mul_derivs
from .calculus import free_vars
from .nodes import Add, Apply, BumpDeriv, Const, Div, Mul, Neg, Pow, SmoothExpr, Sub, Var

# beyond this the logistic factor of the bump is below the smallest double
_FLAT_EXPONENT = 700.0


@lru_cache(maxsize=None)
def _logistic_polys(order: int) -> tuple:
    # sigma(y) = 1/(1+e^y) satisfies sigma' = sigma^2 - sigma, so every
    # derivative is a polynomial in sigma
    polys = [np.array([0.0, 1.0])]
    for _ in range(order):
        polys.append(P.polymul(P.polyder(polys[-1]), [0.0, -1.0, 1.0]))
    return tuple(polys)


def _logistic_derivs(y: np.ndarray, order: int) -> np.ndarray:
    polys = _logistic_polys(order)
    pos = y >= 0
    # evaluate on the side where sigma is small, reflect via sigma(y) = 1 - sigma(-y)
    s = np.where(pos, expit(-y), expit(y))
    out = np.empty((order + 1,) + y.shape)
    for m, poly in enumerate(polys):
        val = P.polyval(s, poly)
        if m == 0:
            out[m] = np.where(pos, val, 1.0 - val)
        else:
            sign = -1.0 if m % 2 == 0 else 1.0
            out[m] = np.where(pos, val, sign * val)
    return out


def bump_derivs(z, order: int) -> np.ndarray:
    """Derivatives ``b0^(0..order)`` of the bump profile at the points ``z``.

    The profile is 1 on [-1, 1], 0 outside (-3, 3) and
    ``1/(1 + exp(w/(w^2 - 1)))`` with ``w = 2 - |s|`` in between.  Seams and
    points where the logistic factor underflows are flat to every order.
    """
    z = np.asarray(z, dtype=float)
    if z.ndim == 0:
        return bump_derivs(z[None], order)[:, 0]
    out = np.zeros((order + 1,) + z.shape)
    a = np.abs(z)
    out[0][a <= 1.0] = 1.0
    mid = (a > 1.0) & (a < 3.0)
    if not mid.any():
        return out
    zm = z[mid]
    w0 = 2.0 - np.abs(zm)
    with np.errstate(divide="ignore", over="ignore"):
        y0 = w0 / (w0 * w0 - 1.0)
    flat_one = y0 < -_FLAT_EXPONENT
    regular = np.abs(y0) <= _FLAT_EXPONENT

    vals = np.zeros((order + 1, zm.size))
    vals[0][flat_one] = 1.0
    if regular.any():
        zr = zm[regular]
        w = np.zeros((order + 1, zr.size))
        w[0] = 2.0 - np.abs(zr)
        if order >= 1:
            w[1] = -np.sign(zr)
        den = mul_derivs(w, w)
        den[0] -= 1.0
        recip = compose_derivs(_reciprocal_outer(den[0], order), den)
        g = mul_derivs(w, recip)
        vals[:, regular] = compose_derivs(_logistic_derivs(g[0], order), g)
    out[:, mid] = vals
    return out


def _reciprocal_outer(x: np.ndarray, order: int) -> np.ndarray:
    m = np.arange(order + 1).reshape((-1,) + (1,) * x.ndim)
    fact = np.array([float(factorial(k)) for k in range(order + 1)]).reshape(m.shape)
    return (-1.0) ** m * fact / x[None] ** (m + 1)


def _power_outer(x: np.ndarray, n: int, order: int) -> np.ndarray:
    out = np.zeros((order + 1,) + x.shape)
    coef = 1.0
    for m in range(order + 1):
        if m > n:
            break
        out[m] = coef * x ** (n - m)
        coef *= n - m
    return out


def outer_derivs(func: str, x: np.ndarray, order: int) -> np.ndarray:
    """``func^(0..order)`` at ``x`` for the built-in unary functions."""
    x = np.asarray(x, dtype=float)
    if func == "exp":
        return np.broadcast_to(np.exp(x), (order + 1,) + x.shape).copy()
    if func in ("sin", "cos"):
        s, c = np.sin(x), np.cos(x)
        cycle = [s, c, -s, -c] if func == "sin" else [c, -s, -c, s]
        return np.stack([cycle[m % 4] for m in range(order + 1)])
    if func == "bump":
        return bump_derivs(x, order)
    raise EvaluationError(f"unknown function {func!r}")


@dataclass
class _Ctx:
    var: str | None
    order: int
    shape: tuple
    env: dict = field(default_factory=dict)

    def constant(self, value) -> np.ndarray:
        out = np.zeros((self.order + 1,) + self.shape)
        out[0] = value
        return out


@singledispatch
def jets_of(e: SmoothExpr, ctx: _Ctx) -> np.ndarray:
    """Raw-derivative array of ``e``; shape ``(order + 1,) + ctx.shape``."""
    raise EvaluationError(f"cannot evaluate node {type(e).__name__}")


@jets_of.register
def _(e: Const, ctx):
    return ctx.constant(e.value)


@jets_of.register
def _(e: Var, ctx):
    if e.name == ctx.var:
        out = ctx.constant(ctx.env[e.name])
        if ctx.order >= 1:
            out[1] = 1.0
        return out
    if e.name in ctx.env:
        return ctx.constant(ctx.env[e.name])
    raise EvaluationError(f"unbound variable {e.name!r}")


@jets_of.register
def _(e: Add, ctx):
    return jets_of(e.left, ctx) + jets_of(e.right, ctx)


@jets_of.register
def _(e: Sub, ctx):
    return jets_of(e.left, ctx) - jets_of(e.right, ctx)


@jets_of.register
def _(e: Mul, ctx):
    if isinstance(e.left, Const):
        return e.left.value * jets_of(e.right, ctx)
    return mul_derivs(jets_of(e.left, ctx), jets_of(e.right, ctx))


@jets_of.register
def _(e: Div, ctx):
    num = jets_of(e.left, ctx)
    if isinstance(e.right, Const):
        if e.right.value == 0.0:
            raise EvaluationError(f"zero denominator in {e}")
        return num / e.right.value
    den = jets_of(e.right, ctx)
    if np.any(den[0] == 0.0):
        raise EvaluationError(f"zero denominator {e.right} in {e}")
    recip = compose_derivs(_reciprocal_outer(den[0], ctx.order), den)
    return mul_derivs(num, recip)


@jets_of.register
def _(e: Neg, ctx):
    return -jets_of(e.operand, ctx)


@jets_of.register
def _(e: Pow, ctx):
    base = jets_of(e.base, ctx)
    return compose_derivs(_power_outer(base[0], e.exponent, ctx.order), base)


@jets_of.register
def _(e: Apply, ctx):
    inner = jets_of(e.arg, ctx)
    return compose_derivs(outer_derivs(e.func, inner[0], ctx.order), inner)


@jets_of.register
def _(e: BumpDeriv, ctx):
    inner = jets_of(e.arg, ctx)
    outer = bump_derivs(inner[0], ctx.order + e.order)[e.order:]
    return compose_derivs(outer, inner)


def single_var(e: SmoothExpr, default: str = "s") -> str:
    names = free_vars(e)
    if len(names) > 1:
        raise EvaluationError(f"expected a univariate expression, found variables {sorted(names)}")
    return next(iter(names)) if names else default


def eval_derivs(e: SmoothExpr, points, order: int, var: str | None = None, env: dict | None = None) -> np.ndarray:
    """Derivatives of ``e`` in ``var`` at an array of points.

    Returns shape ``(order + 1,) + points.shape``.  ``env`` binds the other
    variables (broadcastable to ``points``).
    """
    if var is None:
        var = single_var(e)
    x = np.asarray(points, dtype=float)
    values = dict(env or {})
    values[var] = x
    shape = np.broadcast_shapes(x.shape, *(np.shape(v) for v in values.values()))
    with np.errstate(over="raise", invalid="raise"):
        try:
            out = jets_of(e, _Ctx(var, order, shape, values))
        except FloatingPointError as exc:
            raise EvaluationError(f"floating point failure evaluating {e}: {exc}") from exc
    return np.broadcast_to(out, (order + 1,) + shape)


def eval_jet(e: SmoothExpr, point: float, order: int, var: str | None = None) -> Jet:
    """Order-``order`` jet of the univariate expression ``e`` at ``point``."""
    d = eval_derivs(e, np.array([float(point)]), order, var)
    return Jet(point, d[:, 0])


def evaluate(e: SmoothExpr, **env) -> np.ndarray:
    """Values of ``e`` with variables bound by keyword (arrays broadcast)."""
    shape = np.broadcast_shapes(*(np.shape(v) for v in env.values())) if env else ()
    values = {k: np.asarray(v, dtype=float) for k, v in env.items()}
    with np.errstate(over="raise", invalid="raise"):
        try:
            out = jets_of(e, _Ctx(None, 0, shape, values))
        except FloatingPointError as exc:
            raise EvaluationError(f"floating point failure evaluating {e}: {exc}") from exc
    return np.broadcast_to(out[0], shape)
