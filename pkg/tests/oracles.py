"""Independent reference computations: sympy trees and random generators."""
from __future__ import annotations

import math
from functools import lru_cache

import mpmath
import numpy as np
import sympy as sp

from ffwitness.exprparse import parse_expr
from ffwitness.smoothfn import Add, Apply, Const, Div, Mul, Neg, PeriodicFn, Pow, Sub, Var

SYMBOLS = {name: sp.Symbol(name, real=True) for name in ("s", "t", "eta", "xi")}


def sympy_bump_branch(z):
    """Middle branch of the bump profile for ``1 < z < 3``."""
    w = 2 - z
    return 1 / (1 + sp.exp(w / (w ** 2 - 1)))


def to_sympy(e, bump=None):
    if isinstance(e, Const):
        return sp.pi if e.symbol == "pi" else sp.Rational(repr(e.value))
    if isinstance(e, Var):
        return SYMBOLS.get(e.name) or sp.Symbol(e.name, real=True)
    if isinstance(e, Add):
        return to_sympy(e.left, bump) + to_sympy(e.right, bump)
    if isinstance(e, Sub):
        return to_sympy(e.left, bump) - to_sympy(e.right, bump)
    if isinstance(e, Mul):
        return to_sympy(e.left, bump) * to_sympy(e.right, bump)
    if isinstance(e, Div):
        return to_sympy(e.left, bump) / to_sympy(e.right, bump)
    if isinstance(e, Neg):
        return -to_sympy(e.operand, bump)
    if isinstance(e, Pow):
        return to_sympy(e.base, bump) ** e.exponent
    if isinstance(e, Apply):
        arg = to_sympy(e.arg, bump)
        if e.func == "bump":
            if bump is None:
                raise ValueError("bump needs an explicit branch")
            return bump(arg)
        return getattr(sp, e.func)(arg)
    raise TypeError(type(e).__name__)


def sympy_derivs(e, var: str, point: float, order: int, digits: int = 30) -> np.ndarray:
    """``[e(point), e'(point), ...]`` from sympy differentiation, evaluated at high precision."""
    x = SYMBOLS[var]
    f = to_sympy(e, sympy_bump_branch)
    out = []
    for _ in range(order + 1):
        out.append(float(sp.N(f.subs(x, sp.Float(repr(float(point)), digits)), digits)))
        f = sp.diff(f, x)
    return np.array(out)


@lru_cache(maxsize=None)
def chain_rule_poly(order: int):
    """``D^order F(Z(x))`` from sympy's chain rule, as a function of
    ``f_m = F^(m)(Z(x))`` and ``z_j = Z^(j)(x)`` (mpmath callable)."""
    x = sp.Symbol("x")
    F, Z = sp.Function("F"), sp.Function("Z")
    fs = sp.symbols(f"f0:{order + 1}")
    zs = sp.symbols(f"z0:{order + 1}")
    g = sp.diff(F(Z(x)), x, order) if order else F(Z(x))
    rep = {}
    for d in g.atoms(sp.Derivative):
        if d.expr == F(Z(x)):
            rep[d] = fs[d.derivative_count]
    g = g.xreplace(rep).xreplace({F(Z(x)): fs[0]})
    rep = {d: zs[d.derivative_count] for d in g.atoms(sp.Derivative)}
    g = g.xreplace(rep).xreplace({Z(x): zs[0]})
    return sp.lambdify(fs + zs, g, "mpmath")


@lru_cache(maxsize=None)
def product_rule_poly(order: int):
    """``D^order (A B)`` from sympy, in terms of ``a_j`` and ``b_j``."""
    x = sp.Symbol("x")
    A, B = sp.Function("A"), sp.Function("B")
    a_s = sp.symbols(f"a0:{order + 1}")
    b_s = sp.symbols(f"b0:{order + 1}")
    g = sp.diff(A(x) * B(x), x, order)
    rep = {}
    for d in g.atoms(sp.Derivative):
        rep[d] = (a_s if d.expr == A(x) else b_s)[d.derivative_count]
    g = g.xreplace(rep).xreplace({A(x): a_s[0], B(x): b_s[0]})
    return sp.lambdify(a_s + b_s, g, "mpmath")


def chain_rule_derivs(outer, inner) -> np.ndarray:
    K = len(inner) - 1
    with mpmath.workdps(40):
        args = [mpmath.mpf(float(v)) for v in outer[: K + 1]] + [mpmath.mpf(float(v)) for v in inner]
        return np.array([float(chain_rule_poly(k)(*(args[: k + 1] + args[K + 1: K + 2 + k])))
                         for k in range(K + 1)])


def product_rule_derivs(a, b) -> np.ndarray:
    K = len(a) - 1
    with mpmath.workdps(40):
        am = [mpmath.mpf(float(v)) for v in a]
        bm = [mpmath.mpf(float(v)) for v in b]
        return np.array([float(product_rule_poly(k)(*(am[: k + 1] + bm[: k + 1]))) for k in range(K + 1)])


# -- random generators (seeded numpy, deterministic) ------------------------------

OUTER = ["sin(t)", "cos(t)", "exp(t)", "t^3", "t^2*sin(t)", "exp(t/2)*cos(t)", "1/(2+t^2)", "t^4-t"]


def random_outer(rng) -> str:
    return OUTER[int(rng.integers(len(OUTER)))]


def random_inner(rng, var: str = "s", terms: int = 3) -> str:
    parts = []
    for _ in range(terms):
        a = round(float(rng.uniform(-1, 1)), 3)
        k = int(rng.integers(1, 3))
        f = ["sin", "cos"][int(rng.integers(2))]
        parts.append(f"({a})*{f}({k}*{var})")
    parts.append(f"({round(float(rng.uniform(-0.5, 0.5)), 3)})*{var}^2")
    return "+".join(parts)


def random_trig_text(rng, var: str = "s", degree: int = 2) -> str:
    parts = [f"{round(float(rng.normal()), 3)}"]
    for k in range(1, degree + 1):
        a, b = (round(float(v), 3) for v in rng.normal(size=2))
        parts.append(f"({a})*cos(2*pi*{k}*{var})+({b})*sin(2*pi*{k}*{var})")
    return "+".join(parts)


def random_periodic(rng, degree: int = 2) -> PeriodicFn:
    return PeriodicFn(parse_expr(random_trig_text(rng, "s", degree), ["s"]))


def random_cylinder_text(rng) -> str:
    """Smooth, 1-periodic in eta, mixing t-polynomials and characteristic waves."""
    a, b, c = (round(float(v), 3) for v in rng.normal(size=3))
    k, m = (int(v) for v in rng.integers(1, 3, size=2))
    pieces = [
        f"({a})*sin(2*pi*({k}*eta-{m}*t))",
        f"({b})*t^{int(rng.integers(0, 3))}*cos(2*pi*{k}*eta)",
        f"({c})*exp(t/2)",
    ]
    return "+".join(pieces)


def log_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def factorial_prod(alpha) -> float:
    return float(math.prod(math.factorial(a) for a in alpha))
