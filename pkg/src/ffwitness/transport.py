"""Cylinder functions on ``[0,1] x R`` (1-periodic in ``eta``) and the
transport operators along the characteristics of ``d/dt + d/deta``.

``S(x)(t, eta) = x(eta - t)`` shifts initial data, and
``I(v)(t, eta) = int_0^t v(tau, eta - t + tau) dtau`` integrates along the
same lines.  Both are expression nodes carrying their own derivative
rules, so ``d_e(I(v)) = v`` holds by construction; quadrature only runs
when an ``I`` node is evaluated.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from ._sup import row_sups
from .errors import EvaluationError, UsageError
from .seminorms import GridConfig, seminorm_sup
from .smoothfn import (
    Apply, BumpDeriv, Const, Div, Mul, Neg, PeriodicFn, Pow, SmoothExpr, Var,
    diff, eval_derivs, evaluate, free_vars, simplify, substitute,
)
from .smoothfn import calculus as C
from .smoothfn.calculus import _rebuild
from .smoothfn.evaluate import _Ctx, jets_of

T, ETA, XI = "t", "eta", "xi"
QUAD_TOL = 1e-10
QUAD_NODES = 16
MAX_PANELS = 1 << 10
POINT_CHUNK = 2048


# -- operator nodes ----------------------------------------------------------

@dataclass(frozen=True)
class ShiftOp(SmoothExpr):
    """``(t, eta) -> x(eta - t)`` for ``x`` an expression in ``var``."""

    x: SmoothExpr
    var: str = "s"

    def format(self):
        return f"S[{self.var} -> {self.x}]"


@dataclass(frozen=True)
class IntegralOp(SmoothExpr):
    """``(t, eta) -> int_0^t v(tau, eta - t + tau) dtau``."""

    v: SmoothExpr

    def format(self):
        return f"I[{self.v}]"


def shift(x: SmoothExpr, var: str = "s") -> SmoothExpr:
    if isinstance(x, Const):
        return x
    return ShiftOp(x, var)


def integral(v: SmoothExpr) -> SmoothExpr:
    """``I(v)`` with constants and constant factors pulled out."""
    if isinstance(v, Const):
        return C.mul(v, Var(T))
    if isinstance(v, Neg):
        return C.neg(integral(v.operand))
    if isinstance(v, Mul) and isinstance(v.left, Const):
        return C.mul(v.left, integral(v.right))
    return IntegralOp(v)


@diff.register
def _(e: ShiftOp, var):
    if var == T:
        return C.neg(shift(diff(e.x, e.var), e.var))
    if var == ETA:
        return shift(diff(e.x, e.var), e.var)
    return C.ZERO


@diff.register
def _(e: IntegralOp, var):
    along = integral(diff(e.v, ETA))
    if var == T:
        return C.sub(e.v, along)
    if var == ETA:
        return along
    return integral(diff(e.v, var))


@substitute.register
def _(e: ShiftOp, mapping):
    if T in mapping or ETA in mapping:
        arg = C.sub(mapping.get(ETA, Var(ETA)), mapping.get(T, Var(T)))
        return substitute(e.x, {e.var: arg})
    return e


@substitute.register
def _(e: IntegralOp, mapping):
    if any(mapping.get(k, Var(k)) != Var(k) for k in (T, ETA)):
        raise UsageError("cannot substitute for t or eta inside I(...)")
    return integral(substitute(e.v, {k: m for k, m in mapping.items() if k not in (T, ETA)}))


@free_vars.register
def _(e: ShiftOp):
    return frozenset((T, ETA)) if free_vars(e.x) else frozenset()


@free_vars.register
def _(e: IntegralOp):
    return frozenset((T, ETA)) | free_vars(e.v)


@_rebuild.register
def _(e: ShiftOp):
    return shift(simplify(e.x), e.var)


@_rebuild.register
def _(e: IntegralOp):
    return integral(simplify(e.v))


@jets_of.register
def _(e: ShiftOp, ctx):
    return jets_of(substitute(e, {T: Var(T), ETA: Var(ETA)}), ctx)


@jets_of.register
def _(e: IntegralOp, ctx):
    flat = _Ctx(ctx.var, 0, ctx.shape, ctx.env)
    if ctx.order == 0:
        return _quadrature(e.v, ctx)[None]
    out = np.empty((ctx.order + 1,) + ctx.shape)
    for k, d in enumerate(_derivative_chain(e, ctx.var, ctx.order)):
        out[k] = jets_of(d, flat)[0]
    return out


@lru_cache(maxsize=256)
def _derivative_chain(e: SmoothExpr, var: str, order: int) -> tuple:
    chain = [e]
    for _ in range(order):
        chain.append(diff(chain[-1], var))
    return tuple(chain)


# -- quadrature ---------------------------------------------------------------

def _affine_in_t(arg: SmoothExpr):
    """``(a0, a1)`` with ``arg = a0 + a1 t`` when ``arg`` depends on ``t`` only."""
    if not free_vars(arg) <= {T}:
        return None
    slope = simplify(diff(arg, T))
    if not isinstance(slope, Const) or slope.value == 0.0:
        return None
    a0 = float(evaluate(arg, t=0.0))
    return a0, slope.value


def _bump_args(e: SmoothExpr):
    if isinstance(e, (Apply, BumpDeriv)):
        if isinstance(e, BumpDeriv) or e.func == "bump":
            yield e.arg
        yield from _bump_args(e.arg)
    elif isinstance(e, (ShiftOp,)):
        return
    elif isinstance(e, IntegralOp):
        yield from _bump_args(e.v)
    else:
        for name in ("left", "right", "operand", "base"):
            child = getattr(e, name, None)
            if isinstance(child, SmoothExpr):
                yield from _bump_args(child)


def _level_points(arg, levels) -> list:
    aff = _affine_in_t(arg)
    if aff is None:
        return []
    a0, a1 = aff
    return [(lv - a0) / a1 for lv in levels]


def bump_breakpoints(e: SmoothExpr) -> tuple:
    """Values of ``t`` where a bump factor of ``e`` hits a seam (|arg| = 1 or 3)."""
    pts = set()
    for arg in _bump_args(e):
        pts.update(_level_points(arg, (-3.0, -1.0, 1.0, 3.0)))
    return tuple(sorted(pts))


def bump_support(e: SmoothExpr):
    """Interval in ``t`` outside which ``e`` vanishes because of a bump factor, or None."""
    if isinstance(e, Mul):
        parts = [s for s in (bump_support(e.left), bump_support(e.right)) if s is not None]
        if not parts:
            return None
        return max(p[0] for p in parts), min(p[1] for p in parts)
    if isinstance(e, Neg):
        return bump_support(e.operand)
    if isinstance(e, Div):
        return bump_support(e.left)
    if isinstance(e, Pow) and e.exponent >= 1:
        return bump_support(e.base)
    if isinstance(e, (Apply, BumpDeriv)) and (isinstance(e, BumpDeriv) or e.func == "bump"):
        ends = _level_points(e.arg, (-3.0, 3.0))
        return (min(ends), max(ends)) if ends else None
    return None


@lru_cache(maxsize=None)
def _gauss(n: int):
    x, w = leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


def _panel_rule(lo: np.ndarray, hi: np.ndarray, panels: int):
    """Nodes and weights of composite Gauss-Legendre on each ``[lo, hi]`` row."""
    x, w = _gauss(QUAD_NODES)
    j = np.arange(panels)[:, None]
    frac = ((j + x[None, :]) / panels).reshape(-1)
    width = (hi - lo)[:, None]
    nodes = lo[:, None] + width * frac[None, :]
    weights = width * np.tile(w, panels)[None, :] / panels
    return nodes, weights


def _integrate_rows(v, t, eta, others, edges) -> np.ndarray:
    """``int`` of ``v`` along characteristics over consecutive ``edges`` columns."""
    result = None
    panels = 1
    while True:
        acc = np.zeros(t.size)
        for k in range(edges.shape[1] - 1):
            lo, hi = edges[:, k], edges[:, k + 1]
            nodes, weights = _panel_rule(lo, hi, panels)
            env = {T: nodes, ETA: (eta - t)[:, None] + nodes}
            env.update({name: val[:, None] for name, val in others.items()})
            acc += np.sum(np.asarray(evaluate(v, **env)) * weights, axis=1)
        if result is not None and np.all(np.abs(acc - result) <= QUAD_TOL * np.maximum(1.0, np.abs(acc))):
            return acc
        result = acc
        panels *= 2
        if panels > MAX_PANELS:
            raise EvaluationError(f"quadrature of I[{v}] did not converge to {QUAD_TOL}")


def _quadrature(v: SmoothExpr, ctx) -> np.ndarray:
    if T not in ctx.env or (ETA not in ctx.env and not eta_independent(v)):
        raise EvaluationError(f"I[{v}] needs t and eta bound")
    t = np.broadcast_to(ctx.env[T], ctx.shape).reshape(-1)
    eta = np.broadcast_to(ctx.env.get(ETA, 0.0), ctx.shape).reshape(-1)
    others = {k: np.broadcast_to(val, ctx.shape).reshape(-1) for k, val in ctx.env.items()
              if k not in (T, ETA) and k in free_vars(v)}
    lo, hi = np.minimum(0.0, t), np.maximum(0.0, t)
    sign = np.where(t < 0.0, -1.0, 1.0)
    support = bump_support(v)
    if support is not None:
        lo = np.clip(lo, support[0], support[1])
        hi = np.clip(hi, support[0], support[1])
    breaks = np.array(bump_breakpoints(v))
    cols = [lo] + [np.clip(b, lo, hi) for b in breaks] + [hi]
    edges = np.stack(cols, axis=1)
    out = np.empty(t.size)
    for a in range(0, t.size, POINT_CHUNK):
        sl = slice(a, a + POINT_CHUNK)
        sub_others = {k: val[sl] for k, val in others.items()}
        out[sl] = _integrate_rows(v, t[sl], eta[sl], sub_others, edges[sl])
    return (sign * out).reshape(ctx.shape)


# -- cylinder functions ----------------------------------------------------

@dataclass(frozen=True)
class CylinderFn:
    """A smooth function of ``(t, eta)``, 1-periodic in ``eta``."""

    expr: SmoothExpr

    def __post_init__(self):
        extra = free_vars(self.expr) - {T, ETA}
        if extra:
            raise UsageError(f"cylinder functions depend on t and eta only, found {sorted(extra)}")

    @classmethod
    def constant(cls, value: float) -> "CylinderFn":
        return cls(C.const(value))

    def __call__(self, t, eta) -> np.ndarray:
        return evaluate(self.expr, t=np.asarray(t, dtype=float), eta=np.asarray(eta, dtype=float))

    def partial(self, var: str, times: int = 1) -> "CylinderFn":
        e = self.expr
        for _ in range(times):
            e = diff(e, var)
        return CylinderFn(e)

    @property
    def eta_free(self) -> bool:
        return eta_independent(self.expr)

    def periodicity_defect(self, points: int = 11) -> float:
        t = np.linspace(0.0, 1.0, points)[:, None]
        eta = np.linspace(0.0, 1.0, points)[None, :]
        return float(np.max(np.abs(self(t, eta + 1.0) - self(t, eta))))

    def check_periodic(self, tol: float = 1e-8, points: int = 11) -> "CylinderFn":
        defect = self.periodicity_defect(points)
        if not defect <= tol:
            raise UsageError(f"not 1-periodic in eta: defect {defect:.3g} > {tol:g}")
        return self

    def __add__(self, other):
        return CylinderFn(C.add(self.expr, _cyl_expr(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return CylinderFn(C.sub(self.expr, _cyl_expr(other)))

    def __rsub__(self, other):
        return CylinderFn(C.sub(_cyl_expr(other), self.expr))

    def __mul__(self, other):
        return CylinderFn(C.mul(self.expr, _cyl_expr(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return CylinderFn(C.neg(self.expr))

    def __str__(self):
        return str(self.expr)


def _cyl_expr(other) -> SmoothExpr:
    if isinstance(other, CylinderFn):
        return other.expr
    if isinstance(other, (int, float)):
        return C.const(other)
    raise TypeError(f"cannot combine a cylinder function with {other!r}")


def eta_independent(e: SmoothExpr) -> bool:
    """Structural test: ``e`` does not depend on ``eta``."""
    if isinstance(e, ShiftOp):
        return not free_vars(e.x)
    if isinstance(e, IntegralOp):
        return eta_independent(e.v)
    if isinstance(e, Var):
        return e.name != ETA
    for name in ("left", "right", "operand", "base", "arg"):
        child = getattr(e, name, None)
        if isinstance(child, SmoothExpr) and not eta_independent(child):
            return False
    return True


def op_S(x: PeriodicFn) -> CylinderFn:
    return CylinderFn(shift(x.expr, x.var))


def op_I(v: CylinderFn) -> CylinderFn:
    return CylinderFn(integral(v.expr))


def d_e(v: CylinderFn) -> CylinderFn:
    """Derivative along the direction ``(1, 1)``."""
    return CylinderFn(C.add(diff(v.expr, T), diff(v.expr, ETA)))


# -- the map h and its derivative --------------------------------------------

def _check_phi3(phi3: SmoothExpr, points: int = 5):
    extra = free_vars(phi3) - {T, ETA, XI}
    if extra:
        raise UsageError(f"phi3 may only use t, eta, xi; found {sorted(extra)}")
    g = np.linspace(0.0, 1.0, 11)
    t, eta, xi = np.meshgrid(g, g, np.linspace(-1.0, 1.0, points), indexing="ij")
    defect = np.max(np.abs(evaluate(phi3, t=t, eta=eta + 1.0, xi=xi) - evaluate(phi3, t=t, eta=eta, xi=xi)))
    if not defect <= 1e-8:
        raise UsageError(f"phi3 is not 1-periodic in eta (defect {defect:.3g})")


def along(phi3: SmoothExpr, y: CylinderFn) -> SmoothExpr:
    """``(t, eta) -> phi3(t, eta, y(t, eta))``."""
    return substitute(phi3, {XI: y.expr})


def h_apply(phi3: SmoothExpr, x: PeriodicFn, y: CylinderFn) -> tuple:
    """``(x, y - S(x) - I(phi3 o [id, y]))``."""
    _check_phi3(phi3)
    return x, CylinderFn(C.sub(C.sub(y.expr, op_S(x).expr), integral(along(phi3, y))))


def h_gateaux(phi3: SmoothExpr, z: tuple, w1: tuple) -> tuple:
    """Derivative of :func:`h_apply` at ``z = (x, y)`` in a direction ``(0, v1)``."""
    _check_phi3(phi3)
    x, y = z
    _, v1 = w1
    slope = along(diff(phi3, XI), y)
    zero = PeriodicFn.constant(0.0, x.var)
    return zero, CylinderFn(C.sub(v1.expr, integral(C.mul(slope, v1.expr))))


def gateaux_difference(phi3: SmoothExpr, y: CylinderFn, v: CylinderFn, v1: CylinderFn) -> CylinderFn:
    """Second component of ``h_gateaux(z + (0, v)) - h_gateaux(z)`` applied to ``(0, v1)``.

    Written as a single ``I`` of the multiplier difference (``I`` is
    linear), so an affine ``phi3`` gives exactly zero.
    """
    _check_phi3(phi3)
    d3 = diff(phi3, XI)
    gap = C.sub(along(d3, y), along(d3, y + v))
    return CylinderFn(integral(C.mul(gap, v1.expr)))


# -- G seminorms ---------------------------------------------------------------

@dataclass(frozen=True)
class GSeminormValue:
    value: float
    index: int
    t_points: int
    eta_points: int
    refinement: int
    parts: dict = field(default_factory=dict, compare=False)

    def __float__(self):
        return self.value


def t_grid(e: SmoothExpr, points: int = 257) -> np.ndarray:
    """Uniform grid on [0, 1] plus a dense copy on every bump support inside it."""
    pieces = [np.linspace(0.0, 1.0, points)]
    bp = bump_breakpoints(e)
    if bp:
        lo, hi = max(0.0, min(bp)), min(1.0, max(bp))
        if hi > lo:
            pieces.append(np.linspace(lo, hi, points))
    return np.unique(np.concatenate(pieces))


def _cyl_sup(e: SmoothExpr, order: int, ts: np.ndarray, etas: np.ndarray, refinement: int) -> float:
    """``max_k<=order sup |d_t^k e|`` over the grid."""
    if isinstance(e, Const):
        return abs(e.value)
    if eta_independent(e):
        fun = lambda p: eval_derivs(e, p, order, T, {ETA: 0.0})  # noqa: E731
        sups, _ = row_sups(fun, ts, refinement, bounds=(0.0, 1.0))
        return float(sups.max())
    vals = eval_derivs(e, ts[:, None], order, T, {ETA: etas[None, :]})
    return float(np.max(np.abs(vals)))


def g_seminorm(w: tuple, i: int, points: int = 257, eta_points: int = 64,
               refinement: int = 24, grid: GridConfig | None = None) -> GSeminormValue:
    """``sup|D^l1 u| + sup|d_t^k d_eta^l d_e^l0 v|`` over ``l1 <= i``, ``k+l+l0 <= i``, ``l0 in {0,1}``."""
    if i < 0:
        raise UsageError("seminorm index must be nonnegative")
    u, v = w
    u_part = seminorm_sup(u, i, grid).value if u is not None else 0.0
    v_part = 0.0
    parts = {}
    if v is not None:
        ts = t_grid(v.expr, points)
        etas = np.arange(eta_points) / eta_points
        for l0 in (0, 1):
            base = v.expr if l0 == 0 else d_e(v).expr
            for l in range(i - l0 + 1):
                val = _cyl_sup(base, i - l - l0, ts, etas, refinement)
                parts[(l, l0)] = val
                v_part = max(v_part, val)
                base = diff(base, ETA)
    return GSeminormValue(u_part + v_part, i, points, eta_points, refinement,
                          {"u": u_part, "v": v_part, "terms": parts})


# -- witness and scaling demo ---------------------------------------------------

def transport_witness_v(t0: float, i0: int, delta: float) -> CylinderFn:
    """``delta^(-1/2) b0((t - t0)/delta) (t - t0)^(i0+1)``, constant in ``eta``."""
    if not 0.0 < t0 < 1.0:
        raise UsageError(f"t0 must lie in (0, 1), got {t0}")
    if not isinstance(i0, int) or i0 < 1:
        raise UsageError(f"i0 must be a positive integer, got {i0!r}")
    limit = min(t0, 1.0 - t0) / 3.0
    if not 0.0 < delta <= limit * (1.0 + 1e-12):
        raise UsageError(f"delta must lie in (0, {limit:g}] so the support stays inside [0, 1]")
    offset = C.sub(Var(T), C.const(t0))
    profile = C.apply("bump", C.mul(C.const(1.0 / delta), offset))
    return CylinderFn(C.mul(C.const(delta ** -0.5), C.mul(profile, C.power(offset, i0 + 1))))


@dataclass(frozen=True)
class GrowthRow:
    delta: float
    g_seminorm_i0: float
    exact_partial_lower: float
    derivative_distance: float


@dataclass(frozen=True)
class GrowthTable:
    rows: tuple
    i0: int
    t0: float
    inconclusive: bool
    note: str = ""

    COLUMNS = ("delta", "g_seminorm_i0", "exact_partial_lower", "derivative_distance")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.COLUMNS)
        for r in self.rows:
            writer.writerow([repr(float(getattr(r, c))) for c in self.COLUMNS])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "t0": self.t0, "i0": self.i0, "inconclusive": self.inconclusive, "note": self.note,
            "rows": [{c: float(getattr(r, c)) for c in self.COLUMNS} for r in self.rows],
        }


def nonlinearity_at(phi3: SmoothExpr, y: CylinderFn, t0: float, eta_points: int = 64) -> float:
    """``max_eta |d_xi^2 phi3(t0, eta, y(t0, eta))|``."""
    d2 = along(diff(diff(phi3, XI), XI), y)
    etas = np.arange(eta_points) / eta_points
    return float(np.max(np.abs(evaluate(d2, t=np.full_like(etas, t0), eta=etas))))


def transport_growth_demo(phi3: SmoothExpr, y: CylinderFn, t0: float, i0: int,
                          deltas, points: int = 257) -> GrowthTable:
    """Per ``delta``: size of the witness ``(0, v_delta)``, its exact large
    partial, and the derivative distance ``||h'(z+w) - h'(z)||`` at index
    ``i0 + 2`` with direction ``(0, 1)``."""
    _check_phi3(phi3)
    curvature = nonlinearity_at(phi3, y, t0)
    inconclusive = curvature < 1e-12
    one = CylinderFn.constant(1.0)
    rows = []
    for delta in deltas:
        v = transport_witness_v(t0, i0, float(delta))
        size = g_seminorm((None, v), i0, points).value
        exact = delta ** -0.5 * math.factorial(i0 + 1)
        gap = gateaux_difference(phi3, y, v, one)
        dist = g_seminorm((None, gap), i0 + 2, points).value
        rows.append(GrowthRow(float(delta), size, exact, dist))
    note = "d_xi^2 phi3 vanishes at t0 on the grid; no growth expected" if inconclusive else ""
    return GrowthTable(tuple(rows), i0, float(t0), inconclusive, note)
