"""Function objects built on expressions: 1-periodic functions, the trig
witness, separable bump x monomial products and their scaling check."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .._sup import row_sups
from ..errors import UsageError
from . import calculus as C
from .evaluate import eval_derivs, eval_jet, evaluate
from .nodes import SmoothExpr, Var, as_expr


@dataclass(frozen=True)
class PeriodicFn:
    """A smooth 1-periodic function of one variable.

    ``harmonic`` is a declared finer period: the function repeats with
    period ``1/harmonic``.  Zero marks a constant.  Sup computations use it
    to sample a single fundamental cell.
    """

    expr: SmoothExpr
    var: str = "s"
    harmonic: int = 1
    declared_period: float = field(default=1.0, init=False)

    def __post_init__(self):
        extra = C.free_vars(self.expr) - {self.var}
        if extra:
            raise UsageError(f"periodic function in {self.var!r} has extra variables {sorted(extra)}")
        if self.harmonic < 0:
            raise UsageError("harmonic must be nonnegative")
        if not C.free_vars(self.expr):
            object.__setattr__(self, "harmonic", 0)

    @classmethod
    def constant(cls, value: float, var: str = "s") -> "PeriodicFn":
        return cls(C.const(value), var, 0)

    @property
    def cell(self) -> float:
        """Length of the fundamental cell used for sampling."""
        return 1.0 / self.harmonic if self.harmonic > 1 else 1.0

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return evaluate(self.expr, **{self.var: s}).copy()

    def derivs(self, points, order: int) -> np.ndarray:
        return eval_derivs(self.expr, points, order, self.var)

    def jet(self, point: float, order: int):
        return eval_jet(self.expr, point, order, self.var)

    def derivative(self, times: int = 1) -> "PeriodicFn":
        return PeriodicFn(C.diff_symbolic(self.expr, self.var, times), self.var, self.harmonic)

    def periodicity_defect(self, points: int = 101, shift: float = 1.0) -> float:
        s = np.linspace(0.0, 1.0, points)
        return float(np.max(np.abs(self(s + shift) - self(s))))

    def check_periodic(self, tol: float = 1e-10, points: int = 101) -> "PeriodicFn":
        defect = self.periodicity_defect(points)
        if defect > tol:
            raise UsageError(f"{self.expr} is not 1-periodic (defect {defect:.3g} > {tol:g})")
        if self.harmonic > 1:
            defect = self.periodicity_defect(points, 1.0 / self.harmonic)
            if defect > tol:
                raise UsageError(f"{self.expr} does not have period 1/{self.harmonic}")
        return self

    def _combine(self, other, build):
        if not isinstance(other, PeriodicFn):
            other = PeriodicFn(as_expr(other), self.var, 0)
        if other.var != self.var:
            other = PeriodicFn(C.substitute(other.expr, {other.var: Var(self.var)}), self.var, other.harmonic)
        return PeriodicFn(build(self.expr, other.expr), self.var, math.gcd(self.harmonic, other.harmonic))

    def __add__(self, other):
        return self._combine(other, C.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, C.sub)

    def __rsub__(self, other):
        return self._combine(other, lambda a, b: C.sub(b, a))

    def __mul__(self, other):
        return self._combine(other, C.mul)

    __rmul__ = __mul__

    def __neg__(self):
        return PeriodicFn(C.neg(self.expr), self.var, self.harmonic)

    def __str__(self):
        return str(self.expr)


def build_trig_witness(n: int, i0: int, s0: float) -> PeriodicFn:
    """``(2 pi n)^(-i0 - 1/2) sin(2 pi n (s - s0))``.

    Vanishes at ``s0``, has ``||u||_{i0} = (2 pi n)^(-1/2)`` and
    ``|D^{i0+1} u(s0)| = (2 pi n)^(1/2)``.
    """
    if n < 1 or int(n) != n:
        raise UsageError(f"frequency must be a positive integer, got {n}")
    if i0 < 2 or i0 % 2:
        raise UsageError(f"i0 must be an even integer >= 2, got {i0}")
    n = int(n)
    omega = 2.0 * math.pi * n
    s = Var("s")
    arg = C.mul(C.const(omega), C.sub(s, C.const(s0)))
    expr = C.mul(C.const(omega ** (-i0 - 0.5)), C.apply("sin", arg))
    return PeriodicFn(expr, "s", n)


@dataclass(frozen=True)
class SeparableFn:
    """``eta -> prod_i factors[i](eta_i)`` on R^N."""

    factors: tuple
    var: str = "s"

    @property
    def dimension(self) -> int:
        return len(self.factors)

    def partial(self, kappa, eta) -> float:
        """``d^kappa f`` at the point ``eta`` (one univariate jet per factor)."""
        if len(kappa) != self.dimension or len(eta) != self.dimension:
            raise UsageError("kappa and eta must match the dimension")
        out = 1.0
        for f, k, x in zip(self.factors, kappa, eta):
            out *= float(eval_derivs(f, np.array([x]), k, self.var)[k, 0])
        return out

    def __call__(self, eta) -> float:
        return self.partial((0,) * self.dimension, eta)


def build_bump_monomial(N: int, alpha, delta: float) -> SeparableFn:
    """``eta -> prod_i b0(eta_i / delta) eta_i^alpha_i``."""
    alpha = tuple(int(a) for a in alpha)
    if N < 1 or len(alpha) != N or min(alpha) < 0:
        raise UsageError(f"alpha must be {N} nonnegative integers, got {alpha}")
    if not 0.0 < delta <= 1.0:
        raise UsageError(f"delta must lie in (0, 1], got {delta}")
    s = Var("s")
    bump = C.apply("bump", C.div(s, C.const(delta)))
    return SeparableFn(tuple(C.mul(bump, C.power(s, a)) for a in alpha), "s")


@dataclass(frozen=True)
class BumpBoundReport:
    passed: bool
    max_ratio: float
    worst_kappa: tuple
    violations: int
    ratios: dict


# relative slack for roundoff when comparing against a calibrated M
BOUND_SLACK = 1e-12


def bump_bound_check(f: SeparableFn, alpha, delta: float, M: float,
                     resolution: int = 2049, refinement: int = 40) -> BumpBoundReport:
    """Check ``|d^kappa f(eta)| <= delta^(|alpha| - |kappa|) M`` for all kappa <= alpha.

    Each factor is sampled on ``delta * linspace(-3.3, 3.3)``; a product
    grid's sup of a product is the product of per-factor sups.
    """
    if M <= 0:
        raise UsageError("M must be positive")
    alpha = tuple(int(a) for a in alpha)
    sigma = np.linspace(-3.3, 3.3, resolution)
    sups = []
    for fac, a in zip(f.factors, alpha):
        grid = delta * sigma
        s, _ = row_sups(lambda pts, fac=fac, a=a: eval_derivs(fac, pts, a, f.var), grid, refinement)
        sups.append(s)
    total = sum(alpha)
    ratios = {}
    for kappa in itertools.product(*(range(a + 1) for a in alpha)):
        num = math.prod(float(sups[i][k]) for i, k in enumerate(kappa))
        ratios[kappa] = num / delta ** (total - sum(kappa))
    worst = max(ratios, key=ratios.get)
    limit = M * (1.0 + BOUND_SLACK)
    violations = sum(1 for r in ratios.values() if r > limit)
    return BumpBoundReport(violations == 0, ratios[worst], worst, violations, ratios)


def calibrate_bump_M(alpha, resolution: int = 2049, refinement: int = 40) -> float:
    """Smallest ``M`` passing :func:`bump_bound_check` at ``delta = 1``."""
    alpha = tuple(int(a) for a in alpha)
    f = build_bump_monomial(len(alpha), alpha, 1.0)
    return bump_bound_check(f, alpha, 1.0, 1.0, resolution, refinement).max_ratio
