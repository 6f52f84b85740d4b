"""The composition operator ``x -> phi o x`` on smooth 1-periodic functions,
its derivative ``v -> (phi' o x) v`` and numerical checks of both."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._parallel import pmap
from .errors import UsageError
from .seminorms import GridConfig, SeminormValue, gamma_norm_lower, seminorm_sup
from .smoothfn import PeriodicFn, SmoothExpr, Var, diff, free_vars, substitute
from .smoothfn import calculus as C

DEFAULT_STEPS = (1e-1, 1e-2, 1e-3, 1e-4)


def _phi_var(phi: SmoothExpr, var: str | None) -> str:
    if var is not None:
        return var
    names = free_vars(phi)
    if len(names) > 1:
        raise UsageError(f"phi must be univariate, found {sorted(names)}")
    return next(iter(names)) if names else "t"


def compose_map(phi: SmoothExpr, x: PeriodicFn, var: str | None = None) -> PeriodicFn:
    """``phi o x`` as a periodic function (same harmonic as ``x``)."""
    var = _phi_var(phi, var)
    return PeriodicFn(substitute(phi, {var: x.expr}), x.var, x.harmonic)


@dataclass(frozen=True)
class MultiplicationOperator:
    """The continuous linear map ``v -> multiplier * v``."""

    multiplier: PeriodicFn

    def __call__(self, v: PeriodicFn) -> PeriodicFn:
        return self.multiplier * v

    def __sub__(self, other: "MultiplicationOperator") -> "MultiplicationOperator":
        return MultiplicationOperator(self.multiplier - other.multiplier)

    def norm_lower(self, i: int, probe: PeriodicFn | None = None,
                   grid: GridConfig | None = None) -> float:
        return gamma_norm_lower(self.multiplier, i, probe, grid)


def gateaux_analytic(phi: SmoothExpr, x: PeriodicFn, var: str | None = None) -> MultiplicationOperator:
    var = _phi_var(phi, var)
    return MultiplicationOperator(compose_map(diff(phi, var), x, var))


@dataclass(frozen=True)
class QuotientResidual:
    t: float
    index: int
    residual: SeminormValue


def quotient_remainder(phi: SmoothExpr, x: PeriodicFn, u: PeriodicFn, t: float,
                       var: str | None = None) -> PeriodicFn:
    """``(phi o (x + t u) - phi o x)/t - (phi' o x) u``."""
    if t == 0:
        raise UsageError("step t must be nonzero")
    var = _phi_var(phi, var)
    moved = compose_map(phi, x + t * u, var)
    base = compose_map(phi, x, var)
    quotient = PeriodicFn(C.div(C.sub(moved.expr, base.expr), C.const(t)), x.var,
                          math.gcd(moved.harmonic, base.harmonic))
    return quotient - gateaux_analytic(phi, x, var)(u)


def gateaux_quotient(phi: SmoothExpr, x: PeriodicFn, u: PeriodicFn, t: float, i: int,
                     grid: GridConfig | None = None) -> QuotientResidual:
    return QuotientResidual(t, i, seminorm_sup(quotient_remainder(phi, x, u, t), i, grid))


def quotient_slope(phi: SmoothExpr, x: PeriodicFn, u: PeriodicFn, i: int,
                   steps=DEFAULT_STEPS, grid: GridConfig | None = None) -> tuple:
    """Least-squares slope of log residual against log t, plus the residuals."""
    residuals = pmap(lambda t: gateaux_quotient(phi, x, u, t, i, grid), steps)
    r = np.array([q.residual.value for q in residuals])
    if np.any(r <= 0.0):
        return float("nan"), residuals
    slope = np.polyfit(np.log(np.asarray(steps, dtype=float)), np.log(r), 1)[0]
    return float(slope), residuals


# -- continuity probe --------------------------------------------------------

@dataclass(frozen=True)
class ProbeSample:
    label: str
    norm: float          # ||u||_{p_index}
    admissible: bool
    distance: float      # lower bound of the derivative distance, 0 if not admissible


@dataclass(frozen=True)
class ContinuityProbe:
    distance: float
    samples: tuple
    exercised: tuple     # (input index, output index) actually used
    flag: str | None

    @property
    def admissible_count(self) -> int:
        return sum(1 for s in self.samples if s.admissible)


def _scaled_witness(n: int, i0: int) -> PeriodicFn:
    omega = 2.0 * math.pi * n
    expr = C.mul(C.const(omega ** (-i0 - 0.5)), C.apply("sin", C.mul(C.const(omega), Var("s"))))
    return PeriodicFn(expr, "s", n)


def _random_trig(rng: np.random.Generator, degree: int) -> PeriodicFn:
    s = Var("s")
    expr = C.const(rng.normal())
    for k in range(1, degree + 1):
        a, b = rng.normal(size=2) / k
        arg = C.mul(C.const(2.0 * math.pi * k), s)
        expr = C.add(expr, C.add(C.mul(C.const(a), C.apply("cos", arg)),
                                 C.mul(C.const(b), C.apply("sin", arg))))
    return PeriodicFn(expr, "s", 1)


def cb_continuity_probe(phi: SmoothExpr, x: PeriodicFn, p_index: int, delta: float,
                        out_index: int, sample_count: int = 8,
                        frequencies=(10, 100), seed: int = 0,
                        grid: GridConfig | None = None) -> ContinuityProbe:
    """Largest observed ``||phi' o (x+u) - phi' o x||_{out_index}`` over ``||u||_{p_index} < delta``.

    Samples are trig witnesses of the given frequencies (unscaled) plus
    ``sample_count`` random trigonometric polynomials of degree <= 8 scaled
    into the ``delta``-ball.  The distance is measured with probe ``v = 1``.
    """
    if delta <= 0:
        raise UsageError("delta must be positive")
    rng = np.random.default_rng(seed)
    candidates = [(f"witness n={n}", _scaled_witness(int(n), p_index)) for n in frequencies]
    for k in range(sample_count):
        p = _random_trig(rng, int(rng.integers(1, 9)))
        norm = seminorm_sup(p, p_index, grid).value
        radius = float(rng.uniform(0.1, 0.9)) * delta
        candidates.append((f"random #{k}", (radius / norm) * p))

    base = gateaux_analytic(phi, x)

    def run(item):
        label, u = item
        norm = seminorm_sup(u, p_index, grid).value
        if not norm < delta:
            return ProbeSample(label, norm, False, 0.0)
        moved = gateaux_analytic(phi, x + u)
        return ProbeSample(label, norm, True, (moved - base).norm_lower(out_index, grid=grid))

    samples = tuple(pmap(run, candidates))
    admissible = [s for s in samples if s.admissible]
    flag = None if admissible else "no admissible samples"
    distance = max((s.distance for s in admissible), default=0.0)
    return ContinuityProbe(distance, samples, (p_index, out_index), flag)
