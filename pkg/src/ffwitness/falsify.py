"""Witness pipeline against continuity claims for ``x -> phi o x``.

Given a nonaffine ``phi``, a point ``s0`` and a claimed bound ``M`` on
``||phi' o (x + u)||_i`` for ``x = s0`` and ``||u||_{i0}`` small, build
the trig witness ``u_n``, bound the Faa di Bruno remainder by ``M2`` and
pick ``n`` so that ``A sqrt(2 pi n) - M2 (1 + (2 pi n)^(-1/2))^i`` clears
the claim.  Verdicts need the analytic lower bound and the measured
seminorm to agree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._parallel import pmap
from ._sup import row_sups
from .errors import BoundConstructionError, NoWitnessError, UsageError
from .gateaux import _phi_var, _random_trig, compose_map
from .jets import count_partitions
from .seminorms import GridConfig, SeminormValue, seminorm_sup
from .smoothfn import PeriodicFn, SmoothExpr, build_trig_witness, diff_symbolic, eval_derivs

AFFINE_TOL = 1e-12
VIOLATED, NO_WITNESS, INCONCLUSIVE = "violated", "no_witness", "inconclusive"


@dataclass(frozen=True)
class BoundedClaim:
    """``||phi' o (s0 + u)||_i <= M`` whenever ``||u||_{i0} < delta``."""

    phi: SmoothExpr
    s0: float
    i0: int
    M: float
    delta: float
    i: int | None = None
    var: str = "t"

    def __post_init__(self):
        if self.i is None:
            object.__setattr__(self, "i", self.i0 + 1)
        if self.i0 < 2 or self.i0 % 2:
            raise UsageError(f"i0 must be an even integer >= 2, got {self.i0}")
        if self.i != self.i0 + 1:
            raise UsageError(f"output index must be i0 + 1 = {self.i0 + 1}, got {self.i}")
        if not self.M > 0:
            raise UsageError(f"claimed bound M must be positive, got {self.M}")
        if not self.delta > 0:
            raise UsageError(f"delta must be positive, got {self.delta}")


@dataclass(frozen=True)
class NonaffinityScan:
    s0: float
    A: float
    affine: bool


def _phi_derivs(phi: SmoothExpr, var: str, points, order: int) -> np.ndarray:
    return eval_derivs(phi, points, order, var)


def scan_nonaffinity(phi: SmoothExpr, interval=(-1.0, 1.0), grid: int = 1024,
                     refinement: int = 40, var: str | None = None) -> NonaffinityScan:
    """Point of largest ``|phi''|`` on a grid over ``interval``."""
    if grid < 64:
        raise UsageError("scan grid needs at least 64 points")
    var = _phi_var(phi, var)
    lo, hi = map(float, interval)
    pts = np.linspace(lo, hi, grid)
    sups, args = row_sups(lambda p: _phi_derivs(phi, var, p, 2)[2:], pts, refinement)
    A = float(sups[0])
    return NonaffinityScan(float(args[0]), A, A < AFFINE_TOL)


@dataclass(frozen=True)
class M2Certificate:
    """``M2 = B C`` bounds every non-leading Faa di Bruno term in ``D^i(phi' o (s0 + u))``."""

    M2: float
    C: float
    B: int
    radius: float
    validated: int = 0
    worst_margin: float = float("inf")


def remainder_inequality_margins(phi: SmoothExpr, s0: float, i0: int, M2: float,
                                 u: PeriodicFn, u_norm: float, points,
                                 var: str = "t") -> np.ndarray:
    """``lhs - rhs`` of the remainder inequality at ``points`` for one ``u``.

    lhs = ``|D^i(phi' o (s0+u))|``; rhs = ``|phi''(s0+u) D^i u| - M2 (1+||u||)^i``.
    Left side from jets of the composed expression, right side from the
    jets of ``u`` alone.
    """
    i = i0 + 1
    comp = compose_map(diff_symbolic(phi, var), PeriodicFn.constant(s0) + u, var)
    lhs = np.abs(comp.derivs(points, i)[i])
    ud = u.derivs(points, i)
    phi2 = _phi_derivs(phi, var, s0 + ud[0], 2)[2]
    rhs = np.abs(phi2 * ud[i]) - M2 * (1.0 + u_norm) ** i
    return lhs - rhs


def m2_bound(phi: SmoothExpr, s0: float, i0: int, radius: float = 1.0,
             samples: int = 50, seed: int = 0, grid: GridConfig | None = None,
             var: str | None = None, validate: bool = True) -> M2Certificate:
    """Faa di Bruno remainder constant for ``||u||_{i0} <= 1`` around ``x = s0``.

    ``C`` is the sup of ``|phi^(k+1)|``, ``1 <= k <= i``, over
    ``[s0 - 1.1 r, s0 + 1.1 r]``; ``B`` counts the set partitions of
    ``{1..i}`` into at least two blocks (all blocks then have size <= i0).
    The result is checked on ``samples`` random ``u``.
    """
    if radius < 1.0:
        raise UsageError("radius must be >= 1 to cover ||u||_{i0} <= 1")
    var = _phi_var(phi, var)
    i = i0 + 1
    pad = 1.1 * radius
    pts = np.linspace(s0 - pad, s0 + pad, 2049)
    sups, _ = row_sups(lambda p: _phi_derivs(phi, var, p, i + 1)[2:], pts, 40)
    C = float(sups.max())
    B = count_partitions(i, i0)
    cert = M2Certificate(B * C, C, B, float(radius))
    if validate:
        cert = validate_m2(phi, s0, i0, cert, samples, seed, grid, var)
    return cert


def validate_m2(phi: SmoothExpr, s0: float, i0: int, cert: M2Certificate, samples: int = 50,
                seed: int = 0, grid: GridConfig | None = None, var: str = "t") -> M2Certificate:
    """Check the remainder inequality on random ``u`` with ``||u||_{i0} <= 1``.

    Raises :class:`BoundConstructionError` on any violation.
    """
    rng = np.random.default_rng(seed)
    jobs = []
    for _ in range(samples):
        p = _random_trig(rng, int(rng.integers(1, 9)))
        target = float(rng.uniform(0.05, 0.95))
        jobs.append((p, target))
    s = np.concatenate([[s0], np.linspace(0.0, 1.0, 64, endpoint=False)])

    def check(job):
        p, target = job
        # the grid seminorm is linear in scaling, so ||u||_{i0} = target on this grid
        u = (target / seminorm_sup(p, i0, grid).value) * p
        margins = remainder_inequality_margins(phi, s0, i0, cert.M2, u, target, s, var)
        return float(margins.min())

    worst = min(pmap(check, jobs)) if jobs else float("inf")
    if worst < -1e-9:
        raise BoundConstructionError(f"remainder bound M2={cert.M2} violated (margin {worst:.3g})")
    return M2Certificate(cert.M2, cert.C, cert.B, cert.radius, samples, worst)


def witness_predicate(n: int, A: float, M2: float, i0: int, target: float) -> bool:
    r = math.sqrt(2.0 * math.pi * n)
    return target < A * r - M2 * (1.0 + 1.0 / r) ** (i0 + 1) and i0 / r < 1.0


def choose_n(A: float, m2: M2Certificate | float, i0: int, target: float) -> int:
    """Smallest positive ``n`` satisfying :func:`witness_predicate` (doubling, then bisection)."""
    if A <= AFFINE_TOL:
        raise NoWitnessError("phi'' vanishes at s0; no witness can be built there")
    M2 = m2.M2 if isinstance(m2, M2Certificate) else float(m2)
    hi = 1
    while not witness_predicate(hi, A, M2, i0, target):
        hi *= 2
    lo = hi // 2  # predicate false at lo (or lo == 0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if witness_predicate(mid, A, M2, i0, target):
            hi = mid
        else:
            lo = mid
    return hi


def exact_lower_bound(A: float, M2: float, n: int, i: int) -> float:
    r = math.sqrt(2.0 * math.pi * n)
    return A * r - M2 * (1.0 + 1.0 / r) ** i


@dataclass(frozen=True)
class WitnessReport:
    claim: BoundedClaim
    A: float
    m2: M2Certificate
    n: int
    witness_norm: float
    exact_lower: float
    numeric_seminorm: SeminormValue
    verdict: str
    note: str = ""

    def to_dict(self, seed: int = 0, version: str | None = None) -> dict:
        from . import __version__
        from .exprparse import format_expr
        c = self.claim
        return {
            "claim": {"phi": format_expr(c.phi), "s0": c.s0, "i0": c.i0, "i": c.i,
                      "M": c.M, "delta": c.delta},
            "derived": {"A": self.A, "M2": self.m2.M2, "B": self.m2.B, "C": self.m2.C,
                        "n": self.n, "witness_norm": self.witness_norm},
            "chain": {"exact_lower": self.exact_lower,
                      "numeric_seminorm": self.numeric_seminorm.value,
                      "grid": {"resolution": self.numeric_seminorm.resolution,
                               "refinement": self.numeric_seminorm.refinement}},
            "verdict": self.verdict,
            "seed": seed,
            "version": version or __version__,
        }


def witness_composition(claim: BoundedClaim, n: int) -> tuple:
    """``(u_n, phi' o (s0 + u_n))`` for the claim's witness point."""
    u = build_trig_witness(n, claim.i0, claim.s0)
    x = PeriodicFn.constant(claim.s0)
    return u, compose_map(diff_symbolic(claim.phi, claim.var), x + u, claim.var)


def falsify_bounded_claim(claim: BoundedClaim, grid: GridConfig | None = None,
                          seed: int = 0) -> WitnessReport:
    grid = grid or GridConfig()
    A = abs(float(_phi_derivs(claim.phi, claim.var, np.array([claim.s0]), 2)[2, 0]))
    m2 = m2_bound(claim.phi, claim.s0, claim.i0, seed=seed, grid=grid, var=claim.var)
    if A <= AFFINE_TOL:
        note = ("phi'' vanishes identically" if scan_nonaffinity(claim.phi, var=claim.var).affine
                else "phi'' vanishes at s0 but not everywhere; rerun scan_nonaffinity to pick s0")
        empty = SeminormValue(0.0, claim.i, grid.resolution, grid.refinement)
        return WitnessReport(claim, A, m2, 0, 0.0, 0.0, empty, NO_WITNESS, note)

    n = choose_n(A, m2, claim.i0, claim.M + 1.0)
    # ||u_n||_{i0} = (2 pi n)^(-1/2); raising n keeps every inequality
    n_admissible = math.floor(1.0 / (2.0 * math.pi * claim.delta ** 2)) + 1
    n = max(n, n_admissible)
    u, composed = witness_composition(claim, n)
    witness_norm = seminorm_sup(u, claim.i0, grid).value
    numeric = seminorm_sup(composed, claim.i, grid)
    lower = exact_lower_bound(A, m2.M2, n, claim.i)
    if witness_norm < claim.delta and lower > claim.M and numeric.value > claim.M:
        verdict = VIOLATED
    else:
        verdict = INCONCLUSIVE
    return WitnessReport(claim, A, m2, n, witness_norm, lower, numeric, verdict)
