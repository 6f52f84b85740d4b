"""Canonical seminorms on smooth 1-periodic functions and calibrations.

``||z||_i = sup{|D^l z(s)| : l <= i, s in R}``; by periodicity the sup is
taken over one cell.  Every value reported here is a grid lower bound of
the true sup, polished by golden-section search.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ._sup import row_sups
from .errors import UsageError
from .smoothfn import PeriodicFn


@dataclass(frozen=True)
class GridConfig:
    resolution: int = 1024  # points per sampled cell
    refinement: int = 24    # golden-section iterations per argmax

    def __post_init__(self):
        if self.resolution < 64:
            raise UsageError(f"grid resolution must be >= 64, got {self.resolution}")

    def doubled(self) -> "GridConfig":
        return replace(self, resolution=2 * self.resolution)


DEFAULT_GRID = GridConfig()


@dataclass(frozen=True)
class SeminormValue:
    value: float
    index: int
    resolution: int
    refinement: int
    per_order: tuple = field(default=(), compare=False)

    def __float__(self):
        return self.value


def derivative_sups(f: PeriodicFn, i: int, grid: GridConfig = DEFAULT_GRID,
                    offset: float = 0.0) -> tuple:
    """``(sup|D^l f|, argmax)`` for ``l = 0..i`` over one cell starting at ``offset``."""
    if i < 0:
        raise UsageError("seminorm index must be nonnegative")
    pts = offset + f.cell * np.arange(grid.resolution) / grid.resolution
    return row_sups(lambda p: f.derivs(p, i), pts, grid.refinement, periodic=True)


def seminorm_sup(f: PeriodicFn, i: int, grid: GridConfig | None = None,
                 offset: float = 0.0) -> SeminormValue:
    grid = grid or DEFAULT_GRID
    sups, _ = derivative_sups(f, i, grid, offset)
    return SeminormValue(float(sups.max()), i, grid.resolution, grid.refinement,
                         tuple(float(v) for v in sups))


@dataclass(frozen=True)
class DominationCertificate:
    """Sampled evidence that ``||z||_p <= M max_q ||z||_q`` over ``family``.

    Not a proof: ``M`` is the largest observed ratio (floored at 1).
    """

    p_index: int
    family: tuple
    M: float
    witness: int  # position of the sample attaining M
    ratios: tuple


def seminorm_dominates(p_index: int, family: Sequence[int], samples: Sequence[PeriodicFn],
                       grid: GridConfig | None = None) -> DominationCertificate:
    if not samples:
        raise UsageError("need at least one sample")
    family = tuple(sorted(set(family)))
    if not family:
        raise UsageError("family must be nonempty")
    top = max(max(family), p_index)
    ratios = []
    for z in samples:
        sups, _ = derivative_sups(z, top, grid or DEFAULT_GRID)
        num = float(sups[: p_index + 1].max())
        den = max(float(sups[: q + 1].max()) for q in family)
        if den == 0.0:
            ratios.append(0.0 if num == 0.0 else float("inf"))
        else:
            ratios.append(num / den)
    k = int(np.argmax(ratios))
    # constants below 1 carry no extra information; report at least 1
    return DominationCertificate(p_index, family, max(1.0, ratios[k]), k, tuple(ratios))


def gamma_norm_lower(g: PeriodicFn, i: int, probe: PeriodicFn | None = None,
                     grid: GridConfig | None = None) -> float:
    """Lower bound of the operator norm of ``v -> g v`` w.r.t. ``||.||_i`` on both sides.

    Returns ``||g probe||_i / ||probe||_i``; the default probe is the
    constant 1.
    """
    probe = probe if probe is not None else PeriodicFn.constant(1.0, g.var)
    den = seminorm_sup(probe, i, grid).value
    if den == 0.0:
        raise UsageError("probe has zero seminorm")
    return seminorm_sup(g * probe, i, grid).value / den


# -- calibrations -----------------------------------------------------------

@dataclass(frozen=True)
class CalibrationMember:
    assignment: tuple  # ((tag, seminorm index), ...)

    def index(self, tag: str) -> int:
        for t, i in self.assignment:
            if t == tag:
                return i
        raise KeyError(tag)


@dataclass(frozen=True)
class CalibrationSpec:
    """A finite calibration over two tagged copies of the periodic space."""

    members: tuple
    tags: tuple = ("mu", "nu")

    def __post_init__(self):
        if not self.members:
            raise UsageError("a calibration needs at least one member")
        if len(self.tags) != 2:
            raise UsageError("calibrations are modeled over exactly two tags")
        for m in self.members:
            if {t for t, _ in m.assignment} != set(self.tags):
                raise UsageError(f"member {m} does not assign every tag")

    def seminorm(self, member: int, tag: str, f: PeriodicFn,
                 grid: GridConfig | None = None) -> SeminormValue:
        return seminorm_sup(f, self.members[member].index(tag), grid)

    def determining_certificate(self, tag: str, samples: Sequence[PeriodicFn],
                                up_to: int | None = None,
                                grid: GridConfig | None = None) -> dict:
        """For each canonical index ``i <= up_to``, the best single-member certificate."""
        indices = sorted({m.index(tag) for m in self.members})
        up_to = max(indices) if up_to is None else up_to
        out = {}
        for i in range(up_to + 1):
            dominating = [q for q in indices if q >= i]
            family = [min(dominating)] if dominating else [max(indices)]
            out[i] = seminorm_dominates(i, family, samples, grid)
        return out


def calibration_canonical(ceiling: int = 16) -> CalibrationSpec:
    """Member ``i`` assigns ``||.||_i`` to both tags, for ``i = 0..ceiling``."""
    return CalibrationSpec(tuple(
        CalibrationMember((("mu", i), ("nu", i))) for i in range(ceiling + 1)
    ))
