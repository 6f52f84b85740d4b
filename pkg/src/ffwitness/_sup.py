"""Grid maximization with golden-section polishing."""
from __future__ import annotations

import numpy as np

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0
CHUNK = 1 << 15


def _eval_chunked(fun, grid: np.ndarray) -> np.ndarray:
    parts = [np.asarray(fun(grid[k:k + CHUNK])) for k in range(0, grid.size, CHUNK)]
    return np.concatenate(parts, axis=-1)


def golden_max_rows(f, lo: np.ndarray, hi: np.ndarray, iterations: int) -> tuple:
    """Golden-section search run in lockstep on independent intervals.

    ``f`` maps an array of points (one per interval) to the values.
    """
    a, b = lo.astype(float), hi.astype(float)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    best_v, best_x = np.where(fc >= fd, fc, fd), np.where(fc >= fd, c, d)
    for _ in range(iterations):
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = np.where(left, b - _INVPHI * (b - a), d)
        new_d = np.where(left, c, a + _INVPHI * (b - a))
        probe = np.where(left, new_c, new_d)
        fp = f(probe)
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        c, d = new_c, new_d
        better = fp > best_v
        best_v, best_x = np.where(better, fp, best_v), np.where(better, probe, best_x)
    return best_v, best_x


def row_sups(fun, grid: np.ndarray, refinement: int, periodic: bool = False,
             bounds: tuple | None = None) -> tuple:
    """Per-row sup of ``|fun(points)|`` over a sorted 1-D grid.

    ``fun`` maps an array of points to an array of shape ``(rows, n)``.
    Each row's grid argmax is polished by golden-section search on the two
    neighbouring cells.  Returns ``(sups, argmaxes)``.
    """
    grid = np.asarray(grid, dtype=float)
    vals = np.abs(_eval_chunked(fun, grid))
    rows = vals.shape[0]
    sups = vals.max(axis=1)
    args = grid[vals.argmax(axis=1)]
    if refinement <= 0 or grid.size < 2:
        return sups, args
    h = np.diff(grid)
    lo_b, hi_b = bounds if bounds is not None else (grid[0], grid[-1])
    j = vals.argmax(axis=1)
    left = np.where(j > 0, h[np.maximum(j - 1, 0)], h[0])
    right = np.where(j < grid.size - 1, h[np.minimum(j, grid.size - 2)], h[-1])
    a, b = grid[j] - left, grid[j] + right
    if not periodic:
        a, b = np.maximum(a, lo_b), np.minimum(b, hi_b)
    live = np.flatnonzero((sups > 0.0) & (b > a))
    if live.size == 0:
        return sups, args

    def f(x):
        # row r of the batch is evaluated at its own point x[k]
        return np.abs(np.asarray(fun(x))[live, np.arange(live.size)])

    v, x = golden_max_rows(f, a[live], b[live], refinement)
    better = v > sups[live]
    sups[live[better]] = v[better]
    args[live[better]] = x[better]
    return sups, args
