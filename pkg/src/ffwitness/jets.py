"""Truncated derivative-sequence ("jet") arithmetic.

A jet of order K at a point s stores the raw derivatives
``[z(s), z'(s), ..., z^(K)(s)]``.  Factorials only appear inside
:func:`jet_compose`, which works on Taylor-normalized copies.

The array kernels (``mul_derivs``, ``compose_derivs``) accept arrays whose
leading axis is the derivative order and whose trailing axes are a batch of
evaluation points; the scalar :class:`Jet` API is a thin wrapper over them.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import Iterator, Sequence

import numpy as np

from .errors import UsageError


class JetError(UsageError):
    """Incompatible jets or insufficient outer derivatives."""


@dataclass(frozen=True, eq=False)
class Jet:
    base_point: float
    derivs: np.ndarray

    def __post_init__(self):
        d = np.array(self.derivs, dtype=float).reshape(-1)
        if d.size == 0:
            raise JetError("a jet needs at least the value entry")
        if not np.all(np.isfinite(d)):
            raise JetError(f"non-finite jet entries: {d}")
        d.setflags(write=False)
        object.__setattr__(self, "derivs", d)
        object.__setattr__(self, "base_point", float(self.base_point))

    @property
    def order(self) -> int:
        return self.derivs.size - 1

    def __getitem__(self, k):
        return self.derivs[k]

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return self.base_point == other.base_point and np.array_equal(self.derivs, other.derivs)

    def __repr__(self):
        return f"Jet(base_point={self.base_point!r}, derivs={self.derivs.tolist()!r})"

    def __add__(self, other):
        return jet_add(self, other)

    def __mul__(self, other):
        return jet_mul(self, other)

    @classmethod
    def constant(cls, value: float, base_point: float, order: int) -> "Jet":
        d = np.zeros(order + 1)
        d[0] = value
        return cls(base_point, d)

    @classmethod
    def identity(cls, base_point: float, order: int) -> "Jet":
        d = np.zeros(order + 1)
        d[0] = base_point
        if order >= 1:
            d[1] = 1.0
        return cls(base_point, d)


def _check_pair(a: Jet, b: Jet):
    if a.order != b.order:
        raise JetError(f"jet orders differ: {a.order} vs {b.order}")
    if a.base_point != b.base_point:
        raise JetError(f"jet base points differ: {a.base_point} vs {b.base_point}")


@lru_cache(maxsize=None)
def _binomial_rows(order: int) -> tuple:
    return tuple(tuple(comb(k, l) for l in range(k + 1)) for k in range(order + 1))


@lru_cache(maxsize=None)
def _factorials(order: int) -> np.ndarray:
    f = np.array([float(factorial(k)) for k in range(order + 1)])
    f.setflags(write=False)
    return f


def mul_derivs(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Leibniz product of raw-derivative arrays (axis 0 = order)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    K = a.shape[0] - 1
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for k, row in enumerate(_binomial_rows(K)):
        for l, c in enumerate(row):
            out[k] += c * a[l] * b[k - l]
    return out


def _taylor_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    # truncated Cauchy product on Taylor coefficients
    K = p.shape[0] - 1
    out = np.zeros(np.broadcast_shapes(p.shape, q.shape))
    for k in range(K + 1):
        for j in range(k + 1):
            out[k] += p[j] * q[k - j]
    return out


def compose_derivs(outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    """Derivatives of ``phi o z`` from ``phi^(m)(z(s))`` and ``z^(k)(s)``.

    ``outer[m]`` must already be evaluated at ``inner[0]``.  Uses Horner's
    scheme on the Taylor-normalized increment ``z - z(s)``.
    """
    inner = np.asarray(inner, dtype=float)
    outer = np.asarray(outer, dtype=float)
    K = inner.shape[0] - 1
    if outer.shape[0] < K + 1:
        raise JetError(f"need {K + 1} outer derivatives, got {outer.shape[0]}")
    fact = _factorials(K).reshape((-1,) + (1,) * (inner.ndim - 1))
    h = inner / fact
    h[0] = 0.0
    c = outer[: K + 1] / fact
    shape = np.broadcast_shapes(h.shape, c.shape)
    acc = np.zeros(shape)
    acc[0] = c[K]
    for m in range(K - 1, -1, -1):
        acc = _taylor_mul(acc, h)
        acc[0] = acc[0] + c[m]
    return acc * fact


def jet_add(a: Jet, b: Jet) -> Jet:
    _check_pair(a, b)
    return Jet(a.base_point, a.derivs + b.derivs)


def jet_mul(a: Jet, b: Jet) -> Jet:
    _check_pair(a, b)
    return Jet(a.base_point, mul_derivs(a.derivs, b.derivs))


def jet_compose(outer: Sequence[float], inner: Jet) -> Jet:
    """Faa di Bruno composition.

    ``outer`` holds ``phi^(0..K')`` evaluated at ``inner.derivs[0]`` with
    ``K' >= inner.order``; extra entries are ignored.
    """
    outer = np.asarray(outer, dtype=float).reshape(-1)
    if outer.size < inner.order + 1:
        raise JetError(
            f"jet_compose needs {inner.order + 1} outer derivatives, got {outer.size}"
        )
    return Jet(inner.base_point, compose_derivs(outer, inner.derivs))


# -- set partitions ---------------------------------------------------------

def set_partitions(n: int, max_block: int | None = None) -> Iterator[list]:
    """Yield the set partitions of ``{1..n}`` as lists of blocks.

    With ``max_block`` only partitions whose blocks all have at most that
    many elements are produced.
    """
    cap = n if max_block is None else max_block

    def rec(k, blocks):
        if k > n:
            yield [list(b) for b in blocks]
            return
        for b in blocks:
            if len(b) < cap:
                b.append(k)
                yield from rec(k + 1, blocks)
                b.pop()
        if cap >= 1:
            blocks.append([k])
            yield from rec(k + 1, blocks)
            blocks.pop()

    if n == 0:
        yield []
        return
    yield from rec(1, [])


def count_partitions(n: int, max_block: int | None = None) -> int:
    """Number of set partitions of ``{1..n}`` with block sizes <= max_block."""
    cap = n if max_block is None else max_block

    # P(m) = sum over size of the block containing the first element
    table = [1] + [0] * n
    for m in range(1, n + 1):
        table[m] = sum(comb(m - 1, j - 1) * table[m - j] for j in range(1, min(cap, m) + 1))
    return table[n]


def faa_di_bruno_partitions(outer: Sequence[float], inner: Jet) -> Jet:
    """Set-partition expansion of ``D^k(phi o z)``; auditable, exponential cost.

    Kept as a cross-check for :func:`jet_compose` at small orders.
    """
    outer = np.asarray(outer, dtype=float).reshape(-1)
    K = inner.order
    if outer.size < K + 1:
        raise JetError(f"need {K + 1} outer derivatives, got {outer.size}")
    out = np.zeros(K + 1)
    out[0] = outer[0]
    for k in range(1, K + 1):
        total = 0.0
        for blocks in set_partitions(k):
            term = outer[len(blocks)]
            for b in blocks:
                term *= inner.derivs[len(b)]
            total += term
        out[k] = total
    return Jet(inner.base_point, out)
