import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffwitness.errors import UsageError
from ffwitness.jets import (
    Jet, JetError, compose_derivs, count_partitions, faa_di_bruno_partitions, jet_add,
    jet_compose, jet_mul, mul_derivs, set_partitions,
)

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def jets(order):
    return st.lists(finite, min_size=order + 1, max_size=order + 1).map(lambda d: Jet(0.25, d))


def test_exponential_product():
    a = Jet(0.0, [1, 2, 4, 8])
    b = Jet(0.0, [1, 3, 9, 27])
    assert np.allclose(jet_mul(a, b).derivs, [1, 5, 25, 125])


def test_compose_exp_with_sine():
    sine = Jet(0.0, [0, 1, 0, -1])
    assert np.allclose(jet_compose([1, 1, 1, 1], sine).derivs, [1, 1, 1, 0])


def test_square_of_sine():
    sine = Jet(0.0, [0, 1, 0, -1])
    assert np.allclose(jet_compose([0, 0, 2, 0], sine).derivs, [0, 0, 2, 0])


def test_identity_inner_returns_outer():
    outer = [0.3, -1.2, 2.5, 7.0, -4.0]
    assert np.allclose(jet_compose(outer, Jet.identity(0.0, 4)).derivs, outer)


def test_constant_inner_kills_derivatives():
    out = jet_compose([2.0, 5.0, 1.0], Jet.constant(1.5, 0.0, 2))
    assert np.array_equal(out.derivs, [2.0, 0.0, 0.0])


def test_batched_kernels_match_scalar():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(5, 7))
    b = rng.normal(size=(5, 7))
    outer = rng.normal(size=(5, 7))
    batched = mul_derivs(a, b)
    comp = compose_derivs(outer, a)
    for k in range(7):
        assert np.allclose(batched[:, k], jet_mul(Jet(0, a[:, k]), Jet(0, b[:, k])).derivs)
        assert np.allclose(comp[:, k], jet_compose(outer[:, k], Jet(0, a[:, k])).derivs)


def test_errors():
    with pytest.raises(JetError):
        jet_mul(Jet(0.0, [1, 2]), Jet(0.0, [1, 2, 3]))
    with pytest.raises(JetError):
        jet_add(Jet(0.0, [1, 2]), Jet(1.0, [1, 2]))
    with pytest.raises(JetError):
        jet_compose([1, 2], Jet(0.0, [1, 2, 3]))
    with pytest.raises(JetError):
        Jet(0.0, [1.0, math.inf])
    with pytest.raises(UsageError):
        Jet(0.0, [])


def test_jets_are_immutable():
    j = Jet(0.0, [1.0, 2.0])
    with pytest.raises(ValueError):
        j.derivs[0] = 5.0


def test_partition_counts():
    assert count_partitions(3, 2) == 4
    assert [count_partitions(n) for n in range(8)] == [1, 1, 2, 5, 15, 52, 203, 877]
    for n in range(7):
        for cap in range(1, n + 1):
            blocks = list(set_partitions(n, cap))
            assert len(blocks) == count_partitions(n, cap)
            assert all(max(map(len, p)) <= cap for p in blocks if p)


def test_partitions_of_three_with_small_blocks():
    got = {tuple(sorted(tuple(b) for b in p)) for p in set_partitions(3, 2)}
    assert got == {((1,), (2,), (3,)), ((1, 2), (3,)), ((1, 3), (2,)), ((1,), (2, 3))}


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6).flatmap(lambda k: st.tuples(jets(k), st.lists(finite, min_size=k + 1, max_size=k + 1))))
def test_horner_matches_partition_expansion(data):
    inner, outer = data
    fast = jet_compose(outer, inner).derivs
    slow = faa_di_bruno_partitions(outer, inner).derivs
    assert np.allclose(fast, slow, rtol=1e-11, atol=1e-11 * max(1.0, np.abs(slow).max()))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 6).flatmap(lambda k: st.tuples(jets(k), jets(k), jets(k))))
def test_ring_laws(abc):
    a, b, c = abc
    assert np.allclose(jet_mul(a, b).derivs, jet_mul(b, a).derivs)
    assert np.allclose(jet_mul(jet_mul(a, b), c).derivs, jet_mul(a, jet_mul(b, c)).derivs,
                       rtol=1e-10, atol=1e-9)
    assert np.allclose(jet_mul(a, b + c).derivs, (a * b + a * c).derivs, rtol=1e-10, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6).flatmap(lambda k: st.tuples(jets(k), jets(k))))
def test_compose_is_linear_in_outer(data):
    inner, other = data
    p, q = np.asarray(inner.derivs), np.asarray(other.derivs)
    left = jet_compose(p + 2 * q, inner).derivs
    right = jet_compose(p, inner).derivs + 2 * jet_compose(q, inner).derivs
    assert np.allclose(left, right, rtol=1e-10, atol=1e-9)
