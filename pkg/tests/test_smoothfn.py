import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import random_inner, random_outer, random_trig_text, sympy_derivs

from ffwitness.errors import EvaluationError, UsageError
from ffwitness.exprparse import format_expr, parse_expr
from ffwitness.smoothfn import (
    BumpDeriv, Const, PeriodicFn, Var, build_bump_monomial, build_trig_witness, bump_bound_check,
    bump_derivs, calibrate_bump_M, diff, diff_symbolic, eval_derivs, eval_jet, evaluate,
    free_vars, simplify, substitute,
)
from ffwitness.smoothfn import calculus as C


def S(text):
    return parse_expr(text, ["s"])


def test_eval_jet_examples():
    assert np.allclose(eval_jet(S("sin(2*pi*s)"), 0.0, 1).derivs, [0.0, 2 * math.pi])
    assert eval_jet(S("bump(s)"), 2.0, 0).derivs[0] == 0.5
    assert np.array_equal(eval_jet(S("bump(s)"), 0.5, 3).derivs, [1.0, 0.0, 0.0, 0.0])


def test_diff_examples():
    t = Var("t")
    assert format_expr(diff_symbolic(parse_expr("t^2", ["t"]), "t")) == "2*t"
    d = diff_symbolic(S("sin(2*pi*s)"), "s")
    pts = np.linspace(0, 1, 7)
    assert np.allclose(evaluate(d, s=pts), 2 * np.pi * np.cos(2 * np.pi * pts))
    db = diff_symbolic(S("bump(s)"), "s")
    assert isinstance(db, BumpDeriv)
    assert evaluate(db, s=0.5) == 0.0
    assert diff(t, "s") == Const(0.0)


def test_bump_profile():
    z = np.array([-3.5, -3.0, -2.0, -1.0, 0.0, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5])
    vals = bump_derivs(z, 0)[0]
    assert vals[0] == vals[1] == vals[-1] == vals[-2] == 0.0
    assert vals[3] == vals[4] == vals[5] == 1.0
    assert vals[2] == vals[7] == 0.5
    assert 0.5 < vals[6] < 1.0 and 0.0 < vals[8] < 0.5
    assert np.allclose(bump_derivs(-z, 4)[0], vals)


def test_bump_is_flat_at_seams():
    for seam in (1.0, 3.0):
        z = np.array([seam - 1e-3, seam, seam + 1e-3])
        d = bump_derivs(z, 6)
        assert np.all(np.abs(d[1:, 1]) == 0.0)
        assert np.all(np.abs(d[1:4]) < 1e-10)


def test_bump_derivatives_match_sympy():
    for z in (1.2, 2.0, 2.9):
        ours = eval_jet(S("bump(s)"), z, 5).derivs
        ref = sympy_derivs(S("bump(s)"), "s", z, 5)
        assert np.allclose(ours, ref, rtol=1e-11, atol=1e-11 * np.abs(ref).max())
        assert np.allclose(eval_jet(S("bump(s)"), -z, 5).derivs, ref * (-1.0) ** np.arange(6),
                           rtol=1e-11, atol=1e-11 * np.abs(ref).max())


def test_eval_jet_against_iterated_diff():
    rng = np.random.default_rng(5)
    # symbolic trees grow quickly under repeated differentiation, so keep the order modest
    for _ in range(30):
        e = substitute(parse_expr(random_outer(rng), ["t"]), {"t": S(random_inner(rng, terms=1))})
        p = float(rng.uniform(-1, 1))
        jet = eval_jet(e, p, 5).derivs
        d = e
        scale = np.abs(jet).max()
        for k in range(6):
            assert abs(float(evaluate(d, s=p)) - jet[k]) <= 1e-11 * max(abs(jet[k]), 1e-3 * scale)
            d = diff(d, "s")


def test_eval_jet_against_sympy():
    rng = np.random.default_rng(11)
    for _ in range(6):
        e = substitute(parse_expr(random_outer(rng), ["t"]), {"t": S(random_inner(rng, terms=1))})
        p = float(rng.uniform(-1, 1))
        ours = eval_jet(e, p, 4).derivs
        ref = sympy_derivs(e, "s", p, 4)
        assert np.allclose(ours, ref, rtol=1e-12, atol=1e-12 * np.abs(ref).max())


def test_evaluation_errors():
    with pytest.raises(EvaluationError, match="zero denominator"):
        eval_jet(S("1/(s-s)"), 0.0, 1)
    with pytest.raises(EvaluationError):
        evaluate(S("exp(exp(exp(s)))"), s=10.0)
    with pytest.raises(EvaluationError, match="unbound"):
        evaluate(parse_expr("s*t", ["s", "t"]), s=1.0)


def test_simplifier_rules():
    s = Var("s")
    assert C.add(C.sub(s, Const(2.0)), Const(2.0)) == s
    assert C.mul(Const(0.0), s) == Const(0.0)
    assert C.mul(Const(2.0), C.mul(Const(3.0), s)) == C.mul(Const(6.0), s)
    assert C.add(C.neg(s), s) == Const(0.0)
    assert C.power(s, 0) == Const(1.0)
    assert simplify(parse_expr("0*s+1*s", ["s"])) == s
    assert free_vars(parse_expr("s*t+pi", ["s", "t"])) == {"s", "t"}
    assert substitute(s * s, {"s": Const(3.0)}) == Const(9.0)


def test_trig_witness_examples():
    u = build_trig_witness(1, 2, 0.0)
    assert u(0.0) == 0.0
    assert math.isclose(u.jet(0.0, 3).derivs[3], -math.sqrt(2 * math.pi), rel_tol=1e-12)
    u = build_trig_witness(7, 4, 0.3)
    assert abs(float(u(0.3))) < 1e-15


@pytest.mark.parametrize("n", [1, 10, 100])
@pytest.mark.parametrize("i0", [2, 4])
def test_witness_identity(n, i0):
    from ffwitness.seminorms import seminorm_sup
    u = build_trig_witness(n, i0, 0.25)
    norm = seminorm_sup(u, i0).value
    peak = abs(u.jet(0.25, i0 + 1).derivs[i0 + 1])
    assert abs(norm * peak - 1.0) <= 1e-12
    assert abs(norm - (2 * math.pi * n) ** -0.5) <= 1e-12


def test_periodic_contract():
    f = PeriodicFn(S(random_trig_text(np.random.default_rng(0))))
    f.check_periodic()
    f.derivative(3).check_periodic()
    with pytest.raises(UsageError):
        PeriodicFn(S("s")).check_periodic()
    assert PeriodicFn.constant(2.0).harmonic == 0
    assert (build_trig_witness(4, 2, 0) + build_trig_witness(6, 2, 0)).harmonic == 2


def test_bump_monomial_examples():
    for alpha in [(0,), (3,), (1, 2), (2, 0, 1)]:
        f = build_bump_monomial(len(alpha), alpha, 0.5)
        origin = (0.0,) * len(alpha)
        assert f.partial(alpha, origin) == math.prod(math.factorial(a) for a in alpha)
        outside = (1.5,) + origin[1:]
        assert f(outside) == 0.0
        for kappa in np.ndindex(*(a + 1 for a in alpha)):
            if tuple(kappa) != alpha:
                assert f.partial(kappa, origin) == 0.0
    with pytest.raises(UsageError):
        build_bump_monomial(2, (1,), 0.5)
    with pytest.raises(UsageError):
        build_bump_monomial(1, (1,), 1.5)


def test_bump_bound_examples():
    M = calibrate_bump_M((0, 0))
    for d in (0.5, 0.1):
        assert bump_bound_check(build_bump_monomial(2, (0, 0), d), (0, 0), d, M).passed
    f = build_bump_monomial(1, (1,), 1.0)
    M1 = bump_bound_check(f, (1,), 1.0, 1.0).max_ratio
    assert bump_bound_check(f, (1,), 1.0, M1).passed
    alpha = (3,)
    assert calibrate_bump_M(alpha) >= math.factorial(3)
    assert not bump_bound_check(build_bump_monomial(1, alpha, 0.5), alpha, 0.5, 5.0).passed
    with pytest.raises(UsageError):
        bump_bound_check(f, (1,), 1.0, 0.0)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=3).filter(lambda a: sum(a) <= 4))
def test_max_ratio_does_not_grow_as_delta_shrinks(alpha):
    alpha = tuple(alpha)
    ratios = [bump_bound_check(build_bump_monomial(len(alpha), alpha, d), alpha, d, 1.0).max_ratio
              for d in (1.0, 0.5, 0.1, 0.01)]
    for a, b in zip(ratios, ratios[1:]):
        assert b <= a * (1 + 1e-12)


def test_multivariate_evaluation_broadcasts():
    e = parse_expr("s*t+sin(t)", ["s", "t"])
    d = eval_derivs(e, np.array([0.0, 1.0]), 2, "t", {"s": 2.0})
    assert np.allclose(d[1], 2.0 + np.cos([0.0, 1.0]))
