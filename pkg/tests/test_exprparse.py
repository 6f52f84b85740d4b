import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffwitness.errors import ParseError
from ffwitness.exprparse import SourceText, format_expr, parse_expr
from ffwitness.smoothfn import Add, Apply, Const, Div, Mul, Neg, Pow, Sub, Var


def test_basic_tree():
    e = parse_expr("sin(2*pi*(s-0.5))", ["s"])
    assert e == Apply("sin", Mul(Mul(Const(2.0), Const(math.pi, "pi")), Sub(Var("s"), Const(0.5))))
    assert format_expr(e) == "sin(2*pi*(s-0.5))"


def test_precedence_and_unary_minus():
    assert parse_expr("-s^2", ["s"]) == Neg(Pow(Var("s"), 2))
    assert parse_expr("(-s)^2", ["s"]) == Pow(Neg(Var("s")), 2)
    assert parse_expr("a-b-c", ["a", "b", "c"]) == Sub(Sub(Var("a"), Var("b")), Var("c"))
    assert parse_expr("a/b*c", ["a", "b", "c"]) == Mul(Div(Var("a"), Var("b")), Var("c"))
    assert parse_expr("2+3*s", ["s"]) == Add(Const(2.0), Mul(Const(3.0), Var("s")))


def test_numbers():
    assert parse_expr("1e-3*s", ["s"]) == Mul(Const(1e-3), Var("s"))
    assert parse_expr(".5", ["s"]) == Const(0.5)
    assert parse_expr("bump(s)", ["s"]) == Apply("bump", Var("s"))


@pytest.mark.parametrize("text, message, position", [
    ("sin(s", "unbalanced parenthesis", 3),
    ("(s+1", "unbalanced parenthesis", 0),
    ("s^1.5", "integer exponent", 2),
    ("s+x", "unknown identifier 'x'", 2),
    ("", "empty expression", 0),
    ("s+", "unexpected", 2),
    ("s)", "unbalanced parenthesis", 1),
    ("s $ 2", "unexpected", 2),
])
def test_errors_carry_positions(text, message, position):
    with pytest.raises(ParseError) as info:
        parse_expr(text, ["s"])
    assert message in info.value.message
    assert info.value.position == position
    assert "^" in str(info.value)


def test_source_text_validation():
    with pytest.raises(ValueError):
        SourceText("s", ())
    with pytest.raises(ValueError):
        SourceText("s", ("s", "s"))
    with pytest.raises(ValueError):
        SourceText("s", ("sin",))
    assert parse_expr(SourceText("t*eta", ("t", "eta"))) == Mul(Var("t"), Var("eta"))


leaves = st.one_of(
    st.sampled_from([Var("s"), Var("t"), Const(math.pi, "pi")]),
    st.floats(0, 1e6, allow_nan=False, allow_infinity=False).map(Const),
)


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from([Add, Sub, Mul, Div]), children, children).map(lambda a: a[0](a[1], a[2])),
        children.map(Neg),
        st.tuples(children, st.integers(0, 5)).map(lambda a: Pow(*a)),
        st.tuples(st.sampled_from(["sin", "cos", "exp", "bump"]), children).map(lambda a: Apply(*a)),
    )


trees = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=200, deadline=None)
@given(trees)
def test_format_parse_round_trip(e):
    text = format_expr(e)
    assert parse_expr(text, ["s", "t"]) == e
