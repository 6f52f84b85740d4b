"""Text <-> expression tree.

Grammar (whitespace insignificant)::

    expr    := term (('+'|'-') term)*
    term    := factor (('*'|'/') factor)*
    factor  := '-' factor | base ('^' INTEGER)?
    base    := NUMBER | 'pi' | IDENT | FUNC '(' expr ')' | '(' expr ')'
    FUNC    := 'sin' | 'cos' | 'exp' | 'bump'

Unary minus binds looser than '^', so ``-a^2`` is ``-(a^2)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

from .errors import ParseError
from .smoothfn.nodes import (
    FUNCTIONS, Add, Apply, BumpDeriv, Const, Div, Mul, Neg, Pow, SmoothExpr, Sub, Var,
)

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class SourceText:
    text: str
    variable_set: tuple = ("s",)

    def __post_init__(self):
        names = tuple(self.variable_set)
        if not names:
            raise ValueError("variable_set must be nonempty")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        reserved = set(FUNCTIONS) | {"pi"}
        if reserved & set(names):
            raise ValueError(f"variable names collide with reserved words: {sorted(reserved & set(names))}")
        object.__setattr__(self, "variable_set", names)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, src: SourceText):
        self.src = src
        self.text = src.text
        self.toks = _tokenize(src.text)
        self.i = 0
        self.open_parens = []

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, pos=None):
        raise ParseError(msg, self.tok.pos if pos is None else pos, self.text)

    def accept(self, op) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.i += 1
            return True
        return False

    def parse(self) -> SmoothExpr:
        if self.tok.kind == "end":
            self.error("empty expression")
        e = self.expr()
        if self.tok.kind != "end":
            if self.tok.text == ")":
                self.error("unbalanced parenthesis")
            self.error(f"unexpected {self.tok.text!r}")
        return e

    def expr(self):
        e = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self):
        e = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            rhs = self.factor()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def factor(self):
        if self.accept("-"):
            return Neg(self.factor())
        b = self.base()
        if self.accept("^"):
            t = self.tok
            if t.kind != "num" or not re.fullmatch(r"\d+", t.text):
                self.error("integer exponent required after '^'")
            self.i += 1
            return Pow(b, int(t.text))
        return b

    def base(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Const(float(t.text))
        if t.kind == "name":
            self.i += 1
            if t.text == "pi":
                return Const(math.pi, "pi")
            if t.text in FUNCTIONS:
                paren = self.tok.pos
                if not self.accept("("):
                    self.error(f"expected '(' after {t.text}")
                arg = self.closed_group(paren)
                return Apply(t.text, arg)
            if t.text in self.src.variable_set:
                return Var(t.text)
            self.error(f"unknown identifier {t.text!r}", t.pos)
        if self.accept("("):
            return self.closed_group(t.pos)
        if t.kind == "end":
            self.error("unexpected end of input")
        if t.text == ")":
            self.error("unbalanced parenthesis")
        self.error(f"unexpected {t.text!r}")

    def closed_group(self, open_pos):
        e = self.expr()
        if not self.accept(")"):
            if self.tok.kind == "end":
                raise ParseError("unbalanced parenthesis", open_pos, self.text)
            self.error(f"expected ')' but found {self.tok.text!r}")
        return e


def parse_expr(src: SourceText | str, variables: Sequence[str] | None = None) -> SmoothExpr:
    """Parse text into an expression tree.

    ``src`` may be a :class:`SourceText` or a plain string together with
    ``variables``.
    """
    if isinstance(src, str):
        src = SourceText(src, tuple(variables or ("s",)))
    return _Parser(src).parse()


# -- formatting -------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2}
_SYMBOL = {Add: "+", Sub: "-", Mul: "*", Div: "/"}
_FACTOR_PREC = 3
_ATOM_PREC = 4


def _fmt_number(x: float) -> str:
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _prec(e) -> int:
    if type(e) in _PREC:
        return _PREC[type(e)]
    if isinstance(e, (Neg, Pow)):
        return _FACTOR_PREC
    if isinstance(e, Const) and e.symbol is None and math.copysign(1.0, e.value) < 0:
        return _FACTOR_PREC
    return _ATOM_PREC


def _wrap(e, needed: int) -> str:
    s = format_expr(e)
    return f"({s})" if _prec(e) < needed else s


def format_expr(e: SmoothExpr) -> str:
    """Render ``e`` so that :func:`parse_expr` rebuilds the same tree.

    The round trip is exact for trees the parser can produce.  Negative
    constants print as ``-c`` (reparsed as a negation) and bump derivatives
    as ``bump_d<k>(...)``, which is outside the input grammar.
    """
    if isinstance(e, Const):
        if e.symbol is not None:
            return e.symbol
        return _fmt_number(e.value)
    if isinstance(e, Var):
        return e.name
    if type(e) in _PREC:
        p = _PREC[type(e)]
        return f"{_wrap(e.left, p)}{_SYMBOL[type(e)]}{_wrap(e.right, p + 1)}"
    if isinstance(e, Neg):
        return "-" + _wrap(e.operand, _FACTOR_PREC)
    if isinstance(e, Pow):
        return f"{_wrap(e.base, _ATOM_PREC)}^{e.exponent}"
    if isinstance(e, Apply):
        return f"{e.func}({format_expr(e.arg)})"
    if isinstance(e, BumpDeriv):
        return f"bump_d{e.order}({format_expr(e.arg)})"
    fmt = getattr(e, "format", None)
    if fmt is not None:
        return fmt()
    raise TypeError(f"cannot format {type(e).__name__}")
