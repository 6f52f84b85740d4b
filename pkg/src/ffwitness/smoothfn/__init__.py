"""Smooth expressions: AST, calculus, evaluation and concrete constructions."""
from .calculus import (
    diff, diff_symbolic, free_vars, simplify, substitute,
)
from .constructions import (
    BumpBoundReport, PeriodicFn, SeparableFn, build_bump_monomial, build_trig_witness,
    bump_bound_check, calibrate_bump_M,
)
from .evaluate import bump_derivs, eval_derivs, eval_jet, evaluate, outer_derivs
from .nodes import (
    Add, Apply, BumpDeriv, Const, Div, Mul, Neg, Pow, SmoothExpr, Sub, Var, as_expr,
)

__all__ = [
    "Add", "Apply", "BumpDeriv", "BumpBoundReport", "Const", "Div", "Mul", "Neg",
    "PeriodicFn", "Pow", "SeparableFn", "SmoothExpr", "Sub", "Var", "as_expr",
    "build_bump_monomial", "build_trig_witness", "bump_bound_check", "bump_derivs", "calibrate_bump_M",
    "diff", "diff_symbolic", "eval_derivs", "eval_jet", "evaluate", "free_vars",
    "outer_derivs", "simplify", "substitute",
]
