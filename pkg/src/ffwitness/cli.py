"""Command-line driver: ``ffwitness <subcommand> ...``.

Every subcommand prints a JSON report (or writes it to ``--json PATH``).
Exit status: 0 for a definite outcome, 2 for an inconclusive one, 1 on
errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from ._svg import line_chart
from .errors import FFError, ParseError, UsageError
from .exprparse import format_expr, parse_expr
from .falsify import INCONCLUSIVE, BoundedClaim, falsify_bounded_claim
from .gateaux import DEFAULT_STEPS, quotient_slope
from .seminorms import GridConfig, seminorm_sup
from .smoothfn import PeriodicFn, build_bump_monomial, bump_bound_check, calibrate_bump_M
from .transport import CylinderFn, transport_growth_demo

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2
SLOPE_TOL = 0.1


@dataclass
class RunConfig:
    subcommand: str
    texts: dict = field(default_factory=dict)
    numbers: dict = field(default_factory=dict)
    seed: int = 0
    grid: GridConfig = field(default_factory=GridConfig)
    json_path: str | None = None
    csv_path: str | None = None
    svg_path: str | None = None


def _parse(option: str, text: str, variables) -> object:
    try:
        return parse_expr(text, variables)
    except ParseError as exc:
        raise UsageError(f"{option}: {exc}") from None


def _periodic(option: str, text: str) -> PeriodicFn:
    f = PeriodicFn(_parse(option, text, ["s"]), "s")
    try:
        return f.check_periodic()
    except UsageError as exc:
        raise UsageError(f"{option}: {exc}") from None


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def dump_json(report: dict) -> str:
    return json.dumps(_clean(report), indent=2, allow_nan=False) + "\n"


# -- pipelines ----------------------------------------------------------------

def _run_falsify(cfg: RunConfig):
    n = cfg.numbers
    claim = BoundedClaim(_parse("--phi", cfg.texts["phi"], ["t"]), n["s0"], n["i0"], n["M"], n["delta"])
    report = falsify_bounded_claim(claim, cfg.grid, cfg.seed)
    code = EXIT_INCONCLUSIVE if report.verdict == INCONCLUSIVE else EXIT_OK
    return report.to_dict(cfg.seed), code, None, None


def _run_gateaux(cfg: RunConfig):
    phi = _parse("--phi", cfg.texts["phi"], ["t"])
    x = _periodic("--x", cfg.texts["x"])
    u = _periodic("--u", cfg.texts["u"])
    i = cfg.numbers["index"]
    steps = cfg.numbers["steps"]
    slope, residuals = quotient_slope(phi, x, u, i, steps, cfg.grid)
    values = [q.residual.value for q in residuals]
    scale = seminorm_sup(x, i, cfg.grid).value + seminorm_sup(u, i, cfg.grid).value
    if max(values) <= 1e-9 * max(1.0, scale):
        verdict = "exact"  # affine phi: the quotient is the derivative
    elif math.isfinite(slope) and abs(slope - 1.0) <= SLOPE_TOL:
        verdict = "first_order"
    else:
        verdict = INCONCLUSIVE
    report = {
        "phi": format_expr(phi), "x": format_expr(x.expr), "u": format_expr(u.expr), "index": i,
        "steps": list(steps), "residuals": values, "slope": slope, "verdict": verdict,
        "grid": {"resolution": cfg.grid.resolution, "refinement": cfg.grid.refinement},
        "seed": cfg.seed, "version": __version__,
    }
    csv_text = "t,residual\n" + "".join(f"{t!r},{r!r}\n" for t, r in zip(steps, values))
    svg = line_chart({"residual": (list(steps), values)}, "difference quotient residual",
                     "t", f"||.||_{i}", logx=True, logy=True)
    return report, EXIT_INCONCLUSIVE if verdict == INCONCLUSIVE else EXIT_OK, csv_text, svg


def _run_bump(cfg: RunConfig):
    alpha = cfg.numbers["alpha"]
    deltas = cfg.numbers["deltas"]
    M = calibrate_bump_M(alpha)
    f1 = build_bump_monomial(len(alpha), alpha, 1.0)
    at_origin = f1.partial(alpha, (0.0,) * len(alpha))
    expected = float(math.prod(math.factorial(a) for a in alpha))
    origin_ok = abs(at_origin - expected) <= 1e-10 * expected
    rows = []
    for d in deltas:
        r = bump_bound_check(build_bump_monomial(len(alpha), alpha, d), alpha, d, M)
        rows.append({"delta": d, "passed": r.passed, "max_ratio": r.max_ratio,
                     "worst_kappa": list(r.worst_kappa), "violations": r.violations})
    passed = origin_ok and all(r["passed"] for r in rows)
    report = {
        "alpha": list(alpha), "M": M, "derivative_at_origin": at_origin,
        "alpha_factorial": expected, "rows": rows,
        "verdict": "verified" if passed else "failed", "version": __version__,
    }
    csv_text = "delta,max_ratio,violations\n" + "".join(
        f"{r['delta']!r},{r['max_ratio']!r},{r['violations']}\n" for r in rows)
    return report, EXIT_OK if passed else EXIT_INCONCLUSIVE, csv_text, None


def _run_transport(cfg: RunConfig):
    phi3 = _parse("--phi3", cfg.texts["phi3"], ["t", "eta", "xi"])
    y = CylinderFn(_parse("--y", cfg.texts["y"], ["t", "eta"])).check_periodic()
    n = cfg.numbers
    table = transport_growth_demo(phi3, y, n["t0"], n["i0"], n["deltas"])
    report = table.to_dict()
    report.update({"phi3": format_expr(phi3), "y": format_expr(y.expr), "version": __version__})
    ds = [r.delta for r in table.rows]
    svg = line_chart({"G-seminorm at i0": (ds, [r.g_seminorm_i0 for r in table.rows]),
                      "derivative distance": (ds, [r.derivative_distance for r in table.rows])},
                     "witness size against derivative distance", "delta", "value",
                     logx=True, logy=True)
    return report, EXIT_INCONCLUSIVE if table.inconclusive else EXIT_OK, table.to_csv(), svg


def _run_seminorm(cfg: RunConfig):
    f = _periodic("--f", cfg.texts["f"])
    value = seminorm_sup(f, cfg.numbers["index"], cfg.grid)
    report = {
        "f": format_expr(f.expr), "index": value.index, "value": value.value,
        "per_order": list(value.per_order),
        "grid": {"resolution": value.resolution, "refinement": value.refinement},
        "version": __version__,
    }
    return report, EXIT_OK, None, None


PIPELINES = {
    "falsify": _run_falsify,
    "gateaux-check": _run_gateaux,
    "bump-check": _run_bump,
    "transport-demo": _run_transport,
    "seminorm": _run_seminorm,
}


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute one pipeline and write its outputs; returns the exit code."""
    stdout = stdout or sys.stdout
    report, code, csv_text, svg = PIPELINES[cfg.subcommand](cfg)
    text = dump_json(report)
    if cfg.json_path:
        Path(cfg.json_path).write_text(text)
    else:
        stdout.write(text)
    if cfg.csv_path:
        if csv_text is None:
            raise UsageError(f"{cfg.subcommand} has no CSV output")
        Path(cfg.csv_path).write_text(csv_text)
    if cfg.svg_path:
        if svg is None:
            raise UsageError(f"{cfg.subcommand} has no plot")
        Path(cfg.svg_path).write_text(svg)
    return code


# -- argument parsing ---------------------------------------------------------

def _float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    # exit status 2 means "inconclusive" here, so bad arguments exit with 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ffwitness", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, csv=False, svg=False, grid=True):
        sp.add_argument("--json", dest="json_path", help="write the JSON report here instead of stdout")
        if csv:
            sp.add_argument("--csv", dest="csv_path", help="also write a CSV table")
        if svg:
            sp.add_argument("--svg", dest="svg_path", help="also write an SVG line chart")
        if grid:
            sp.add_argument("--resolution", type=int, default=1024, help="grid points per period cell")
            sp.add_argument("--refinement", type=int, default=24, help="golden-section iterations")
        sp.add_argument("--seed", type=int, default=0)

    f = sub.add_parser("falsify", help="build a witness against a bounded-derivative claim")
    f.add_argument("--phi", required=True, help="outer function of t, e.g. 't^2'")
    f.add_argument("--s0", type=float, required=True)
    f.add_argument("--i0", type=int, required=True, help="input seminorm index (even, >= 2)")
    f.add_argument("--bound-M", dest="M", type=float, required=True, help="claimed bound")
    f.add_argument("--delta", type=float, required=True, help="admissibility radius")
    common(f)

    g = sub.add_parser("gateaux-check", help="difference-quotient convergence of phi o x")
    g.add_argument("--phi", required=True)
    g.add_argument("--x", required=True, help="1-periodic function of s")
    g.add_argument("--u", required=True, help="1-periodic direction, function of s")
    g.add_argument("--index", type=int, required=True)
    g.add_argument("--steps", type=_float_list, default=DEFAULT_STEPS)
    common(g, csv=True, svg=True)

    b = sub.add_parser("bump-check", help="scaling bound for localized monomials")
    b.add_argument("--alpha", type=_int_list, required=True, help="multi-index, e.g. '1,2'")
    b.add_argument("--deltas", type=_float_list, default=(0.5, 0.1, 0.01))
    common(b, csv=True, grid=False)

    t = sub.add_parser("transport-demo", help="witness size against derivative growth")
    t.add_argument("--phi3", required=True, help="function of t, eta, xi")
    t.add_argument("--y", default="0", help="base point, function of t, eta")
    t.add_argument("--t0", type=float, default=0.5)
    t.add_argument("--i0", type=int, default=2)
    t.add_argument("--deltas", type=_float_list, default=(0.1, 0.01))
    common(t, csv=True, svg=True, grid=False)

    s = sub.add_parser("seminorm", help="evaluate ||f||_i")
    s.add_argument("--f", required=True, help="1-periodic function of s")
    s.add_argument("--index", type=int, required=True)
    common(s)
    return p


_TEXTS = ("phi", "x", "u", "phi3", "y", "f")
_NUMBERS = ("s0", "i0", "M", "delta", "index", "steps", "alpha", "deltas", "t0")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    if getattr(ns, "index", 0) is not None and getattr(ns, "index", 0) < 0:
        raise UsageError("--index must be nonnegative")
    for name in ("steps", "deltas", "alpha"):
        if hasattr(ns, name) and not getattr(ns, name):
            raise UsageError(f"--{name} must not be empty")
    if hasattr(ns, "steps") and any(h == 0.0 for h in ns.steps):
        raise UsageError("--steps must be nonzero")
    if hasattr(ns, "deltas") and any(d <= 0.0 for d in ns.deltas):
        raise UsageError("--deltas must be positive")
    grid = GridConfig(ns.resolution, ns.refinement) if hasattr(ns, "resolution") else GridConfig()
    if hasattr(ns, "refinement") and ns.refinement < 0:
        raise UsageError("--refinement must be nonnegative")
    return RunConfig(
        subcommand=ns.subcommand,
        texts={k: getattr(ns, k) for k in _TEXTS if hasattr(ns, k)},
        numbers={k: getattr(ns, k) for k in _NUMBERS if hasattr(ns, k)},
        seed=ns.seed, grid=grid, json_path=ns.json_path,
        csv_path=getattr(ns, "csv_path", None), svg_path=getattr(ns, "svg_path", None),
    )


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return run(config_from_args(ns))
    except FFError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
