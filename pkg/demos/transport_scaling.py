"""Shrinking bump witnesses for the transport map: small input, growing derivative gap.

Run with ``python3 demos/transport_scaling.py``; writes transport_scaling.svg
next to the current directory.
"""
from ffwitness._svg import line_chart
from ffwitness.exprparse import parse_expr
from ffwitness.transport import CylinderFn, d_e, op_I, transport_growth_demo

V = ["t", "eta", "xi"]


def identities():
    v = CylinderFn(parse_expr("t^2*cos(2*pi*eta)+sin(2*pi*(eta-t))", ["t", "eta"]))
    print("d_e(I(v)) reduces back to v:", d_e(op_I(v)).expr == v.expr)


def table(text, deltas):
    tab = transport_growth_demo(parse_expr(text, V), CylinderFn.constant(0.0), 0.5, 2, deltas)
    print(f"\nphi3 = {text}" + ("  (no curvature in xi, no growth expected)" if tab.inconclusive else ""))
    print(f"  {'delta':>8} {'||w||_2':>12} {'exact partial':>14} {'gap ||.||_4':>12}")
    for r in tab.rows:
        print(f"  {r.delta:8.4f} {r.g_seminorm_i0:12.5g} {r.exact_partial_lower:14.5g} "
              f"{r.derivative_distance:12.5g}")
    return tab


if __name__ == "__main__":
    identities()
    deltas = [1 / 6, 0.1, 0.05, 0.02, 0.01]
    tab = table("xi^2", deltas)
    table("3*xi+1", deltas[:2])
    ds = [r.delta for r in tab.rows]
    svg = line_chart(
        {"||w||_2": (ds, [r.g_seminorm_i0 for r in tab.rows]),
         "derivative gap": (ds, [r.derivative_distance for r in tab.rows])},
        title="bump witness scaling", xlabel="delta", ylabel="size", logx=True, logy=True)
    with open("transport_scaling.svg", "w") as fh:
        fh.write(svg)
    print("\nwrote transport_scaling.svg")
