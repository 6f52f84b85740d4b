"""Step through the witness construction by hand for a few outer functions.

Run with ``python3 demos/falsify_walkthrough.py``.
"""
import math

from ffwitness.exprparse import parse_expr
from ffwitness.falsify import (
    BoundedClaim, choose_n, falsify_bounded_claim, m2_bound, scan_nonaffinity, witness_composition,
)
from ffwitness.seminorms import seminorm_sup


def walk(text, M=1000.0, delta=0.5, i0=2):
    phi = parse_expr(text, ["t"])
    scan = scan_nonaffinity(phi)
    print(f"phi = {text}")
    print(f"  largest |phi''| on [-1, 1]: {scan.A:.6g} at s0 = {scan.s0:.6g}")
    if scan.affine:
        print("  phi'' vanishes on the grid; the composition operator is affine here\n")
        return
    cert = m2_bound(phi, scan.s0, i0)
    print(f"  remainder constant M2 = B*C = {cert.B} * {cert.C:.6g} = {cert.M2:.6g}"
          f" (checked on {cert.validated} random u, worst margin {cert.worst_margin:.3g})")
    n = choose_n(scan.A, cert, i0, M + 1)
    print(f"  smallest frequency beating M = {M:g}: n = {n}")

    claim = BoundedClaim(phi, scan.s0, i0, M, delta)
    rep = falsify_bounded_claim(claim)
    print(f"  ||u_n||_{i0} = {rep.witness_norm:.6g} < delta = {delta}")
    print(f"  exact lower bound {rep.exact_lower:.6g}, grid seminorm {rep.numeric_seminorm.value:.6g}")
    print(f"  verdict: {rep.verdict}\n")


def growth():
    claim = BoundedClaim(parse_expr("t^2", ["t"]), 0.0, 2, 1.0, 1.0)
    print("phi = t^2: the index-3 seminorm of phi' o u_n against 2 sqrt(2 pi n)")
    for n in (10, 100, 1000, 10000):
        u, composed = witness_composition(claim, n)
        value = seminorm_sup(composed, 3).value
        print(f"  n = {n:>5}  ||u_n||_2 = {seminorm_sup(u, 2).value:.3e}"
              f"  ||phi' o u_n||_3 = {value:10.4f}  closed form {2 * math.sqrt(2 * math.pi * n):10.4f}")


if __name__ == "__main__":
    for text in ("t^2", "sin(t)", "exp(t)", "3*t+1"):
        walk(text)
    growth()
