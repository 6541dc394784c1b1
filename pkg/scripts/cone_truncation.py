"""Sensitivity of the square function to the truncated scale range.

Prints the L^2 norm of the vector square function while t_max grows toward
the box size and t_min shrinks toward 2h, plus the effect of the scale count.
"""
from __future__ import annotations

import argparse

import numpy as np

from isqfn.grid import make_grid
from isqfn.harness import gaussian_input
from isqfn.norms import lp_norm
from isqfn.sqfn import ConeParams, vec_intrinsic_square
from isqfn.testbank import build_bank


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=512)
    ap.add_argument("--extent", type=float, default=4.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    g = make_grid(1, args.extent, args.N)
    F = gaussian_input(g, 3, args.seed)
    bank = build_bank(0.5, size=12)
    base = ConeParams.default(g, 24)

    print("t_max sweep (t_min = 2h, 24 scales)")
    for frac in (0.125, 0.25, 0.5, 1.0):
        cone = ConeParams(base.t_min, frac * g.extent, 24)
        print(f"  t_max = {cone.t_max:6.3f}  ||S||_2 = {lp_norm(vec_intrinsic_square(F, bank, cone)):.6f}")
    print("t_min sweep (t_max = extent, 24 scales)")
    for k in (16, 8, 4, 2):
        cone = ConeParams(k * g.h, g.extent, 24)
        print(f"  t_min = {k:2d}h     ||S||_2 = {lp_norm(vec_intrinsic_square(F, bank, cone)):.6f}")
    print("scale count (full range)")
    for m in (6, 12, 24, 48):
        cone = ConeParams.default(g, m)
        print(f"  scales = {m:2d}   ||S||_2 = {lp_norm(vec_intrinsic_square(F, bank, cone)):.6f}")
    print(f"  input ||F||_2 = {lp_norm(F.l2()):.6f}")


if __name__ == "__main__":
    main()
