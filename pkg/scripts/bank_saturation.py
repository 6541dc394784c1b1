"""How the strong-scenario ratio grows with the bank size.

The bank maximum is a lower bound for the sup over the full test class; once
doubling the bank changes the ratio by a few percent the bound has saturated.
"""
from __future__ import annotations

import argparse
from dataclasses import replace
from pathlib import Path

import numpy as np

from isqfn.harness import load_scenario, make_input, make_weight, strong_ratio
from isqfn.testbank import build_bank

HERE = Path(__file__).resolve().parent


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", type=Path, default=HERE / "scenarios" / "strong.cfg")
    ap.add_argument("--sizes", type=int, nargs="+", default=[3, 6, 12, 24, 48])
    ap.add_argument("--inputs", type=int, default=5)
    args = ap.parse_args(argv)
    s = load_scenario(args.scenario)
    s = replace(s, seeds=s.seeds[: args.inputs])
    g, cone = s.grid, s.cone()
    w, mu = make_weight(s.w, g, "w"), make_weight(s.mu, g, "mu")
    full = build_bank(s.gamma, size=max(args.sizes), n=s.n)
    prev = None
    print(f"{'bank':>5} {'median ratio':>13} {'max ratio':>10} {'max change':>11}")
    for k in sorted(args.sizes):
        ratios = []
        for seed in s.seeds:
            num, den = strong_ratio(make_input(s, seed), s, full[:k], cone, w, mu)
            ratios.append(num / den)
        ratios = np.array(ratios)
        change = "" if prev is None else f"{np.max(ratios / prev - 1):11.3%}"
        print(f"{k:5d} {np.median(ratios):13.5f} {ratios.max():10.5f} {change}")
        prev = ratios


if __name__ == "__main__":
    main()
