"""Run scenario files and write JSON/CSV reports.

    python scripts/run_scenarios.py                     # every file in scripts/scenarios
    python scripts/run_scenarios.py scripts/scenarios/strong.cfg --out reports
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from isqfn.harness import emit_report, load_scenario, run

HERE = Path(__file__).resolve().parent


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("scenarios", nargs="*", type=Path)
    ap.add_argument("--out", type=Path, default=Path("reports"))
    args = ap.parse_args(argv)
    paths = args.scenarios or sorted((HERE / "scenarios").glob("*.cfg"))
    status = 0
    for path in paths:
        rep = run(load_scenario(path))
        emit_report(rep, args.out / path.stem)
        st = rep.stats
        print(
            f"{'PASS' if rep.passed else 'FAIL'} {path.stem:18s} inputs={st['n_inputs']:3d} "
            f"ratio max={st['max_ratio']:.4f} median={st['median_ratio']:.4f} "
            f"stability={st['max_stability']:.3f} ({rep.runtime:.1f}s)"
        )
        for k, ok in rep.checks.items():
            if not ok:
                print(f"    failed: {k}")
        status |= not rep.passed
    return status


if __name__ == "__main__":
    sys.exit(main())
