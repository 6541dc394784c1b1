"""Command-line entry point: ``isqfn <command> ...``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import bmo, czd, harness, norms, sqfn
from .grid import Ball, ScalarField, VectorField, read_csv_field, read_fields, write_fields
from .testbank import build_bank, read_bank, write_bank
from .weights import ap_characteristic, ap_profile, parse_family, weight_from


def _float(s: str) -> float:
    return math.inf if s.lower() in ("inf", "infinity") else float(s)


def load_vector(path: str, extent: float = 1.0) -> VectorField:
    if Path(path).suffix.lower() == ".csv":
        f = read_csv_field(path, extent)
        return VectorField(f.grid, f.values[None])
    return read_fields(path)


def load_scalar(path: str, extent: float = 1.0) -> ScalarField:
    F = load_vector(path, extent)
    return F.component(0) if F.J == 1 else F.l2()


def load_weight(spec: str | None, like: ScalarField, role: str):
    """A field file on the same grid, or a harness weight spec (``1``, ``power:<a>``, ``exp:<k>``)."""
    if spec is None:
        return None
    if Path(spec).exists():
        f = load_scalar(spec, like.grid.extent)
        if f.grid != like.grid:
            raise SystemExit(f"weight {spec} is on a different grid")
        return weight_from(f, role)
    return harness.make_weight(spec, like.grid, role)


def _dump(obj) -> None:
    print(json.dumps(obj, indent=2, default=harness._jsonable))


# ---------------------------------------------------------------- commands


def cmd_weights(a) -> int:
    f = load_scalar(a.weight, a.extent)
    w = weight_from(f)
    F = parse_family(a.family, f.grid)
    prof = ap_profile(w, a.p, F)
    val = ap_characteristic(w, a.p, F)
    print(val)
    _dump({"p": a.p, "characteristic": val, "radii": F.radii, "profile": prof})
    return 0


def cmd_bank(a) -> int:
    bank = build_bank(a.gamma, size=a.size, n=a.n)
    write_bank(a.out, bank)
    _dump({"gamma": bank.gamma, "size": len(bank), "labels": [m.label for m in bank.members], "out": a.out})
    return 0


def cmd_sqfn(a) -> int:
    F = load_vector(a.input, a.extent)
    bank = read_bank(a.bank) if a.bank else build_bank(a.gamma, size=a.size, n=F.grid.n)
    g = F.grid
    cone = sqfn.ConeParams(a.tmin or 2 * g.h, a.tmax or g.extent, a.scales)
    if a.mode == "commutator":
        if not a.b:
            raise SystemExit("sqfn commutator needs --b")
        b = load_scalar(a.b, a.extent)
        out = sqfn.vec_commutator_square(b, F, bank, cone)
    else:
        out = sqfn.vec_intrinsic_square(F, bank, cone)
    write_fields(a.out, out)
    _dump({"mode": a.mode, "J": F.J, "bank": len(bank), "scales": cone.scales, "max": float(out.values.max()), "out": a.out})
    return 0


def cmd_norm(a) -> int:
    f = load_scalar(a.input, a.extent)
    w = load_weight(a.w, f, "w")
    mu = load_weight(a.mu, f, "mu")
    detail = {"kind": a.kind}
    if a.kind == "lp":
        value = norms.lp_norm(f, w, a.p)
    elif a.kind == "weak":
        value = norms.weak_lp_norm(f, w, a.p)
    elif a.kind == "luxemburg":
        A = {"llogl": norms.LLOGL, "exp": norms.EXPL}.get(a.young) or norms.power(a.p)
        value = norms.luxemburg_norm(f, A, None, w)
        detail["residual"] = norms.luxemburg_residual(f, A, value, None, w) if value > 0 else 0.0
    else:
        P = norms.AmalgamParams(a.p, a.q, a.alpha, center_stride=a.stride, n_radii=a.radii)
        kind = {"amalgam": "strong", "amalgam-weak": "weak", "amalgam-llogl": "llogl"}[a.kind]
        d = norms.amalgam_detail(f, P, w, mu, kind)
        value = d.value
        detail.update(d.to_dict())
    detail["value"] = value
    print(value)
    _dump(detail)
    return 0


def cmd_bmo(a) -> int:
    b = load_scalar(a.b, a.extent)
    if a.mode == "seminorm":
        rep = bmo.bmo_seminorm(b, parse_family(a.family, b.grid))
        B = rep.argmax
        _dump({"seminorm": rep.seminorm, "argmax": {"center": B.center, "radius": B.radius}})
        return 0
    center = tuple(a.center) if a.center else (0.0,) * b.grid.n
    B = Ball(center, a.radius)
    if a.mode == "growth":
        G = bmo.oscillation_growth(b, B, a.levels)
        _dump({"values": G.values, "slope": G.slope})
    else:
        _dump({"expnorm": bmo.exp_norm_oscillation(b, B)})
    return 0


def cmd_czd(a) -> int:
    F = load_vector(a.input, a.extent)
    d = czd.cz_decompose(F, a.sigma)
    out = {"sigma": a.sigma, "cubes": czd.cube_dict(d), "lines": d.to_lines()}
    status = 0
    if a.verify:
        rep = czd.verify_cz(d, F)
        out["report"] = {"checks": rep.checks, "details": rep.details, "passed": rep.passed}
        status = 0 if rep.passed else 1
    _dump(out)
    return status


def cmd_verify(a) -> int:
    s = harness.load_scenario(a.scenario)
    rep = harness.run(s)
    out = Path(a.out)
    jpath, cpath = harness.emit_report(rep, out / Path(a.scenario).stem)
    for k, v in rep.checks.items():
        print(f"{'PASS' if v else 'FAIL'} {k}")
    print(json.dumps({"stats": rep.stats, "json": str(jpath), "csv": str(cpath)}, indent=2))
    return 0 if rep.passed else 1


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="isqfn", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weights", help="weight diagnostics")
    p.add_argument("mode", choices=["ap"])
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--weight", required=True)
    p.add_argument("--family", default="centers:4,radii:12")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("bank", help="build a test-function bank")
    p.add_argument("mode", choices=["build"])
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--size", type=int, default=12)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--out", default="bank.bin")
    p.set_defaults(func=cmd_bank)

    p = sub.add_parser("sqfn", help="vector intrinsic square function or its commutator")
    p.add_argument("mode", nargs="?", default="plain", choices=["plain", "commutator"])
    p.add_argument("--input", required=True)
    p.add_argument("--bank")
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--size", type=int, default=12)
    p.add_argument("--tmin", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--scales", type=int, default=24)
    p.add_argument("--b")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sqfn)

    p = sub.add_parser("norm", help="Lebesgue, weak, Luxemburg and amalgam norms")
    p.add_argument("--kind", required=True, choices=["lp", "weak", "luxemburg", "amalgam", "amalgam-weak", "amalgam-llogl"])
    p.add_argument("--p", type=_float, default=2.0)
    p.add_argument("--q", type=_float, default=math.inf)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--w")
    p.add_argument("--mu")
    p.add_argument("--young", choices=["power", "llogl", "exp"], default="power")
    p.add_argument("--stride", type=int, default=4)
    p.add_argument("--radii", type=int, default=16)
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("bmo", help="BMO diagnostics")
    p.add_argument("mode", choices=["seminorm", "growth", "expnorm"])
    p.add_argument("--b", required=True)
    p.add_argument("--family", default="centers:4,radii:12")
    p.add_argument("--center", type=float, nargs="+")
    p.add_argument("--radius", type=float, default=0.05)
    p.add_argument("--levels", type=int, default=3)
    p.set_defaults(func=cmd_bmo)

    p = sub.add_parser("czd", help="Calderón-Zygmund decomposition")
    p.add_argument("--input", required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_czd)

    p = sub.add_parser("verify", help="run a scenario file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", default="reports")
    p.set_defaults(func=cmd_verify)
    for p in sub.choices.values():
        p.add_argument("--extent", type=float, default=1.0, help="half-width of the box for CSV inputs")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
