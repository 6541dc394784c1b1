"""Bounded-ratio experiments for the amalgam-space estimates.

A scenario fixes exponents, weights, a bank, a cone and an input family; each
run computes operator-side and input-side norms for every input, the ratio,
and its spread along a dilation ladder. Constants are never asserted from
theory: ceilings come from the scenario file.
"""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .grid import Grid, ScalarField, VectorField, dilate_translate, make_grid
from .norms import AmalgamParams, amalgam_norm, phi_llogl
from .sqfn import ConeParams, vec_commutator_square, vec_intrinsic_square
from .testbank import FunctionBank, build_bank
from .weights import Weight, ap_characteristic, ball_family, hl_maximal, lebesgue, power_weight

THEOREMS = ("strong", "weak", "commutator-strong", "commutator-endpoint", "wilson-weak-Mw")


@dataclass
class Scenario:
    theorem: str = "strong"
    p: float = 2.0
    q: float = 4.0
    alpha: float = 2.0
    gamma: float = 0.5
    J: int = 3
    n: int = 1
    N: int = 512
    extent: float = 4.0
    w: str = "1"
    mu: str = "1"
    b: str = "log"
    bank_size: int = 12
    tmin: float | None = None
    tmax: float | None = None
    scales: int = 24
    family: str = "gaussians"
    seeds: tuple = tuple(range(20))
    ceiling: float = math.inf
    stability: float = 4.0
    dilations: tuple = (1.0, 2 ** (1 / 3), 2 ** (2 / 3), 2.0)
    sigma_factors: tuple = (0.5, 1.0, 2.0, 4.0)
    bank_growth: bool = False
    saturation: float = 0.05
    center_stride: int = 4
    n_radii: int = 16
    input_scale: float = 1.0

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise ValueError(f"theorem must be one of {THEOREMS}")
        p, a, q = self.p, self.alpha, self.q
        if self.theorem in ("strong", "commutator-strong"):
            if not (1 < p <= a < q):
                raise ValueError("strong estimates need 1 < p <= alpha < q")
        elif self.theorem in ("weak", "commutator-endpoint"):
            if not (p == 1 and 1 <= a < q):
                raise ValueError("weak/endpoint estimates need p = 1 and 1 <= alpha < q")

    @property
    def grid(self) -> Grid:
        return make_grid(self.n, self.extent, self.N)

    def cone(self) -> ConeParams:
        g = self.grid
        return ConeParams(self.tmin or 2 * g.h, self.tmax or g.extent, self.scales)

    def params(self, p: float | None = None) -> AmalgamParams:
        return AmalgamParams(self.p if p is None else p, self.q, self.alpha, center_stride=self.center_stride, n_radii=self.n_radii)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["q"] = "inf" if math.isinf(self.q) else self.q
        d["ceiling"] = "inf" if math.isinf(self.ceiling) else self.ceiling
        return d


# ---------------------------------------------------------------- config files

_ALIASES = {"bank.size": "bank_size", "cone.tmin": "tmin", "cone.tmax": "tmax", "cone.scales": "scales",
            "sigma.factors": "sigma_factors", "bank.growth": "bank_growth", "centers.stride": "center_stride",
            "radii": "n_radii"}


def _parse_value(key: str, raw: str, kind):
    raw = raw.strip()
    if key == "seeds":
        if ":" in raw:
            lo, hi = raw.split(":")
            return tuple(range(int(lo), int(hi)))
        return tuple(int(s) for s in raw.replace(",", " ").split())
    if key in ("dilations", "sigma_factors"):
        return tuple(float(s) for s in raw.replace(",", " ").split())
    if key == "bank_growth":
        return raw.lower() in ("1", "true", "yes", "on")
    if raw.lower() in ("inf", "infinity"):
        return math.inf
    if kind in ("int", int):
        return int(raw)
    if kind in ("float", float, "float | None"):
        return float(raw)
    return raw


def load_scenario(path) -> Scenario:
    """Read ``key = value`` lines (``#`` starts a comment)."""
    types = {f.name: f.type for f in fields(Scenario)}
    kw = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, raw = line.partition("=")
        key = _ALIASES.get(key.strip(), key.strip())
        if key not in types:
            raise ValueError(f"{path}: unknown key {key!r}")
        kw[key] = _parse_value(key, raw, types[key])
    return Scenario(**kw)


# ---------------------------------------------------------------- inputs and weights


def make_weight(spec: str, g: Grid, role: str = "w") -> Weight:
    """``1`` | ``power:<a>`` | ``exp:<k>`` (exp(k|x|))."""
    spec = str(spec).strip()
    if spec in ("1", "lebesgue", "one"):
        return lebesgue(g, role)
    kind, _, arg = spec.partition(":")
    if kind == "power":
        return power_weight(float(arg), g, role)
    if kind == "exp":
        return Weight(ScalarField(g, np.exp(float(arg) * g.radius())), role)
    raise ValueError(f"unknown weight spec {spec!r}")


def make_b(spec: str, g: Grid) -> ScalarField:
    """``log`` (log|x|) | ``const:<c>`` | ``sin:<k>``."""
    kind, _, arg = str(spec).partition(":")
    if kind == "log":
        return ScalarField(g, np.log(g.radius()))
    if kind == "const":
        return ScalarField(g, np.full(g.shape, float(arg or 1.0)))
    if kind == "sin":
        return ScalarField(g, np.sin(float(arg or 1.0) * g.coords()[0]))
    raise ValueError(f"unknown b spec {spec!r}")


def gaussian_input(g: Grid, J: int, seed: int, n_bumps: int = 4) -> VectorField:
    """Seeded sums of Gaussians, centred in the inner quarter and cut off at half the box."""
    rng = np.random.default_rng(seed)
    E = g.extent
    X = np.stack(g.coords(), axis=-1)
    comps = []
    for _ in range(J):
        v = np.zeros(g.shape)
        for _ in range(n_bumps):
            c = rng.uniform(-E / 4, E / 4, g.n)
            s = rng.uniform(E / 32, E / 8)
            v += rng.normal() * np.exp(-((X - c) ** 2).sum(-1) / (2 * s * s))
        comps.append(v)
    inside = np.all(np.abs(X) <= E / 2, axis=-1)
    return VectorField(g, np.stack(comps) * inside[None])


def indicator_input(g: Grid, J: int, seed: int) -> VectorField:
    """Stacks of indicator functions of random boxes in the inner half."""
    rng = np.random.default_rng(seed)
    E = g.extent
    X = np.stack(g.coords(), axis=-1)
    comps = []
    for _ in range(J):
        v = np.zeros(g.shape)
        for _ in range(3):
            lo = rng.uniform(-E / 2, E / 4, g.n)
            hi = lo + rng.uniform(E / 16, E / 4, g.n)
            v += rng.uniform(0.5, 2.0) * np.all((X >= lo) & (X < hi), axis=-1)
        comps.append(v)
    return VectorField(g, np.stack(comps))


FAMILIES = {"gaussians": gaussian_input, "indicators": indicator_input}


def make_input(s: Scenario, seed: int) -> VectorField:
    F = FAMILIES[s.family](s.grid, s.J, seed)
    return F * s.input_scale if s.input_scale != 1.0 else F


def dilate_vector(F: VectorField, lam: float) -> VectorField:
    return VectorField.from_scalars(dilate_translate(f, lam) for f in F)


# ---------------------------------------------------------------- reports


@dataclass
class Report:
    scenario: dict
    rows: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r["ratio"] for r in self.rows if not r.get("skipped")], dtype=float)

    def summarize(self, ceiling: float, stability: float) -> None:
        live = [r for r in self.rows if not r.get("skipped")]
        R = self.ratios
        stab = np.array([r["stability"] for r in live], dtype=float)
        self.stats.update(
            n_inputs=len(self.rows),
            n_skipped=len(self.rows) - len(live),
            max_ratio=float(R.max()) if R.size else 0.0,
            median_ratio=float(np.median(R)) if R.size else 0.0,
            min_ratio=float(R.min()) if R.size else 0.0,
            max_stability=float(stab.max()) if stab.size else 1.0,
        )
        self.checks.update(
            finite=bool(np.all(np.isfinite(R)) and np.all(R >= 0)),
            ceiling=bool(np.all(R <= ceiling)),
            dilation_stability=bool(np.all(stab <= stability)),
        )

    def to_dict(self) -> dict:
        return {"scenario": self.scenario, "stats": self.stats, "checks": self.checks,
                "passed": self.passed, "runtime": self.runtime, "rows": self.rows}


CSV_FIELDS = ("input", "seed", "skipped", "numerator", "denominator", "ratio", "stability")


def emit_report(r: Report, path) -> tuple[Path, Path]:
    """Write ``<path>.json`` (everything) and ``<path>.csv`` (one row per input)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    jpath, cpath = path.with_suffix(".json"), path.with_suffix(".csv")
    jpath.write_text(json.dumps(r.to_dict(), indent=2, default=_jsonable))
    with open(cpath, "w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=CSV_FIELDS, extrasaction="ignore")
        wr.writeheader()
        for row in r.rows:
            wr.writerow({k: row.get(k, "") for k in CSV_FIELDS})
    return jpath, cpath


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, float) and math.isinf(o):
        return "inf"
    raise TypeError(f"not serialisable: {type(o)}")


def load_report(path) -> dict:
    return json.loads(Path(path).with_suffix(".json").read_text())


# ---------------------------------------------------------------- runners


def _context(s: Scenario, bank: FunctionBank | None):
    g = s.grid
    bank = bank or build_bank(s.gamma, size=s.bank_size, n=s.n)
    return g, bank, s.cone(), make_weight(s.w, g, "w"), make_weight(s.mu, g, "mu")


def _is_zero(F: VectorField) -> bool:
    return not np.any(F.components)


def strong_ratio(F: VectorField, s: Scenario, bank, cone, w, mu, b=None) -> tuple[float, float]:
    P = s.params()
    num_field = vec_intrinsic_square(F, bank, cone) if b is None else vec_commutator_square(b, F, bank, cone)
    num = amalgam_norm(num_field, P, w, mu, "strong")
    den = amalgam_norm(F.l2(), P, w, mu, "strong")
    return num, den


def run_strong(s: Scenario, bank: FunctionBank | None = None) -> Report:
    """Amalgam norm of the (commutator) square function over that of ||F||_{l^2}."""
    if s.theorem not in ("strong", "commutator-strong"):
        raise ValueError("run_strong handles the strong and commutator-strong theorems")
    t0 = time.perf_counter()
    g, bank, cone, w, mu = _context(s, bank)
    b = make_b(s.b, g) if s.theorem == "commutator-strong" else None
    rep = Report(s.to_dict())
    big = build_bank(s.gamma, size=2 * len(bank), n=s.n) if s.bank_growth else None
    growth = []
    for i, seed in enumerate(s.seeds):
        F = make_input(s, seed)
        row = {"input": i, "seed": seed}
        if _is_zero(F):
            rep.rows.append(dict(row, skipped=True))
            continue
        ladder = []
        for lam in s.dilations:
            num, den = strong_ratio(dilate_vector(F, lam), s, bank, cone, w, mu, b)
            ladder.append({"dilation": lam, "numerator": num, "denominator": den, "ratio": num / den})
        R = np.array([x["ratio"] for x in ladder])
        row.update(skipped=False, numerator=ladder[0]["numerator"], denominator=ladder[0]["denominator"],
                   ratio=ladder[0]["ratio"], stability=float(R.max() / R.min()), ladder=ladder)
        if big is not None:
            num2, _ = strong_ratio(F, s, big, cone, w, mu, b)
            row["ratio_big_bank"] = num2 / row["denominator"]
            growth.append(num2 / row["numerator"] - 1.0)
        rep.rows.append(row)
    rep.summarize(s.ceiling, s.stability)
    if growth:
        rep.stats["max_bank_growth"] = float(max(growth))
        rep.checks["bank_saturation"] = bool(max(growth) < s.saturation)
    rep.runtime = time.perf_counter() - t0
    return rep


def superlevel_mass(T: ScalarField, sigma: float, w: Weight) -> float:
    """w({T > sigma})."""
    return float(np.sum(w.values[T.values > sigma]) * T.grid.cell_volume)


def run_weak(s: Scenario, bank: FunctionBank | None = None) -> Report:
    """Weak amalgam norm of S(F) over the strong p = 1 amalgam norm of ||F||.

    In ``wilson-weak-Mw`` mode the ratio is sigma w({S > sigma}) over
    int ||F|| M(w), maximised over the sigma grid.
    """
    if s.theorem not in ("weak", "wilson-weak-Mw"):
        raise ValueError("run_weak handles the weak and wilson-weak-Mw theorems")
    t0 = time.perf_counter()
    g, bank, cone, w, mu = _context(s, bank)
    rep = Report(s.to_dict())
    Mw = hl_maximal(w.density) if s.theorem == "wilson-weak-Mw" else None
    if s.theorem == "weak":
        rep.stats["A1_constant"] = ap_characteristic(w, 1, ball_family(g))
    P1 = s.params(p=1.0) if s.theorem == "weak" else None
    for i, seed in enumerate(s.seeds):
        F = make_input(s, seed)
        row = {"input": i, "seed": seed}
        if _is_zero(F):
            rep.rows.append(dict(row, skipped=True))
            continue
        ladder = []
        for lam in s.dilations:
            Fl = dilate_vector(F, lam)
            S = vec_intrinsic_square(Fl, bank, cone)
            if Mw is None:
                num = amalgam_norm(S, P1, w, mu, "weak")
                den = amalgam_norm(Fl.l2(), P1, w, mu, "strong")
                ladder.append({"dilation": lam, "numerator": num, "denominator": den, "ratio": num / den})
            else:
                den = float(np.sum(Fl.l2().values * Mw.values) * g.cell_volume)
                sigma0 = float(np.median(S.values))
                per = []
                for c in s.sigma_factors:
                    sig = c * sigma0
                    per.append({"sigma": sig, "lhs": sig * superlevel_mass(S, sig, w), "rhs": den})
                best = max(per, key=lambda x: x["lhs"])
                ladder.append({"dilation": lam, "numerator": best["lhs"], "denominator": den,
                               "ratio": best["lhs"] / den, "sigma": per})
        R = np.array([x["ratio"] for x in ladder])
        row.update(skipped=False, numerator=ladder[0]["numerator"], denominator=ladder[0]["denominator"],
                   ratio=ladder[0]["ratio"], stability=float(R.max() / max(R.min(), 1e-300)), ladder=ladder)
        rep.rows.append(row)
    rep.summarize(s.ceiling, s.stability)
    rep.runtime = time.perf_counter() - t0
    return rep


def endpoint_sides(T: ScalarField, F: VectorField, sigma: float, s: Scenario, w: Weight, mu: Weight) -> dict:
    """Both sides of the L log L endpoint estimate at height sigma, amalgam and plain forms."""
    P1 = s.params(p=1.0)
    over = ScalarField(T.grid, (T.values > sigma).astype(float))
    lhs = amalgam_norm(over, P1, w, mu, "strong")
    phi = ScalarField(F.grid, phi_llogl(F.l2().values / sigma))
    rhs = amalgam_norm(phi, P1, w, mu, "llogl")
    lhs_plain = superlevel_mass(T, sigma, w)
    rhs_plain = float(np.sum(phi.values * w.values) * F.grid.cell_volume)
    return {"sigma": sigma, "lhs": lhs, "rhs": rhs, "ratio": lhs / rhs if rhs > 0 else 0.0,
            "lhs_plain": lhs_plain, "rhs_plain": rhs_plain,
            "ratio_plain": lhs_plain / rhs_plain if rhs_plain > 0 else 0.0}


def run_endpoint(s: Scenario, bank: FunctionBank | None = None) -> Report:
    """Weak L log L estimate for the vector commutator on the sigma grid factors * median(T)."""
    if s.theorem != "commutator-endpoint":
        raise ValueError("run_endpoint handles the commutator-endpoint theorem")
    t0 = time.perf_counter()
    g, bank, cone, w, mu = _context(s, bank)
    b = make_b(s.b, g)
    rep = Report(s.to_dict())
    rep.stats["A1_constant"] = ap_characteristic(w, 1, ball_family(g))
    plain = []
    for i, seed in enumerate(s.seeds):
        F = make_input(s, seed)
        row = {"input": i, "seed": seed}
        if _is_zero(F):
            rep.rows.append(dict(row, skipped=True))
            continue
        ladder = []
        for lam in s.dilations:
            Fl = dilate_vector(F, lam)
            T = vec_commutator_square(b, Fl, bank, cone)
            sigma0 = float(np.median(T.values))
            if sigma0 <= 0:
                per = [{"sigma": 0.0, "lhs": 0.0, "rhs": 1.0, "ratio": 0.0, "lhs_plain": 0.0, "rhs_plain": 1.0, "ratio_plain": 0.0}]
            else:
                per = [endpoint_sides(T, Fl, c * sigma0, s, w, mu) for c in s.sigma_factors]
            best = max(per, key=lambda x: x["ratio"])
            plain.append(max(x["ratio_plain"] for x in per))
            ladder.append({"dilation": lam, "numerator": best["lhs"], "denominator": best["rhs"],
                           "ratio": best["ratio"], "sigma": per})
        R = np.array([x["ratio"] for x in ladder])
        stab = float(R.max() / R.min()) if R.min() > 0 else (1.0 if R.max() == 0 else math.inf)
        row.update(skipped=False, numerator=ladder[0]["numerator"], denominator=ladder[0]["denominator"],
                   ratio=ladder[0]["ratio"], stability=stab, ladder=ladder)
        rep.rows.append(row)
    rep.summarize(s.ceiling, s.stability)
    rep.stats["max_ratio_plain"] = float(max(plain, default=0.0))
    rep.runtime = time.perf_counter() - t0
    return rep


def run(s: Scenario, bank: FunctionBank | None = None) -> Report:
    if s.theorem in ("strong", "commutator-strong"):
        return run_strong(s, bank)
    if s.theorem in ("weak", "wilson-weak-Mw"):
        return run_weak(s, bank)
    return run_endpoint(s, bank)
