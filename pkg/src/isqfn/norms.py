"""Weighted Lebesgue, weak, Orlicz-Luxemburg and amalgam norms on grid fields."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .grid import Ball, DegenerateRegionWarning, Grid, ScalarField, ball_mask, center_distances, log_radii, subgrid_centers
from .weights import Weight, lebesgue


class DegenerateNormWarning(UserWarning):
    pass


# ---------------------------------------------------------------- Young functions


@dataclass(frozen=True)
class YoungFunction:
    tag: str
    p: float = 1.0

    def __post_init__(self):
        if self.tag not in ("power", "llogl", "exp_minus_one"):
            raise ValueError(f"unknown Young function {self.tag!r}")
        if self.tag == "power" and self.p < 1:
            raise ValueError("power Young functions need p >= 1")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.tag == "power":
            return t**self.p
        if self.tag == "llogl":
            return t * (1.0 + np.log(np.maximum(t, 1.0)))
        with np.errstate(over="ignore"):
            return np.expm1(t)


def power(p: float) -> YoungFunction:
    return YoungFunction("power", p)


LLOGL = YoungFunction("llogl")
EXPL = YoungFunction("exp_minus_one")


def phi_llogl(t):
    """t (1 + log+ t)."""
    return LLOGL(t)


# ---------------------------------------------------------------- Lebesgue / weak


def _wvals(f: ScalarField, w: Weight | None) -> np.ndarray:
    return np.ones(f.grid.shape) if w is None else w.values


def lp_norm(f: ScalarField, w: Weight | None = None, p: float = 2.0, region: Ball | None = None) -> float:
    if p < 1:
        raise ValueError("p must be >= 1")
    a = np.abs(f.values)
    wv = _wvals(f, w)
    if region is not None:
        m = ball_mask(f.grid, region)
        a, wv = a[m], wv[m]
    if math.isinf(p):
        return float(a.max()) if a.size else 0.0
    return float((np.sum(a**p * wv) * f.grid.cell_volume) ** (1.0 / p))


def _weak_from_samples(a: np.ndarray, wv: np.ndarray, p: float, cell: float) -> float:
    """max over sample values v of v * w({|f| >= v})^{1/p}."""
    if a.size == 0:
        return 0.0
    order = np.argsort(-a, kind="stable")
    a, mass = a[order], np.cumsum(wv[order]) * cell
    # the >=-set of a value includes every tie, so take the last index of each run
    last = np.r_[a[1:] != a[:-1], True]
    vals = a[last] * mass[last] ** (1.0 / p)
    return float(vals.max())


def weak_lp_norm(f: ScalarField, w: Weight | None = None, p: float = 1.0, region: Ball | None = None) -> float:
    if p < 1:
        raise ValueError("p must be >= 1")
    a = np.abs(f.values)
    wv = _wvals(f, w)
    if region is not None:
        m = ball_mask(f.grid, region)
        a, wv = a[m], wv[m]
    return _weak_from_samples(a.ravel(), wv.ravel(), p, f.grid.cell_volume)


# ---------------------------------------------------------------- Luxemburg


def _luxemburg_rows(mask: np.ndarray, a: np.ndarray, wv: np.ndarray, A: YoungFunction, rtol: float = 1e-13) -> np.ndarray:
    """Batched Luxemburg norms, one per row of ``mask``.

    Solves G(lam) = sum_mask A(a/lam) wv / sum_mask wv = 1 by bracketing and
    bisection; G is continuous and strictly decreasing wherever a is not 0.
    """
    mask = np.atleast_2d(mask)
    mw = mask * wv[None, :]
    mass = mw.sum(axis=1)
    top = np.where(mask, a[None, :], 0.0).max(axis=1, initial=0.0)
    live = (top > 0) & (mass > 0)
    out = np.zeros(mask.shape[0])
    if not live.any():
        return out
    mw, mass, top, inside = mw[live], mass[live], top[live], mask[live]

    def G(lam):
        with np.errstate(over="ignore", invalid="ignore"):
            vals = A(a[None, :] / lam[:, None]) * mw
        return np.sum(np.where(inside, vals, 0.0), axis=1) / mass

    hi = top.copy()
    for _ in range(400):
        bad = G(hi) > 1.0
        if not bad.any():
            break
        hi[bad] *= 2.0
    lo = hi.copy()
    for _ in range(400):
        bad = G(lo) <= 1.0
        if not bad.any():
            break
        lo[bad] /= 2.0
    else:
        warnings.warn("Luxemburg bracket never exceeded 1; returning lower bracket", DegenerateNormWarning, stacklevel=3)
        res = out.copy()
        res[live] = lo
        return res
    while np.any(hi - lo > rtol * hi):
        mid = 0.5 * (lo + hi)
        above = G(mid) > 1.0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    out[live] = hi
    return out


def _luxemburg_samples(a: np.ndarray, wv: np.ndarray, A: YoungFunction) -> float:
    return float(_luxemburg_rows(np.ones((1, a.size), bool), a, wv, A)[0])


def luxemburg_norm(f: ScalarField, A: YoungFunction, B: Ball | None = None, w: Weight | None = None) -> float:
    """inf{lam > 0 : (1/m(B)) int_B A(|f|/lam) dm <= 1}, m = Lebesgue or w dx."""
    a = np.abs(f.values)
    wv = _wvals(f, w)
    if B is not None:
        m = ball_mask(f.grid, B)
        if not m.any():
            warnings.warn(f"{B} contains no cell centre", DegenerateRegionWarning, stacklevel=2)
            return 0.0
        a, wv = a[m], wv[m]
    return _luxemburg_samples(a.ravel(), wv.ravel(), A)


def luxemburg_residual(f: ScalarField, A: YoungFunction, lam: float, B: Ball | None = None, w: Weight | None = None) -> float:
    """G(lam) - 1 for the same average luxemburg_norm solves."""
    a = np.abs(f.values)
    wv = _wvals(f, w)
    if B is not None:
        m = ball_mask(f.grid, B)
        a, wv = a[m], wv[m]
    return float(np.sum(A(a / lam) * wv) / wv.sum() - 1.0)


def llogl_infimal(f: ScalarField, B: Ball | None = None, w: Weight | None = None, n_eta: int = 4000) -> float:
    """inf_eta {eta + (eta / w(B)) int_B Phi(|f|/eta) w} by a log-spaced eta scan."""
    a = np.abs(f.values)
    wv = _wvals(f, w)
    if B is not None:
        m = ball_mask(f.grid, B)
        a, wv = a[m], wv[m]
    a, wv = a.ravel(), wv.ravel()
    top = a.max()
    if top == 0:
        return 0.0
    mass = wv.sum()
    etas = np.geomspace(top * 1e-6, top * 1e3, n_eta)
    vals = [eta + eta * np.sum(LLOGL(a / eta) * wv) / mass for eta in etas]
    return float(min(vals))


def holder_defect(f: ScalarField, g: ScalarField, B: Ball | None = None, w: Weight | None = None) -> float:
    """avg_B |f g| / (||f||_{LlogL,B} ||g||_{expL,B}); NaN with a warning when a factor vanishes."""
    wv = _wvals(f, w)
    m = np.ones(f.grid.shape, bool) if B is None else ball_mask(f.grid, B)
    num = np.sum(np.abs(f.values * g.values)[m] * wv[m]) / wv[m].sum()
    den = luxemburg_norm(f, LLOGL, B, w) * luxemburg_norm(g, EXPL, B, w)
    if den == 0:
        warnings.warn("Hölder defect with a zero factor", DegenerateNormWarning, stacklevel=2)
        return float("nan")
    return float(num / den)


# ---------------------------------------------------------------- amalgam norms


@dataclass(frozen=True)
class AmalgamParams:
    p: float
    q: float
    alpha: float
    radii: np.ndarray | None = None
    center_stride: int = 4
    n_radii: int = 16

    def __post_init__(self):
        if not (1 <= self.p <= self.alpha <= self.q):
            raise ValueError(f"need 1 <= p <= alpha <= q, got p={self.p}, alpha={self.alpha}, q={self.q}")
        if self.center_stride < 1:
            raise ValueError("center stride must be >= 1")

    @property
    def q_infinite(self) -> bool:
        return math.isinf(self.q)

    def radius_grid(self, g: Grid) -> np.ndarray:
        if self.radii is not None:
            return np.asarray(self.radii, dtype=float)
        return log_radii(g, self.n_radii)

    def centers(self, g: Grid) -> np.ndarray:
        return subgrid_centers(g, self.center_stride)


@dataclass
class AmalgamDetail:
    value: float
    radii: np.ndarray
    curve: np.ndarray  # outer L^q_mu norm per radius
    clipped: np.ndarray  # fraction of centres whose ball leaves the box, per radius
    kind: str = "strong"
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "kind": self.kind,
            "radii": self.radii.tolist(),
            "curve": self.curve.tolist(),
            "clipped": self.clipped.tolist(),
        }


KINDS = ("strong", "weak", "llogl")


def _outer(inner: np.ndarray, P: AmalgamParams, mu_vals: np.ndarray, cell: float) -> float:
    if P.q_infinite:
        return float(inner.max())
    return float(np.sum(inner**P.q * mu_vals * cell) ** (1.0 / P.q))


def amalgam_detail(
    f: ScalarField,
    P: AmalgamParams,
    w: Weight | None = None,
    mu: Weight | None = None,
    kind: str = "strong",
) -> AmalgamDetail:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    g = f.grid
    w = lebesgue(g) if w is None else w
    mu = lebesgue(g, "mu") if mu is None else mu
    centers = P.centers(g)
    dist = center_distances(g, centers)
    # mu sampled at the centre cells, weighted by the subgrid cell volume
    mu_vals = mu.values[(slice(P.center_stride // 2, None, P.center_stride),) * g.n].ravel()
    outer_cell = (P.center_stride * g.h) ** g.n
    wv = w.values.ravel()
    a = np.abs(f.values).ravel()
    cell = g.cell_volume
    radii = P.radius_grid(g)
    curve, clipped = [], []
    for r in radii:
        mask = dist < r
        wB = (mask @ wv) * cell
        clipped.append(float(np.mean(np.any(np.abs(centers) + r > g.extent, axis=1))))
        if kind == "strong":
            local = ((mask @ (a**P.p * wv)) * cell) ** (1.0 / P.p)
            expo = 1 / P.alpha - 1 / P.p - 1 / P.q
        elif kind == "weak":
            local = np.array([_weak_from_samples(a[m], wv[m], P.p, cell) for m in mask])
            expo = 1 / P.alpha - 1 / P.p - 1 / P.q
        else:
            local = _luxemburg_rows(mask, a, wv, LLOGL)
            expo = 1 / P.alpha - 1 / P.q
        with np.errstate(divide="ignore", invalid="ignore"):
            inner = np.where(wB > 0, wB**expo * local, 0.0)
        curve.append(_outer(inner, P, mu_vals, outer_cell))
    curve = np.array(curve)
    return AmalgamDetail(float(curve.max()), radii, curve, np.array(clipped), kind)


def amalgam_norm(f: ScalarField, P: AmalgamParams, w: Weight | None = None, mu: Weight | None = None, kind: str = "strong") -> float:
    """sup over radii of || w(B(y,r))^{1/alpha - 1/p - 1/q} ||f chi_B||_{X} ||_{L^q_mu(y)}.

    X is L^p_w (strong), weak L^p_w (weak), or the weighted L log L average
    with prefactor exponent 1/alpha - 1/q (llogl, p ignored).
    """
    return amalgam_detail(f, P, w, mu, kind).value
