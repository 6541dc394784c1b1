"""Weights, ball measures and Muckenhoupt-type diagnostics.

Ball averages of a weight use the discrete measure of the cells caught by the
ball (the weight lives on the box only). The maximal operator instead divides
by the full lattice disk, cells outside the box included, since its input is
zero-extended.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.signal import fftconvolve

from .grid import (
    Ball,
    DegenerateRegionWarning,
    Grid,
    ScalarField,
    ball_mask,
    center_distances,
    log_radii,
    subgrid_centers,
)


@dataclass(frozen=True, eq=False)
class Weight:
    density: ScalarField
    role: str = "w"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.role not in ("w", "mu"):
            raise ValueError(f"role must be 'w' or 'mu', got {self.role!r}")
        if not np.all(self.density.values > 0):
            raise ValueError("a weight must be strictly positive at every sample")

    @property
    def grid(self) -> Grid:
        return self.density.grid

    @property
    def values(self) -> np.ndarray:
        return self.density.values

    def scaled(self, c: float) -> Weight:
        return Weight(self.density * c, self.role)

    def measures(self, centers: np.ndarray, radius: float, dist: np.ndarray | None = None) -> np.ndarray:
        """w(B(y, radius)) for every row y of ``centers``."""
        if dist is None:
            dist = center_distances(self.grid, centers)
        return ((dist < radius) @ self.values.ravel()) * self.grid.cell_volume


def lebesgue(g: Grid, role: str = "w") -> Weight:
    return Weight(ScalarField(g, np.ones(g.shape)), role)


def power_weight(a: float, g: Grid, role: str = "w") -> Weight:
    """|x|^a sampled at cell centres (never the origin)."""
    if a <= -g.n:
        raise ValueError(f"|x|^{a} is not locally integrable in dimension {g.n}")
    return Weight(ScalarField(g, g.radius() ** a), role)


def weight_from(f: ScalarField, role: str = "w") -> Weight:
    return Weight(f, role)


def ball_measure(w: Weight, B: Ball) -> float:
    key = (B.center, B.radius)
    hit = w._cache.get(key)
    if hit is not None:
        return hit
    mask = ball_mask(w.grid, B)
    if not mask.any():
        warnings.warn(f"{B} contains no cell centre", DegenerateRegionWarning, stacklevel=2)
        return 0.0
    val = float(w.values[mask].sum() * w.grid.cell_volume)
    w._cache[key] = val
    return val


@dataclass(frozen=True)
class BallFamily:
    """Balls with centres ``centers`` (k, n) crossed with ``radii``."""

    centers: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        r = np.atleast_1d(np.asarray(self.radii, dtype=float))
        if c.size == 0 or r.size == 0:
            raise ValueError("ball family is empty")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)

    @property
    def balls(self) -> list[Ball]:
        return [Ball(tuple(c), float(r)) for r in self.radii for c in self.centers]

    def __len__(self):
        return len(self.centers) * len(self.radii)


def ball_family(g: Grid, stride: int = 4, n_radii: int = 12, rmin=None, rmax=None) -> BallFamily:
    return BallFamily(subgrid_centers(g, stride), log_radii(g, n_radii, rmin, rmax))


def parse_family(spec: str, g: Grid) -> BallFamily:
    """``centers:<stride>,radii:<k>``."""
    opts = dict(item.split(":") for item in spec.split(","))
    return ball_family(g, stride=int(opts.get("centers", 4)), n_radii=int(opts.get("radii", 12)))


def _family_stats(w: Weight, F: BallFamily, reducer):
    """Apply ``reducer(mask, values)`` radius by radius; returns (n_radii,) maxima."""
    dist = center_distances(w.grid, F.centers)
    vals = w.values.ravel()
    out = []
    for r in F.radii:
        mask = dist < r
        keep = mask.any(axis=1)
        out.append(reducer(mask[keep], vals) if keep.any() else np.nan)
    return np.array(out)


def ap_profile(w: Weight, p: float, F: BallFamily) -> np.ndarray:
    """Per-radius maximum of the A_p product; used to spot scale-dependent blow-up."""
    if p < 1:
        raise ValueError("p must be >= 1")

    def reducer(mask, vals):
        count = mask.sum(axis=1)
        avg_w = (mask @ vals) / count
        if p == 1:
            low = np.where(mask, vals[None, :], np.inf).min(axis=1)
            return float(np.max(avg_w / low))
        dual = vals ** (-1.0 / (p - 1.0))
        avg_dual = (mask @ dual) / count
        return float(np.max(avg_w * avg_dual ** (p - 1.0)))

    return _family_stats(w, F, reducer)


def ap_characteristic(w: Weight, p: float, F: BallFamily) -> float:
    """[w]_{A_p} over the family: max of avg(w) * avg(w^{-1/(p-1)})^{p-1}.

    For p = 1 the essential infimum is the smallest sample in the ball.
    """
    return float(np.nanmax(ap_profile(w, p, F)))


def doubling_constant(w: Weight, F: BallFamily) -> float:
    best = -np.inf
    for B in F.balls:
        B2 = B.scaled(2.0)
        if not B2.contains_box(w.grid):
            continue
        wb = ball_measure(w, B)
        if wb > 0:
            best = max(best, ball_measure(w, B2) / wb)
    if best == -np.inf:
        raise ValueError("every doubled ball leaves the box")
    return best


def dilation_growth_check(w: Weight, B: Ball, L: int) -> np.ndarray:
    """w(2^l B) / (2^{ln} w(B)) for l = 1..L."""
    if L > 0 and not B.scaled(2.0**L).contains_box(w.grid):
        raise ValueError(f"2^{L} B leaves the box")
    base = ball_measure(w, B)
    n = w.grid.n
    return np.array([ball_measure(w, B.scaled(2.0**l)) / (2.0 ** (l * n) * base) for l in range(1, L + 1)])


class DeltaFit(NamedTuple):
    delta: float
    residual: float


def comparison_delta(w: Weight, B: Ball, subsets) -> DeltaFit:
    """Least-squares slope of log(w(E)/w(B)) against log(|E|/|B|)."""
    subsets = list(subsets)
    if len(subsets) < 2:
        raise ValueError("need at least two subsets")
    g = w.grid
    big = ball_mask(g, B)
    wB = w.values[big].sum()
    xs, ys = [], []
    for E in subsets:
        m = ball_mask(g, E) if isinstance(E, Ball) else np.asarray(E, dtype=bool).reshape(g.shape)
        if np.any(m & ~big):
            raise ValueError("subset is not contained in the ball")
        xs.append(np.log(m.sum() / big.sum()))
        ys.append(np.log(w.values[m].sum() / wB))
    A = np.vstack([xs, np.ones(len(xs))]).T
    coef, res, *_ = np.linalg.lstsq(A, np.array(ys), rcond=None)
    resid = float(np.sqrt(res[0] / len(xs))) if res.size else 0.0
    return DeltaFit(float(coef[0]), resid)


def disk_kernel(g: Grid, r: float) -> np.ndarray:
    """Indicator of the offsets k*h with |k*h| < r, as an odd-sized array."""
    K = int(np.floor(r / g.h)) + 1
    off = np.arange(-K, K + 1) * g.h
    if g.n == 1:
        return (np.abs(off) < r).astype(float)
    X, Y = np.meshgrid(off, off, indexing="ij")
    return (np.sqrt(X**2 + Y**2) < r).astype(float)


def hl_maximal(f: ScalarField, radii=None) -> ScalarField:
    """Centred maximal function over a radius grid, zero extension outside the box."""
    g = f.grid
    if radii is None:
        radii = np.geomspace(g.h / 2, 2 * g.extent * np.sqrt(g.n), 64)
    a = np.abs(f.values)
    out = np.zeros(g.shape)
    for r in radii:
        K = disk_kernel(g, r)
        s = fftconvolve(a, K, mode="same") / K.sum()
        np.maximum(out, np.clip(s, 0.0, None), out=out)
    return ScalarField(g, out)
