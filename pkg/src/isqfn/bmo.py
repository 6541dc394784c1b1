"""BMO seminorm estimates, oscillation growth, John-Nirenberg type bounds, and
the contour-integral identity behind the commutator estimates."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .grid import Ball, DegenerateRegionWarning, ScalarField, ball_mask, center_distances
from .norms import EXPL, luxemburg_norm
from .weights import BallFamily, Weight


def ball_average(b: ScalarField, B: Ball) -> float:
    """Mean of b over the cells whose centre is in B."""
    m = ball_mask(b.grid, B)
    if not m.any():
        warnings.warn(f"{B} contains no cell centre", DegenerateRegionWarning, stacklevel=2)
        return 0.0
    return float(b.values[m].mean())


@dataclass
class BMOReport:
    seminorm: float
    family: BallFamily
    oscillations: np.ndarray  # (n_radii, n_centers), NaN where the ball is empty

    @property
    def argmax(self) -> Ball:
        i, k = np.unravel_index(np.nanargmax(self.oscillations), self.oscillations.shape)
        return Ball(tuple(self.family.centers[k]), float(self.family.radii[i]))


def bmo_seminorm(b: ScalarField, F: BallFamily) -> BMOReport:
    """max over the family of the mean of |b - b_B| on B."""
    g = b.grid
    dist = center_distances(g, F.centers)
    v = b.values.ravel()
    osc = np.full((len(F.radii), len(F.centers)), np.nan)
    for i, r in enumerate(F.radii):
        for k, row in enumerate(dist < r):
            if row.any():
                vals = v[row]
                osc[i, k] = np.abs(vals - vals.mean()).mean()
    return BMOReport(float(np.nanmax(osc)), F, osc)


class Growth(NamedTuple):
    values: np.ndarray  # |b_{2^{l+1}B} - b_B|, l = 1..L
    slope: float


def oscillation_growth(b: ScalarField, B: Ball, L: int) -> Growth:
    if not B.scaled(2.0 ** (L + 1)).contains_box(b.grid):
        raise ValueError(f"2^{L + 1} B leaves the box")
    base = ball_average(b, B)
    vals = np.array([abs(ball_average(b, B.scaled(2.0 ** (l + 1))) - base) for l in range(1, L + 1)])
    slope = float(np.polyfit(np.arange(1, L + 1), vals, 1)[0]) if L >= 2 else float("nan")
    return Growth(vals, slope)


def weighted_oscillation(b: ScalarField, B: Ball, w: Weight, p: float = 1.0) -> float:
    """(int_B |b - b_B|^p w)^{1/p} / w(B)^{1/p}, with b_B the unweighted average."""
    if p < 1:
        raise ValueError("p must be >= 1")
    m = ball_mask(b.grid, B)
    if not m.any():
        warnings.warn(f"{B} contains no cell centre", DegenerateRegionWarning, stacklevel=2)
        return 0.0
    vals = b.values[m]
    wv = w.values[m]
    return float((np.sum(np.abs(vals - vals.mean()) ** p * wv) / wv.sum()) ** (1.0 / p))


def exp_norm_oscillation(b: ScalarField, B: Ball, w: Weight | None = None) -> float:
    """||b - b_B||_{exp L(w), B}."""
    m = ball_mask(b.grid, B)
    if not m.any():
        return 0.0
    centred = ScalarField(b.grid, np.where(m, b.values - b.values[m].mean(), 0.0))
    return luxemburg_norm(centred, EXPL, B, w)


def cauchy_identity(s: float, n_theta: int = 64) -> float:
    """(1/2pi) int_0^{2pi} exp(e^{i theta} s) e^{-i theta} d theta by the periodic trapezoid rule."""
    if n_theta < 16:
        raise ValueError("n_theta must be >= 16")
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    z = np.exp(1j * theta)
    return float(np.mean(np.exp(z * s) / z).real)
