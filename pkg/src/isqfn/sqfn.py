"""Intrinsic square functions, their vector-valued and commutator versions.

The sup over the test class is replaced by a max over a FunctionBank. Cone
integrals use a log-spaced scale grid on [t_min, t_max] with the trapezoid
rule in log t, and the open cone |x - y| < t decided on cell centres.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .grid import Ball, Grid, ScalarField, VectorField, ball_mask
from .testbank import FunctionBank, TestFunction
from .weights import disk_kernel


@dataclass(frozen=True)
class ConeParams:
    t_min: float
    t_max: float
    n_scales: int = 24
    aperture: float = 1.0

    def __post_init__(self):
        if self.aperture != 1.0:
            raise ValueError("only aperture one is supported")
        if self.n_scales < 4:
            raise ValueError("need at least 4 scales")
        if not 0 < self.t_min < self.t_max:
            raise ValueError("need 0 < t_min < t_max")

    @classmethod
    def default(cls, g: Grid, n_scales: int = 24, t_max: float | None = None) -> ConeParams:
        return cls(2 * g.h, g.extent if t_max is None else t_max, n_scales)

    def check(self, g: Grid) -> None:
        if self.t_min < 2 * g.h * (1 - 1e-12):
            raise ValueError(f"scale {self.t_min} is below 2h = {2 * g.h}: kernel under-resolved")
        if self.t_max > g.extent * (1 + 1e-12):
            raise ValueError("t_max exceeds the box extent")

    @property
    def scales(self) -> np.ndarray:
        return np.geomspace(self.t_min, self.t_max, self.n_scales)

    @property
    def log_weights(self) -> np.ndarray:
        """Trapezoid weights in u = log t."""
        du = np.log(self.t_max / self.t_min) / (self.n_scales - 1)
        w = np.full(self.n_scales, du)
        w[[0, -1]] *= 0.5
        return w


@dataclass(frozen=True, eq=False)
class MultiScaleField:
    grid: Grid
    scales: np.ndarray
    values: np.ndarray  # (n_scales, *grid.shape), >= 0


def kernel_samples(phi: TestFunction, t: float, g: Grid) -> np.ndarray:
    """phi_t(d) = t^-n phi(d/t) on the offsets d = k*h, |k| <= t/h.

    The samples are shifted on the open support |d| < t so their discrete sum
    vanishes; this keeps constants in the kernel of every convolution.
    """
    K = int(np.floor(t / g.h))
    off = np.arange(-K, K + 1) * g.h
    mesh = np.meshgrid(*([off] * g.n), indexing="ij")
    d = np.stack([m for m in mesh], axis=-1)
    k = phi.evaluate(d / t) / t**g.n
    supp = np.sqrt((d**2).sum(-1)) < t
    k[supp] -= k[supp].sum() / supp.sum()
    k[~supp] = 0.0
    return k


def _conv(f: np.ndarray, kernel: np.ndarray, g: Grid) -> np.ndarray:
    return fftconvolve(f, kernel, mode="same") * g.cell_volume


def bank_convolutions(f: ScalarField, bank: FunctionBank, cone: ConeParams) -> np.ndarray:
    """phi_t * f for every scale and member, shape (n_scales, len(bank), *grid.shape)."""
    g = f.grid
    cone.check(g)
    if bank.n != g.n:
        raise ValueError("bank and grid dimensions differ")
    out = np.empty((cone.n_scales, len(bank)) + g.shape)
    for s, t in enumerate(cone.scales):
        for m, phi in enumerate(bank):
            out[s, m] = _conv(f.values, kernel_samples(phi, t, g), g)
    return out


def a_gamma(f: ScalarField, bank: FunctionBank, cone: ConeParams) -> MultiScaleField:
    conv = bank_convolutions(f, bank, cone)
    return MultiScaleField(f.grid, cone.scales, np.abs(conv).max(axis=1))


def cone_integrate(sq: np.ndarray, g: Grid, cone: ConeParams) -> np.ndarray:
    """sum_t w(t) t^-n sum_{|x-y|<t} sq(y, t) h^n, i.e. the cone integral of sq dy dt / t^{n+1}."""
    total = np.zeros(g.shape)
    for s, (t, wu) in enumerate(zip(cone.scales, cone.log_weights)):
        ball = fftconvolve(sq[s], disk_kernel(g, t), mode="same") * g.cell_volume
        total += wu * t ** (-g.n) * np.clip(ball, 0.0, None)
    return total


def intrinsic_square(f: ScalarField, bank: FunctionBank, cone: ConeParams) -> ScalarField:
    A = a_gamma(f, bank, cone)
    return ScalarField(f.grid, np.sqrt(cone_integrate(A.values**2, f.grid, cone)))


def vec_intrinsic_square(F: VectorField, bank: FunctionBank, cone: ConeParams) -> ScalarField:
    sq = sum(intrinsic_square(f, bank, cone).values ** 2 for f in F)
    return ScalarField(F.grid, np.sqrt(sq))


def _disk_offsets(g: Grid, t: float) -> np.ndarray:
    K = int(np.floor(t / g.h)) + 1
    rng = np.arange(-K, K + 1)
    mesh = np.meshgrid(*([rng] * g.n), indexing="ij")
    off = np.stack([m.ravel() for m in mesh], axis=-1)
    return off[np.sqrt(((off * g.h) ** 2).sum(-1)) < t]


def commutator_square(b: ScalarField, f: ScalarField, bank: FunctionBank, cone: ConeParams) -> ScalarField:
    """[b, S](f) through b(x) (phi_t*f)(y) - (phi_t*(b f))(y), maximised over the bank per (x, y, t)."""
    g = f.grid
    u_all = bank_convolutions(f, bank, cone)
    v_all = bank_convolutions(b * f, bank, cone)
    bx = b.values
    total = np.zeros(g.shape)
    N = g.resolution
    for s, (t, wu) in enumerate(zip(cone.scales, cone.log_weights)):
        offsets = _disk_offsets(g, t)
        K = int(np.abs(offsets).max()) if offsets.size else 0
        pad = [(0, 0)] + [(K, K)] * g.n
        u = np.pad(u_all[s], pad)
        v = np.pad(v_all[s], pad)
        acc = np.zeros(g.shape)
        for off in offsets:
            sl = (slice(None),) + tuple(slice(K + o, K + o + N) for o in off)
            diff = bx[None] * u[sl] - v[sl]
            acc += (diff * diff).max(axis=0)
        total += wu * t ** (-g.n) * acc * g.cell_volume
    return ScalarField(g, np.sqrt(total))


def vec_commutator_square(b: ScalarField, F: VectorField, bank: FunctionBank, cone: ConeParams) -> ScalarField:
    sq = sum(commutator_square(b, f, bank, cone).values ** 2 for f in F)
    return ScalarField(F.grid, np.sqrt(sq))


def farfield_majorant(F: VectorField, B: Ball, L: int) -> ScalarField:
    """sum_{l=1}^{L} average of ||F||_{l^2} over 2^{l+1} B, held constant on B (0 elsewhere)."""
    g = F.grid
    if not B.scaled(2.0 ** (L + 1)).contains_box(g):
        raise ValueError(f"2^{L + 1} B leaves the box")
    norm = F.l2().values
    total = 0.0
    for l in range(1, L + 1):
        big = B.scaled(2.0 ** (l + 1))
        total += norm[ball_mask(g, big)].sum() * g.cell_volume / big.volume
    return ScalarField(g, np.where(ball_mask(g, B), total, 0.0))


def far_part(F: VectorField, B: Ball) -> VectorField:
    """F restricted to the complement of 2B."""
    return F * ScalarField(F.grid, (~ball_mask(F.grid, B.scaled(2.0))).astype(float))
