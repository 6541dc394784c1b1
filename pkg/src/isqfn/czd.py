"""Dyadic Calderón-Zygmund decomposition of a vector field at a height sigma.

The root cube is the whole box; level k cubes have side 2E / 2^k and hold
N / 2^k cells per axis, so the recursion bottoms out at single cells.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .grid import Grid, VectorField


@dataclass(frozen=True)
class DyadicCube:
    level: int
    index: tuple[int, ...]  # position among the 2^level cubes per axis
    path: str  # child digits from the root, one per level

    def cells(self, g: Grid) -> tuple[slice, ...]:
        w = g.resolution >> self.level
        return tuple(slice(i * w, (i + 1) * w) for i in self.index)

    def side(self, g: Grid) -> float:
        return 2 * g.extent / 2**self.level

    def center(self, g: Grid) -> tuple[float, ...]:
        s = self.side(g)
        return tuple(-g.extent + (i + 0.5) * s for i in self.index)

    def parent(self) -> DyadicCube:
        return DyadicCube(self.level - 1, tuple(i // 2 for i in self.index), self.path[:-1])


@dataclass(eq=False)
class CZDecomposition:
    sigma: float
    grid: Grid
    cubes: list[DyadicCube]
    averages: np.ndarray  # l^2-norm average on each selected cube
    good: np.ndarray  # (J, *shape)
    bad: list[np.ndarray]  # per cube, (J, *shape), zero off the cube
    parent_averages: np.ndarray
    floor_flags: list[bool] = field(default_factory=list)

    @property
    def E(self) -> np.ndarray:
        m = np.zeros(self.grid.shape, bool)
        for Q in self.cubes:
            m[Q.cells(self.grid)] = True
        return m

    def to_lines(self) -> list[str]:
        """``level path avg`` per selected cube."""
        return [f"{Q.level} {Q.path or '-'} {float(a)!r}" for Q, a in zip(self.cubes, self.averages)]


def _block_means(a: np.ndarray, level: int, n: int) -> np.ndarray:
    N = a.shape[0]
    k = 2**level
    w = N // k
    if n == 1:
        return a.reshape(k, w).mean(axis=1)
    return a.reshape(k, w, k, w).mean(axis=(1, 3))


def cz_decompose(F: VectorField, sigma: float) -> CZDecomposition:
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    g = F.grid
    n = g.n
    norm = F.l2().values
    root = float(norm.mean())
    if root > sigma:
        raise ValueError(f"height below root average ({sigma} < {root})")
    levels = int(np.log2(g.resolution))
    pyramid = [_block_means(norm, k, n) for k in range(levels + 1)]
    cubes, avgs, parents, floors = [], [], [], []
    active = [DyadicCube(0, (0,) * n, "")]
    for k in range(1, levels + 1):
        nxt = []
        for Q in active:
            for digits in itertools.product((0, 1), repeat=n):
                idx = tuple(2 * i + d for i, d in zip(Q.index, digits))
                child = DyadicCube(k, idx, Q.path + str(int("".join(map(str, digits)), 2)))
                avg = float(pyramid[k][idx])
                if avg > sigma:
                    cubes.append(child)
                    avgs.append(avg)
                    parents.append(float(pyramid[k - 1][Q.index]))
                    floors.append(k == levels and avg > 2**n * sigma)
                elif k < levels:
                    nxt.append(child)
        active = nxt
    good = np.array(F.components, copy=True)
    bad = []
    for Q in cubes:
        sl = (slice(None),) + Q.cells(g)
        block = F.components[sl]
        mean = block.reshape(F.J, -1).mean(axis=1).reshape((F.J,) + (1,) * n)
        good[sl] = np.broadcast_to(mean, block.shape)
        h = np.zeros((F.J,) + g.shape)
        h[sl] = block - mean
        bad.append(h)
    return CZDecomposition(sigma, g, cubes, np.array(avgs), good, bad, np.array(parents), floors)


CHECKS = (
    "disjoint",
    "maximal",
    "height",
    "good_bound",
    "off_E_bound",
    "vector_average",
    "reconstruction",
    "support",
    "cancellation",
    "size",
    "measure",
)


@dataclass
class CZReport:
    checks: dict
    details: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failed(self) -> set:
        return {k for k, v in self.checks.items() if not v}

    def to_json(self) -> str:
        return json.dumps({"checks": self.checks, "details": self.details, "passed": self.passed}, indent=2)


def verify_cz(d: CZDecomposition, F: VectorField) -> CZReport:
    g = d.grid
    if F.grid != g or F.components.shape != d.good.shape:
        raise ValueError("decomposition does not belong to this field")
    n, J, sigma = g.n, F.J, d.sigma
    cell = g.cell_volume
    norm = F.l2().values
    fscale = max(1.0, float(np.abs(F.components).max()))

    cover = np.zeros(g.shape, int)
    for Q in d.cubes:
        cover[Q.cells(g)] += 1
    E = cover > 0
    gnorm = np.sqrt((d.good**2).sum(axis=0))

    height = [sigma < a <= 2**n * sigma for a in d.averages]
    maximal = [p <= sigma for p in d.parent_averages]
    vec_avg, cancel, size, support = [], [], [], []
    for Q, h in zip(d.cubes, d.bad):
        sl = Q.cells(g)
        vec_avg.append(bool(np.all(gnorm[sl] <= norm[sl].mean() * (1 + 1e-12))))
        off = np.ones(g.shape, bool)
        off[sl] = False
        support.append(bool(np.all(h[:, off] == 0.0)))
        for j in range(J):
            l1_f = np.abs(F.components[j][sl]).sum() * cell
            total_f = np.abs(F.components[j]).sum() * cell
            cancel.append(abs(h[j].sum() * cell) <= 1e-10 * max(total_f, np.finfo(float).tiny))
            size.append(np.abs(h[j]).sum() * cell <= 2 * l1_f + 1e-12)
    recon = d.good + (sum(d.bad) if d.bad else 0.0)
    recon_err = float(np.abs(recon - F.components).max())
    measure = len(d.cubes) == 0 or sum(Q.side(g) ** n for Q in d.cubes) <= norm.sum() * cell / sigma * (1 + 1e-12)

    checks = {
        "disjoint": bool(cover.max(initial=0) <= 1),
        "maximal": all(maximal),
        "height": all(height),
        "good_bound": bool(np.all(gnorm <= 2**n * sigma * (1 + 1e-12))),
        "off_E_bound": bool(np.all(norm[~E] <= sigma)),
        "vector_average": all(vec_avg),
        "reconstruction": recon_err <= 1e-15 * fscale,
        "support": all(support),
        "cancellation": all(cancel),
        "size": all(size),
        "measure": bool(measure),
    }
    details = {
        "sigma": sigma,
        "n_cubes": len(d.cubes),
        "reconstruction_error": recon_err,
        "max_height_ratio": float(max(d.averages / sigma, default=0.0)),
        "floor_flags": int(sum(d.floor_flags)),
    }
    return CZReport(checks, details)


def vector_minkowski_gap(nu: np.ndarray) -> float:
    """sum_i (sum_j nu_ij^2)^{1/2} - (sum_j (sum_i |nu_ij|)^2)^{1/2}; never negative."""
    nu = np.abs(np.asarray(nu, dtype=float))
    lhs = np.sqrt(np.sum(nu.sum(axis=0) ** 2))
    rhs = np.sqrt((nu**2).sum(axis=1)).sum()
    return float(rhs - lhs)


def cube_dict(d: CZDecomposition) -> list[dict]:
    g = d.grid
    return [dict(asdict(Q), center=Q.center(g), side=Q.side(g), avg=float(a)) for Q, a in zip(d.cubes, d.averages)]
