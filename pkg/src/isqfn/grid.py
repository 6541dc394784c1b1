"""Uniform cell-centred grids on the box [-E, E]^n and the fields living on them.

Everything downstream assumes zero extension outside the box and midpoint
quadrature, with ball membership decided by cell centres (strict ``<``).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.ndimage import map_coordinates


class DegenerateRegionWarning(UserWarning):
    """A ball contained no cell centre; the quadrature returned 0."""


@dataclass(frozen=True)
class Grid:
    n: int
    extent: float
    resolution: int

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.n}")
        if not self.extent > 0:
            raise ValueError("extent must be positive")
        N = self.resolution
        if N < 8 or N & (N - 1):
            raise ValueError(f"resolution must be a power of two >= 8, got {N}")

    @property
    def h(self) -> float:
        return 2.0 * self.extent / self.resolution

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.resolution,) * self.n

    @property
    def size(self) -> int:
        return self.resolution**self.n

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    @property
    def axis(self) -> np.ndarray:
        """Cell-centre coordinates along one axis."""
        return -self.extent + (np.arange(self.resolution) + 0.5) * self.h

    def points(self) -> np.ndarray:
        """Cell centres as an array of shape ``(N**n, n)`` in row-major order."""
        axes = np.meshgrid(*([self.axis] * self.n), indexing="ij")
        return np.stack([a.ravel() for a in axes], axis=-1)

    def radius(self) -> np.ndarray:
        """|x| at every cell centre, shaped like a field."""
        return np.linalg.norm(self.points(), axis=-1).reshape(self.shape)

    def coords(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.axis] * self.n), indexing="ij"))


def make_grid(n: int, extent: float, resolution: int) -> Grid:
    return Grid(int(n), float(extent), int(resolution))


@dataclass(frozen=True)
class Ball:
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))

    def scaled(self, factor: float) -> Ball:
        return Ball(self.center, self.radius * factor)

    @property
    def volume(self) -> float:
        """Lebesgue measure of the ball (not of its intersection with a box)."""
        n = len(self.center)
        return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * self.radius**n

    def contains_box(self, grid: Grid) -> bool:
        return all(abs(c) + self.radius <= grid.extent * (1 + 1e-12) for c in self.center)


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size != self.grid.size:
            raise ValueError(f"expected {self.grid.size} values, got {v.size}")
        v = v.reshape(self.grid.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __mul__(self, other):
        if isinstance(other, ScalarField):
            return ScalarField(self.grid, self.values * other.values)
        return ScalarField(self.grid, self.values * other)

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, ScalarField):
            return ScalarField(self.grid, self.values + other.values)
        return ScalarField(self.grid, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return ScalarField(self.grid, -self.values)

    def abs(self) -> ScalarField:
        return ScalarField(self.grid, np.abs(self.values))


@dataclass(frozen=True, eq=False)
class VectorField:
    grid: Grid
    components: np.ndarray  # (J, *grid.shape)

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        if c.ndim == self.grid.n:
            c = c[None]
        c = c.reshape((-1,) + self.grid.shape)
        if c.shape[0] < 1:
            raise ValueError("a vector field needs at least one component")
        if not np.all(np.isfinite(c)):
            raise ValueError("field values must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "components", c)

    @classmethod
    def from_scalars(cls, fields) -> VectorField:
        fields = list(fields)
        g = fields[0].grid
        if any(f.grid != g for f in fields):
            raise ValueError("all components must share one grid")
        return cls(g, np.stack([f.values for f in fields]))

    @property
    def J(self) -> int:
        return self.components.shape[0]

    def component(self, j: int) -> ScalarField:
        return ScalarField(self.grid, self.components[j])

    def __iter__(self):
        return (self.component(j) for j in range(self.J))

    def l2(self) -> ScalarField:
        """Pointwise l^2 norm over components."""
        return ScalarField(self.grid, np.sqrt(np.sum(self.components**2, axis=0)))

    def __mul__(self, c):
        if isinstance(c, ScalarField):
            return VectorField(self.grid, self.components * c.values[None])
        return VectorField(self.grid, self.components * c)

    __rmul__ = __mul__


def ball_mask(grid: Grid, ball: Ball) -> np.ndarray:
    """Cells whose centre lies strictly inside ``ball``."""
    c = np.asarray(ball.center)
    if c.size != grid.n:
        raise ValueError("ball dimension does not match grid")
    return (center_distances(grid, c)[0] < ball.radius).reshape(grid.shape)


def center_distances(grid: Grid, centers: np.ndarray) -> np.ndarray:
    """Distances from each of ``k`` centres to every cell centre, shape (k, N**n)."""
    centers = np.asarray(centers, dtype=float).reshape(-1, grid.n)
    pts = grid.points()
    if grid.n == 1:
        return np.abs(centers[:, :1] - pts[:, 0][None, :])
    return np.sqrt(((centers[:, None, :] - pts[None, :, :]) ** 2).sum(-1))


def ball_sums(values: np.ndarray, dist: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Row sums of ``values`` over cells with ``dist < radius``; also returns the cell counts."""
    mask = dist < radius
    return mask @ np.ravel(values), mask.sum(axis=1)


def integrate(f: ScalarField, region: Ball | None = None) -> float:
    """Midpoint rule over the whole box or over the cells whose centre is in ``region``.

    Warns with :class:`DegenerateRegionWarning` and returns 0 when the ball
    catches no cell centre.
    """
    if region is None:
        return float(f.values.sum() * f.grid.cell_volume)
    mask = ball_mask(f.grid, region)
    if not mask.any():
        warnings.warn(f"{region} contains no cell centre", DegenerateRegionWarning, stacklevel=2)
        return 0.0
    return float(f.values[mask].sum() * f.grid.cell_volume)


def subgrid_centers(grid: Grid, stride: int) -> np.ndarray:
    """Every ``stride``-th cell centre along each axis, shape (k, n)."""
    ax = grid.axis[stride // 2 :: stride]
    mesh = np.meshgrid(*([ax] * grid.n), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def log_radii(grid: Grid, count: int, rmin: float | None = None, rmax: float | None = None) -> np.ndarray:
    rmin = 2 * grid.h if rmin is None else rmin
    rmax = grid.extent if rmax is None else rmax
    return np.geomspace(rmin, rmax, count)


def dilate_translate(f: ScalarField, lam: float, shift=0.0) -> ScalarField:
    """Sample ``x -> f(lam * (x - shift))`` by linear interpolation; zero outside the box."""
    if not lam > 0:
        raise ValueError("dilation factor must be positive")
    g = f.grid
    shift = np.broadcast_to(np.asarray(shift, dtype=float), (g.n,))
    if lam == 1.0 and not shift.any():
        return ScalarField(g, f.values.copy())
    src = lam * (g.points() - shift)
    # continuous index of a point: centre k sits at index k
    idx = (src + g.extent) / g.h - 0.5
    vals = map_coordinates(f.values, idx.T, order=1, mode="constant", cval=0.0)
    return ScalarField(g, vals.reshape(g.shape))


# --------------------------------------------------------------------------
# field file format: text header "n N extent J\n" then J*N**n little-endian f8


def write_fields(path, fields, header_extra: str = "") -> None:
    if isinstance(fields, ScalarField):
        fields = VectorField(fields.grid, fields.values[None])
    g = fields.grid
    header = f"{g.n} {g.resolution} {g.extent!r} {fields.J}"
    if header_extra:
        header += " " + header_extra
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii") + b"\n")
        fh.write(np.ascontiguousarray(fields.components, dtype="<f8").tobytes())


def read_header(path) -> tuple[int, int, float, int, list[str]]:
    with open(path, "rb") as fh:
        parts = fh.readline().decode("ascii").split()
    return int(parts[0]), int(parts[1]), float(parts[2]), int(parts[3]), parts[4:]


def read_fields(path) -> VectorField:
    with open(path, "rb") as fh:
        parts = fh.readline().decode("ascii").split()
        n, N, extent, J = int(parts[0]), int(parts[1]), float(parts[2]), int(parts[3])
        data = np.frombuffer(fh.read(), dtype="<f8")
    g = make_grid(n, extent, N)
    if data.size != J * g.size:
        raise ValueError(f"{path}: expected {J * g.size} values, found {data.size}")
    return VectorField(g, data.reshape((J,) + g.shape).astype(float))


def read_scalar(path) -> ScalarField:
    v = read_fields(path)
    if v.J != 1:
        raise ValueError(f"{path} holds {v.J} components, expected 1")
    return v.component(0)


def read_csv_field(path, extent: float) -> ScalarField:
    """One value per line, n = 1."""
    vals = np.loadtxt(Path(path), dtype=float, ndmin=1)
    return ScalarField(make_grid(1, extent, vals.size), vals)
