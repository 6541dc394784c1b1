"""A finite bank of admissible test functions for the sup in the intrinsic square function.

Members are compactly supported in the closed unit ball, have lattice mean
zero, and Hölder-gamma seminorm at most 1 - margin. The bank maximum is a lower
bound for the sup over the whole class; members are generated in an order
where every prefix is spread over the parameter range, so ``bank[:k]`` is
a sensible smaller bank.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

FAMILIES = ("radial", "odd", "pair")
MARGIN = 0.02


def reference_lattice(n: int, points: int | None = None) -> np.ndarray:
    """Lattice axis on [-1, 1] (includes both endpoints)."""
    if points is None:
        points = 801 if n == 1 else 81
    return np.linspace(-1.0, 1.0, points)


def bump(r2: np.ndarray) -> np.ndarray:
    """exp(-1/(1-|x|^2)) on the open unit ball, 0 elsewhere (argument is |x|^2)."""
    out = np.zeros_like(r2, dtype=float)
    inside = r2 < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return out


@dataclass(frozen=True, eq=False)
class TestFunction:
    __test__ = False  # not a pytest class

    gamma: float
    axis: np.ndarray  # reference lattice axis
    profile: np.ndarray  # samples on axis^n
    label: str

    @property
    def n(self) -> int:
        return self.profile.ndim

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Linear interpolation of the profile at points ``x`` of shape (..., n); zero off the lattice."""
        x = np.asarray(x, dtype=float)
        if self.n == 1:
            x1 = x[..., 0] if x.ndim and x.shape[-1] == 1 else x
            return np.interp(x1, self.axis, self.profile, left=0.0, right=0.0)
        interp = RegularGridInterpolator((self.axis,) * self.n, self.profile, bounds_error=False, fill_value=0.0)
        return interp(x)

    def __mul__(self, c: float) -> TestFunction:
        return TestFunction(self.gamma, self.axis, self.profile * c, self.label)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


@dataclass(frozen=True)
class AdmissibilityReport:
    support: bool
    mean_zero: bool
    holder: bool
    seminorm: float
    mean: float
    degenerate: bool
    pairs_checked: int

    @property
    def passed(self) -> bool:
        return self.support and self.mean_zero and self.holder


def _lattice_points(axis: np.ndarray, n: int) -> np.ndarray:
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def holder_seminorm(profile: np.ndarray, axis: np.ndarray, gamma: float) -> tuple[float, int]:
    """Exact lattice Hölder seminorm: every pair, one lattice offset at a time.

    Returns the seminorm and the number of pairs examined.
    """
    n = profile.ndim
    M = axis.size
    step = axis[1] - axis[0]
    best, pairs = 0.0, 0
    # offsets with a positive leading nonzero coordinate cover every unordered pair once
    for off in itertools.product(range(-(M - 1), M), repeat=n):
        if off <= (0,) * n:
            continue
        src = tuple(slice(max(0, -o), M - max(0, o)) for o in off)
        dst = tuple(slice(max(0, o), M - max(0, -o)) for o in off)
        diff = np.abs(profile[dst] - profile[src])
        pairs += diff.size
        dist = step * np.sqrt(sum(o * o for o in off))
        best = max(best, float(diff.max()) / dist**gamma)
    return best, pairs


def validate_admissible(phi: TestFunction, mean_tol: float = 1e-12) -> AdmissibilityReport:
    pts = _lattice_points(phi.axis, phi.n)
    v = phi.profile.ravel()
    outside = np.linalg.norm(pts, axis=-1) > 1.0 + 1e-12
    support = bool(np.all(v[outside] == 0.0))
    mean = float(v.mean())
    semi, npairs = holder_seminorm(phi.profile, phi.axis, phi.gamma)
    return AdmissibilityReport(
        support=support,
        mean_zero=abs(mean) <= mean_tol,
        holder=semi <= 1.0,
        seminorm=semi,
        mean=mean,
        degenerate=bool(np.all(v == 0.0)),
        pairs_checked=npairs,
    )


def _van_der_corput(k: int) -> float:
    """k-th point (k >= 1) of the base-2 van der Corput sequence."""
    q, denom = 0.0, 1.0
    while k:
        denom *= 2
        k, rem = divmod(k, 2)
        q += rem / denom
    return q


def _candidate(family: str, s: float, pts: np.ndarray, n: int, k: int) -> np.ndarray:
    """Raw (unnormalised) profile of ``family`` at shape parameter s in (0, 1)."""
    r2 = (pts**2).sum(-1)
    if family == "radial":
        # two nested bumps of equal mass: sign change at a radius set by s
        c = 0.2 + 0.7 * s
        return bump(r2 / c**2) - c**n * bump(r2)
    if family == "odd":
        width = 0.3 + 0.7 * s
        axis = k % n
        return pts[:, axis] * bump(r2 / width**2)
    if family == "pair":
        width = 0.15 + 0.45 * s
        direction = np.zeros(n)
        direction[k % n] = 1.0
        u = (1.0 - width) * direction
        return bump(((pts - u) ** 2).sum(-1) / width**2) - bump(((pts + u) ** 2).sum(-1) / width**2)
    raise ValueError(f"unknown family {family!r}")


def make_member(gamma: float, family: str, s: float, axis: np.ndarray, n: int, k: int = 0) -> TestFunction | None:
    pts = _lattice_points(axis, n)
    raw = _candidate(family, s, pts, n, k)
    r2 = (pts**2).sum(-1)
    raw[r2 > 1.0] = 0.0
    # remove the lattice mean with a multiple of the envelope so the support is kept
    env = bump(r2)
    raw = raw - env * (raw.sum() / env.sum())
    support = raw != 0
    if not support.any():
        return None
    raw[support] -= raw.sum() / support.sum()  # residual rounding, spread over the support
    profile = raw.reshape((axis.size,) * n)
    semi, _ = holder_seminorm(profile, axis, gamma)
    profile = profile * ((1.0 - MARGIN) / semi)
    return TestFunction(gamma, axis, profile, f"{family}:{s:.4f}")


@dataclass(frozen=True)
class FunctionBank:
    gamma: float
    members: tuple

    def __post_init__(self):
        if not self.members:
            raise ValueError("a function bank needs at least one member")
        if any(m.gamma != self.gamma for m in self.members):
            raise ValueError("all members must share gamma")

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return FunctionBank(self.gamma, tuple(self.members[item]))
        return self.members[item]

    @property
    def n(self) -> int:
        return self.members[0].n


def build_bank(gamma: float, families=FAMILIES, size: int = 12, n: int = 1, lattice_points: int | None = None) -> FunctionBank:
    """Round-robin over ``families``, shape parameters from a van der Corput sequence."""
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    if size < 1:
        raise ValueError("bank size must be >= 1")
    if isinstance(families, str):
        families = tuple(f.strip() for f in families.split(","))
    axis = reference_lattice(n, lattice_points)
    members = []
    attempts = 0
    k = 0
    while len(members) < size and attempts < 20 * size:
        fam = families[attempts % len(families)]
        if attempts % len(families) == 0:
            k += 1
        attempts += 1
        phi = make_member(gamma, fam, _van_der_corput(k), axis, n, k)
        if phi is not None and validate_admissible(phi).passed:
            members.append(phi)
    if not members:
        raise ValueError("no admissible members")
    return FunctionBank(gamma, tuple(members))


def write_bank(path, bank: FunctionBank) -> None:
    """Field-file layout on the reference lattice with a ``gamma=<g>`` header token."""
    n = bank.n
    M = bank.members[0].axis.size
    labels = ";".join(m.label for m in bank.members)
    header = f"{n} {M} 1.0 {len(bank)} gamma={bank.gamma!r} labels={labels}"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii") + b"\n")
        fh.write(np.ascontiguousarray(np.stack([m.profile for m in bank.members]), dtype="<f8").tobytes())


def read_bank(path) -> FunctionBank:
    with open(path, "rb") as fh:
        parts = fh.readline().decode("ascii").split()
        data = np.frombuffer(fh.read(), dtype="<f8")
    n, M, J = int(parts[0]), int(parts[1]), int(parts[3])
    extra = dict(p.split("=", 1) for p in parts[4:])
    gamma = float(extra["gamma"])
    labels = extra.get("labels", "").split(";")
    axis = reference_lattice(n, M)
    profiles = data.reshape((J,) + (M,) * n).astype(float)
    return FunctionBank(gamma, tuple(TestFunction(gamma, axis, p, lab) for p, lab in zip(profiles, labels)))
