"""Slow reference implementations used only by the tests."""
import math

import numpy as np

from isqfn.grid import subgrid_centers


def weak_oracle(a, wv, p, cell):
    """max over sample values v of v * w({|f| >= v})^{1/p}, by a double loop."""
    best = 0.0
    for v in a:
        mass = sum(wi for ai, wi in zip(a, wv) if ai >= v) * cell
        best = max(best, v * mass ** (1.0 / p))
    return best


def luxemburg_scan(a, wv, A, n=10_000):
    """Smallest lam on a two-stage grid with mean_w A(a/lam) <= 1."""
    mass = wv.sum()

    def G(lam):
        with np.errstate(over="ignore"):
            return np.sum(A(a / lam) * wv) / mass

    # A(t) >= t forces lam >= mean|f|; the root is below the top value for A(t) = t on [0, 1]
    lo = max(np.sum(a * wv) / mass, 1e-300) * 0.5
    hi = a.max() * 2.0
    for _ in range(2):
        grid = np.geomspace(lo, hi, n) if hi / lo > 2 else np.linspace(lo, hi, n)
        ok = np.array([G(l) <= 1.0 for l in grid])
        k = int(np.argmax(ok))
        lo, hi = grid[max(k - 1, 0)], grid[k]
    return hi


def amalgam_oracle(f, g, p, q, alpha, radii, stride, w=None, mu=None):
    """Two nested loops over radii and centres, membership by math.dist on cell centres."""
    pts = g.points()
    fv = np.abs(f.values).ravel()
    wv = np.ones(g.size) if w is None else w.values.ravel()
    muv = np.ones(g.shape) if mu is None else mu.values
    centers = subgrid_centers(g, stride)
    mu_c = muv[(slice(stride // 2, None, stride),) * g.n].ravel()
    best = 0.0
    for r in radii:
        inner = []
        for y in centers:
            idx = [i for i, x in enumerate(pts) if math.dist(x, y) < r]
            wB = sum(wv[i] for i in idx) * g.cell_volume
            loc = (sum(fv[i] ** p * wv[i] for i in idx) * g.cell_volume) ** (1 / p)
            inner.append(wB ** (1 / alpha - 1 / p - 1 / q) * loc if wB > 0 else 0.0)
        inner = np.array(inner)
        if math.isinf(q):
            val = inner.max()
        else:
            val = (np.sum(inner**q * mu_c) * (stride * g.h) ** g.n) ** (1 / q)
        best = max(best, val)
    return best
