import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isqfn.grid import Ball, ScalarField, make_grid
from isqfn.norms import (
    EXPL,
    LLOGL,
    AmalgamParams,
    DegenerateNormWarning,
    YoungFunction,
    amalgam_detail,
    amalgam_norm,
    holder_defect,
    llogl_infimal,
    lp_norm,
    luxemburg_norm,
    luxemburg_residual,
    phi_llogl,
    power,
    weak_lp_norm,
)
from isqfn.weights import power_weight

from oracles import amalgam_oracle, luxemburg_scan, weak_oracle


def _field(g, seed):
    return ScalarField(g, np.random.default_rng(seed).normal(size=g.shape))


def test_young_functions():
    assert np.allclose(phi_llogl(np.array([0.0, 0.5, 1.0, np.e])), [0.0, 0.5, 1.0, 2 * np.e])
    assert EXPL(1.0) == pytest.approx(np.e - 1)
    assert power(3)(2.0) == 8.0
    with pytest.raises(ValueError):
        YoungFunction("cube")
    with pytest.raises(ValueError):
        power(0.5)


def test_lp_norm_against_sum():
    g = make_grid(2, 1.0, 16)
    f = _field(g, 0)
    w = power_weight(-0.5, g)
    expect = (np.sum(np.abs(f.values) ** 3 * w.values) * g.cell_volume) ** (1 / 3)
    assert lp_norm(f, w, 3) == pytest.approx(expect, rel=1e-14)
    assert lp_norm(f, p=math.inf) == np.abs(f.values).max()
    B = Ball((0.0, 0.0), 0.5)
    inside = np.linalg.norm(g.points(), axis=1) < 0.5
    assert lp_norm(f, p=1, region=B) == pytest.approx(np.abs(f.values.ravel()[inside]).sum() * g.cell_volume)


@pytest.mark.parametrize("p", [1.0, 1.5, 3.0])
def test_weak_norm_matches_oracle(p):
    g = make_grid(1, 1.0, 64)
    f = ScalarField(g, np.round(np.random.default_rng(1).normal(size=64), 1))  # ties on purpose
    w = power_weight(-0.3, g)
    expect = weak_oracle(np.abs(f.values), w.values, p, g.h)
    assert weak_lp_norm(f, w, p) == pytest.approx(expect, rel=1e-13)


def test_weak_norm_of_indicator():
    g = make_grid(1, 1.0, 64)
    f = ScalarField(g, 3.0 * (np.abs(g.axis) < 0.25))
    # a single level: 3 * |{f >= 3}|
    assert weak_lp_norm(f, None, 1) == pytest.approx(3.0 * 16 * g.h)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(1.0, 4.0))
def test_weak_below_strong(seed, p):
    g = make_grid(1, 1.0, 64)
    f = _field(g, seed)
    assert weak_lp_norm(f, None, p) <= lp_norm(f, None, p) * (1 + 1e-12)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
def test_luxemburg_power_case(p):
    g = make_grid(1, 4.0, 512)
    f = _field(g, 2)
    w = power_weight(-0.5, g)
    expect = (np.sum(np.abs(f.values) ** p * w.values) / w.values.sum()) ** (1 / p)
    assert luxemburg_norm(f, power(p), None, w) == pytest.approx(expect, rel=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_luxemburg_llogl_against_scan(seed):
    g = make_grid(1, 4.0, 256)
    f = ScalarField(g, np.random.default_rng(seed).standard_cauchy(g.shape))
    w = power_weight(-0.5, g)
    lam = luxemburg_norm(f, LLOGL, None, w)
    ref = luxemburg_scan(np.abs(f.values), w.values, LLOGL)
    assert lam == pytest.approx(ref, rel=1e-4)
    assert abs(luxemburg_residual(f, LLOGL, lam, None, w)) <= 1e-6


def test_luxemburg_expl_residual_and_zero():
    g = make_grid(1, 1.0, 128)
    f = _field(g, 3)
    lam = luxemburg_norm(f, EXPL)
    assert abs(luxemburg_residual(f, EXPL, lam)) <= 1e-6
    assert luxemburg_norm(ScalarField(g, np.zeros(128)), LLOGL) == 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_average_below_llogl_norm(seed):
    g = make_grid(1, 2.0, 64)
    f = ScalarField(g, np.random.default_rng(seed).lognormal(size=64, sigma=2.0))
    w = power_weight(-0.5, g)
    B = Ball((0.1,), 1.2)
    inside = np.abs(g.axis - 0.1) < 1.2
    avg = np.sum(f.values[inside] * w.values[inside]) / w.values[inside].sum()
    assert avg <= luxemburg_norm(f, LLOGL, B, w) + 1e-8


def test_holder_defect_bound():
    g = make_grid(1, 1.0, 128)
    rng = np.random.default_rng(7)
    worst = 0.0
    for k in range(100):
        if k % 2:
            f = ScalarField(g, rng.lognormal(sigma=1.5, size=128))
            h = ScalarField(g, rng.normal(size=128) * rng.uniform(0.1, 5))
        else:
            m = np.zeros(128)
            m[rng.choice(128, 1 + k // 4, replace=False)] = 1.0
            f, h = ScalarField(g, m), ScalarField(g, m * np.log(128 / m.sum() + 1))
        worst = max(worst, holder_defect(f, h))
    assert 1.0 < worst <= 2 + 1e-6


def test_holder_defect_zero_factor():
    g = make_grid(1, 1.0, 16)
    with pytest.warns(DegenerateNormWarning):
        assert math.isnan(holder_defect(ScalarField(g, np.zeros(16)), ScalarField(g, np.ones(16))))


def test_infimal_formula_is_equivalent():
    g = make_grid(1, 2.0, 128)
    rng = np.random.default_rng(11)
    w = power_weight(-0.5, g)
    for _ in range(20):
        f = ScalarField(g, rng.lognormal(sigma=rng.uniform(0.2, 3), size=128))
        ratio = llogl_infimal(f, None, w) / luxemburg_norm(f, LLOGL, None, w)
        assert 0.25 <= ratio <= 4


def test_amalgam_params_validation():
    with pytest.raises(ValueError):
        AmalgamParams(2, 4, 1.5)
    with pytest.raises(ValueError):
        AmalgamParams(1, 2, 3)
    with pytest.raises(ValueError):
        AmalgamParams(0.5, 4, 1)
    assert AmalgamParams(1, math.inf, 2).q_infinite


@pytest.mark.parametrize("p,alpha,q", [(1.0, 2.0, math.inf), (2.0, 3.0, math.inf), (1.0, 1.5, 4.0), (2.0, 2.0, 3.0)])
def test_amalgam_matches_two_loop_oracle(p, alpha, q):
    g = make_grid(1, 2.0, 64)
    f = _field(g, 5)
    w = power_weight(-0.5, g)
    mu = power_weight(0.5, g, "mu")
    P = AmalgamParams(p, q, alpha, n_radii=6)
    expect = amalgam_oracle(f, g, p, q, alpha, P.radius_grid(g), P.center_stride, w, mu)
    assert amalgam_norm(f, P, w, mu) == pytest.approx(expect, rel=1e-10)


def test_amalgam_two_dimensional_oracle():
    g = make_grid(2, 1.0, 16)
    f = _field(g, 6)
    P = AmalgamParams(1.0, math.inf, 2.0, n_radii=4)
    expect = amalgam_oracle(f, g, 1.0, math.inf, 2.0, P.radius_grid(g), P.center_stride)
    assert amalgam_norm(f, P) == pytest.approx(expect, rel=1e-10)


def test_amalgam_detail_curve():
    g = make_grid(1, 4.0, 256)
    d = amalgam_detail(_field(g, 0), AmalgamParams(1, 4, 2, n_radii=8))
    assert d.curve.shape == (8,) and d.value == d.curve.max()
    assert np.all(np.diff(d.clipped) >= 0) and d.clipped[0] < 0.05 < d.clipped[-1]
    assert set(d.to_dict()) >= {"value", "radii", "curve", "clipped"}
    with pytest.raises(ValueError):
        amalgam_detail(_field(g, 0), AmalgamParams(1, 4, 2), kind="orlicz")


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 1000), st.sampled_from([1.0, 2.0]))
def test_weak_amalgam_below_strong(seed, p):
    g = make_grid(1, 2.0, 64)
    f = _field(g, seed)
    P = AmalgamParams(p, 4.0, 2.0, n_radii=5)
    assert amalgam_norm(f, P, kind="weak") <= amalgam_norm(f, P) * (1 + 1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 1000), st.floats(1e-3, 1e3), st.sampled_from(["strong", "weak", "llogl"]))
def test_amalgam_homogeneity(seed, c, kind):
    g = make_grid(1, 2.0, 64)
    f = _field(g, seed)
    P = AmalgamParams(1.0, 4.0, 2.0, n_radii=4)
    assert amalgam_norm(f * c, P, kind=kind) == pytest.approx(c * amalgam_norm(f, P, kind=kind), rel=1e-10)


def test_no_warnings_on_regular_inputs():
    g = make_grid(1, 2.0, 64)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        amalgam_norm(_field(g, 1), AmalgamParams(1.0, 4.0, 2.0), kind="llogl")
