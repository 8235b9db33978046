from math import exp

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from aheinstein.black_holes import make_black_hole, toral_rescaling_isometry
from aheinstein.errors import DomainError, InvalidMetricError
from aheinstein.tensor_core import (FiberBlock, WarpedProductMetric, conformal_curvature,
                                    curvature, einstein_residual, fd_curvature, flat_product,
                                    hyperbolic_ball, hyperbolic_cusp, weyl_energy_density)


def off_diagonal(a):
    return a[~np.eye(a.shape[0], dtype=bool)]


@pytest.mark.parametrize("x", [1.0, 5.0])
def test_ball_has_constant_sectional_curvature(x):
    data = curvature(hyperbolic_ball(4), x)
    assert np.max(np.abs(off_diagonal(data.sectional) + 1)) < 1e-10
    assert data.norm_weyl < 1e-10
    assert np.allclose(data.ricci, -3 * np.eye(4), atol=1e-10)


@given(st.floats(0.05, 8.0))
def test_ball_sectional_anywhere(x):
    data = curvature(hyperbolic_ball(4), x)
    assert np.max(np.abs(off_diagonal(data.sectional) + 1)) < 1e-9


def test_flat_product_is_flat():
    data = curvature(flat_product(np.diag([1.0, 2.0, 3.0])), 0.7)
    assert np.all(data.riemann == 0)
    assert data.scalar == 0 and data.norm_riemann == 0


def test_schwarzschild_ricci_matches_symbolic_oracle():
    bh = make_black_hole(4, 1, 1.0)
    data = curvature(bh.metric, 2.0)
    expected = oracles.frame_ricci(1, 1, "sphere", 2.0)
    assert np.allclose(np.diag(data.ricci), expected, atol=1e-9)
    assert np.max(np.abs(data.ricci + 3 * np.eye(4))) < 1e-9


def test_toral_weyl_norm_matches_symbolic_oracle():
    bh = make_black_hole(4, 0, 1.0)
    r = 2 * bh.r_plus
    value = weyl_energy_density(bh.metric, r)
    assert value > 0
    assert abs(value - oracles.weyl_norm_squared(0, 1, "flat", r)) < 1e-9


def test_curvature_data_symmetries():
    data = curvature(make_black_hole(4, -1, 0.4).metric, 2.3)
    R = data.riemann
    bianchi = R + np.einsum("abcd->acdb", R) + np.einsum("abcd->adbc", R)
    assert np.max(np.abs(bianchi)) < 1e-12
    assert np.max(np.abs(R + np.einsum("abcd->bacd", R))) < 1e-12
    assert np.max(np.abs(np.einsum("abad->bd", data.weyl))) < 1e-12
    assert abs(data.scalar - np.trace(data.ricci)) < 1e-12


def test_einstein_residual_examples():
    toral = make_black_hole(4, 0, 1.0)
    grid = np.linspace(toral.r_plus + 0.01, 100, 50)
    assert einstein_residual(toral.metric, grid) < 1e-8
    quotient = make_black_hole(4, -1, 0.0)
    assert einstein_residual(quotient.metric, np.linspace(1.01, 50, 50)) < 1e-10
    five = make_black_hole(5, 1, 1.0)
    assert einstein_residual(five.metric, five.r_plus + np.geomspace(1e-2, 50, 50)) < 1e-8


def test_einstein_residual_rejects_empty_grid():
    with pytest.raises(DomainError):
        einstein_residual(hyperbolic_ball(4), [])


def test_points_outside_interval_are_rejected():
    bh = make_black_hole(4, 1, 1.0)
    with pytest.raises(DomainError):
        curvature(bh.metric, 0.5)


def test_nonpositive_warp_is_invalid():
    bad = WarpedProductMetric((0.0, 2.0), lambda s: s * 0 + 1.0, [lambda s: s - 1.0],
                              [FiberBlock.sphere(3)])
    with pytest.raises(InvalidMetricError):
        curvature(bad, 0.5)


def test_fiber_gram_must_be_positive_definite():
    with pytest.raises(InvalidMetricError):
        FiberBlock.torus([[1.0, 2.0], [2.0, 1.0]])


def _two_exp_minus(s):
    return (-s).exp() * 2.0


@pytest.mark.parametrize("rho", [0.5, 2.0, 6.0])
def test_compactified_ball_scalar_closed_form(rho):
    data, info = conformal_curvature(hyperbolic_ball(4), _two_exp_minus, rho)
    t = 2 * exp(-rho)
    assert abs(data.scalar - 9 / (1 - t * t / 4)) < 1e-8
    assert info["gap"] < 1e-7


def test_compactified_ball_tends_to_boundary_value():
    data, info = conformal_curvature(hyperbolic_ball(4), _two_exp_minus, 9.0)
    assert abs(data.scalar - 9) < 1e-6
    assert abs(info["grad_rho"] - 1) < 1e-6


def test_compactified_cusp_is_flat():
    data, info = conformal_curvature(hyperbolic_cusp(np.eye(3)), _two_exp_minus, 0.3)
    assert np.max(np.abs(data.riemann)) < 1e-12
    assert abs(info["grad_rho"] - 1) < 1e-12


def test_gradient_of_defining_function_at_boundary():
    bh = make_black_hole(4, 1, 1.0)
    # 1/r is a defining function with |grad| -> 1 for the compactified metric
    _, info = conformal_curvature(bh.metric, lambda s: 1 / s, 2e3)
    assert abs(info["grad_rho"] - 1) < 1e-6


def test_compactification_routes_agree_on_black_holes():
    for c, m in ((1, 1.0), (0, 1.0), (-1, 0.5)):
        bh = make_black_hole(4, c, m)
        for x in (1.5 * bh.r_plus, 4 * bh.r_plus):
            _, info = conformal_curvature(bh.metric, lambda s: 1 / s, x)
            assert info["gap"] < 1e-7


@pytest.mark.parametrize("c,m,x", [(1, 1.0, 2.0), (0, 1.0, 2.5), (-1, 0.5, 3.0)])
def test_finite_differences_agree_with_jets(c, m, x):
    metric = make_black_hole(4, c, m).metric
    fd = fd_curvature(metric, x)
    assert np.max(np.abs(fd - curvature(metric, x).sectional)) < 1e-5


def test_weyl_norm_decays_along_schwarzschild():
    metric = make_black_hole(4, 1, 1.0).metric
    values = [weyl_energy_density(metric, r) for r in (2.0, 10.0, 100.0)]
    assert values[0] > values[1] > values[2]
    assert values[2] < 1e-9


def test_weyl_norm_is_scale_covariant():
    # multiplying the metric by k^2 divides |W|^2 by k^4
    base = make_black_hole(4, 1, 1.0).metric
    k = 3.0
    scaled = WarpedProductMetric(base.interval, lambda s: base.radial(s) * k,
                                 [lambda s, w=w: w(s) * k for w in base.warps], base.blocks)
    assert abs(weyl_energy_density(scaled, 2.0) * k ** 4 - weyl_energy_density(base, 2.0)) < 1e-12
    assert curvature(hyperbolic_ball(4), 1.0).norm_weyl < 1e-10


@pytest.mark.parametrize("m", [8.0, 1.0])
def test_toral_rescaling(m):
    report = toral_rescaling_isometry(m)
    assert report["max_gap"] < 1e-9
    assert abs(report["period_ratio"] - report["period_ratio_expected"]) < 1e-12


def test_toral_rescaling_is_transitive():
    a, b = make_black_hole(4, 0, 0.5), make_black_hole(4, 0, 2.0)
    for s in (1.5, 3.0, 7.0):
        wa = weyl_energy_density(a.metric, s * 0.5 ** (1 / 3))
        wb = weyl_energy_density(b.metric, s * 2.0 ** (1 / 3))
        assert abs(wa - wb) < 1e-9

