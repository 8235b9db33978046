from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aheinstein.black_holes import (beta_extremum, beta_of_rplus, conformal_infinity,
                                    dbeta_drplus, extremal_mass, make_black_hole,
                                    masses_for_beta)
from aheinstein.black_holes import mass_of_rplus
from aheinstein.errors import DomainError, FiberTypeError
from aheinstein.fg_expansion import BoundaryMetric
from aheinstein.tensor_core import FiberBlock, einstein_residual

BETA_MAX = 2 * pi / sqrt(3)


@pytest.mark.parametrize("c,m,r_plus,beta", [
    (0, 0.5, 1.0, 4 * pi / 3),
    (1, 1.0, 1.0, pi),
    (-1, 0.0, 1.0, 2 * pi),
])
def test_make_black_hole_examples(c, m, r_plus, beta):
    bh = make_black_hole(4, c, m)
    assert abs(bh.r_plus - r_plus) < 1e-12
    assert abs(bh.beta - beta) < 1e-12
    assert abs(bh.V(bh.r_plus)) < 1e-12


@pytest.mark.parametrize("c,m", [(1, 0.0), (1, -0.3), (0, 0.0), (-1, -0.2)])
def test_inadmissible_masses(c, m):
    with pytest.raises(DomainError):
        make_black_hole(4, c, m)


def test_horizon_is_largest_root():
    for c, m in ((1, 0.2), (1, 7.0), (0, 3.0), (-1, -0.15), (-1, 2.0)):
        bh = make_black_hole(4, c, m)
        rs = np.linspace(bh.r_plus * (1 + 1e-9), 50 * bh.r_plus, 2000)
        assert np.all(bh.V(rs) > 0)
        # the smooth-closure period: beta = 4 pi / V'(r_+)
        dV = 2 * bh.r_plus + 2 * m / bh.r_plus ** 2
        assert abs(bh.beta - 4 * pi / dV) < 1e-12 * bh.beta


def test_five_dimensional_member():
    bh = make_black_hole(5, 1, 1.0)
    # V = 1 + r^2 - 2/r^2 vanishes at r^2 = 1
    assert abs(bh.r_plus - 1) < 1e-12
    assert einstein_residual(bh.metric, bh.r_plus + np.geomspace(1e-2, 100, 50)) < 1e-8


def test_beta_of_rplus_examples():
    assert abs(beta_of_rplus(1, 1 / sqrt(3)) - 3.627599) < 1e-6
    assert beta_of_rplus(1, 1 / sqrt(3)) == pytest.approx(BETA_MAX, abs=1e-14)
    assert beta_of_rplus(0, 2.0) == pytest.approx(2 * pi / 3, abs=1e-14)
    assert beta_of_rplus(-1, 1.0) == pytest.approx(2 * pi, abs=1e-14)


@pytest.mark.parametrize("r", [1 / sqrt(3), 0.3])
def test_beta_undefined_below_extremal_radius(r):
    with pytest.raises(DomainError):
        beta_of_rplus(-1, r)


def test_nonuniqueness_pair():
    comp = masses_for_beta(1, pi)
    masses = comp.masses
    assert len(masses) == 2
    assert abs(masses[0] - 5 / 27) < 1e-10 and abs(masses[1] - 1) < 1e-10
    radii = [m.params["r_plus"] for m in comp.black_holes]
    # 3 r^2 - 4 r + 1 = (3r - 1)(r - 1)
    assert radii == pytest.approx([1 / 3, 1.0], abs=1e-12)
    assert comp.members[-1].topology == "R3xS1"


def test_extremal_period_has_single_branch():
    comp = masses_for_beta(1, BETA_MAX)
    assert len(comp.black_holes) == 1
    assert abs(comp.masses[0] - 2 / 3 ** 1.5) < 1e-8
    assert comp.members[-1].kind == "hyperbolic_quotient"


def test_large_period_has_only_the_quotient():
    comp = masses_for_beta(1, 4.0)
    assert comp.black_holes == []
    assert [m.topology for m in comp.members] == ["R3xS1"]


def test_hyperbolic_branch_is_unique():
    comp = masses_for_beta(-1, 2 * pi)
    assert len(comp.members) == 1
    assert abs(comp.masses[0]) < 1e-12


def test_toral_branch_is_unique():
    comp = masses_for_beta(0, 4 * pi / 3)
    assert comp.masses == pytest.approx([0.5], abs=1e-12)


@given(st.floats(0.05, BETA_MAX * (1 - 1e-6)))
def test_two_preimages_below_beta_max(beta):
    comp = masses_for_beta(1, beta)
    assert len(comp.black_holes) == 2
    for member in comp.black_holes:
        assert abs(beta_of_rplus(1, member.params["r_plus"]) - beta) < 1e-10 * beta


def test_preimage_count_by_scan():
    radii = np.linspace(1e-3, 20, 1000)
    betas = beta_of_rplus(1, radii)
    for beta in (0.5, 2.0, 3.5):
        crossings = np.count_nonzero(np.diff(np.sign(betas - beta)))
        assert crossings == len(masses_for_beta(1, beta).black_holes) == 2
    assert np.all(betas <= BETA_MAX)


def test_beta_round_trip_on_branches():
    for c, radii in ((1, [0.1, 0.4, 0.9, 3.0]), (0, [0.5, 2.0]), (-1, [0.7, 1.0, 4.0])):
        for r in radii:
            bh = make_black_hole(4, c, mass_of_rplus(c, r), check=False)
            assert abs(bh.r_plus - r) < 1e-10
            assert abs(bh.beta - beta_of_rplus(c, r)) < 1e-10


def test_beta_maximum():
    (r, beta), cert = beta_extremum(1)
    assert abs(r - 1 / sqrt(3)) < 1e-9
    assert abs(beta - BETA_MAX) < 1e-9
    assert cert is None


@pytest.mark.parametrize("c", [0, -1])
def test_monotone_periods(c):
    best, cert = beta_extremum(c)
    assert best is None
    assert cert["decreasing"] and cert["max_slope"] < 0
    lo = 1 / sqrt(3) if c == -1 else 0.0
    assert cert["domain"][0] == pytest.approx(lo)
    r = np.linspace(lo + 1e-3, 10, 500)
    assert np.all(np.diff(beta_of_rplus(c, r)) < 0)
    assert np.all(dbeta_drplus(c, r) < 0)


def test_extremal_mass():
    assert abs(extremal_mass() + 3 ** -1.5) < 1e-12
    assert abs(mass_of_rplus(-1, 1 / sqrt(3)) + 3 ** -1.5) < 1e-12


def test_conformal_infinity_examples():
    sphere = conformal_infinity(make_black_hole(4, 1, 1.0))
    assert sphere.close_to(BoundaryMetric.circle_cross_sphere(pi), 1e-12)
    genus = conformal_infinity(make_black_hole(4, -1, 0.0, genus=2))
    assert genus.close_to(BoundaryMetric.circle_cross_hyperbolic(2 * pi, 2), 1e-12)
    toral = conformal_infinity(make_black_hole(4, 0, 1.0), fiber_periods=[1.0, 1.0])
    beta = 4 * pi / (3 * 2 ** (1 / 3))
    assert np.allclose(toral.gram(), np.diag([beta ** 2, 1.0, 1.0]), atol=1e-12)


def test_conformal_infinity_rejects_wrong_periods():
    with pytest.raises(FiberTypeError):
        conformal_infinity(make_black_hole(4, 0, 1.0), fiber_periods=[2.0, 1.0])
    with pytest.raises(FiberTypeError):
        conformal_infinity(make_black_hole(4, 1, 1.0), fiber_periods=[1.0])


def test_competitors_share_the_boundary():
    comp = masses_for_beta(1, 2.5)
    for member in comp.members:
        assert member.boundary.close_to(comp.boundary, 1e-8)
    for member in comp.black_holes:
        bh = make_black_hole(4, 1, member.params["m"])
        assert conformal_infinity(bh).close_to(comp.boundary, 1e-8)


def test_genus_two_fiber():
    bh = make_black_hole(4, -1, 1.0, genus=2)
    assert bh.fiber[1] == FiberBlock.hyperbolic_surface(2)
    assert bh.euler_characteristic == -2
