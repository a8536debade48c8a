import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hypvol.caps import (
    CapSpec,
    circle_intersection,
    halfplane_distance,
    iota_general,
    iota_perp,
    iota_perp_slices,
    iota_zero_axis,
    kappa,
    perp_geometry,
    sigma_union,
    split_angles,
)
from hypvol.errors import DomainError
from hypvol.hyptrig import ball_volume, cap_angle_theta

from oracles import HalfSpace, MonteCarloVolume, cap_volume_fermi, direction, uhs_distance

MC_TOL = 5e-3


# -- kappa ---------------------------------------------------------------------

def test_kappa_empty_cap():
    assert kappa(1.0, 1.5) == 0.0
    assert kappa(1.0, 1.0) == 0.0
    assert CapSpec(1.0, 1.5).empty and CapSpec(1.0, 1.5).volume() == 0.0


def test_kappa_half_ball():
    assert kappa(0.8, 0.0) == 0.5 * ball_volume(0.8)


@pytest.mark.parametrize("R,w", [(1.0, 0.4), (0.3, 0.01), (2.0, 1.9), (1.0, 1e-9), (3.0, 0.5),
                                 (0.05, 0.049), (1.0, 0.999999)])
def test_kappa_against_slicing(R, w):
    assert kappa(R, w) == pytest.approx(cap_volume_fermi(R, w), rel=1e-11, abs=1e-300)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.01, 3.0), st.floats(0.0, 1.0))
def test_kappa_monotone_and_bounded(R, frac):
    w = frac * R
    k = kappa(R, w)
    assert 0.0 <= k <= 0.5 * ball_volume(R) * (1 + 1e-12)
    if w + 0.01 * R < R:
        assert kappa(R, w + 0.01 * R) <= k


def test_kappa_monte_carlo():
    (mc, _), = MonteCarloVolume(1.0, seed=11).estimate([HalfSpace(0.4, direction(0.0))])
    assert abs(kappa(1.0, 0.4) - mc) <= MC_TOL * mc


def test_kappa_domain():
    with pytest.raises(DomainError):
        kappa(0.0, 0.1)
    with pytest.raises(DomainError):
        kappa(1.0, -0.1)


def test_capspec_validation():
    with pytest.raises(DomainError):
        CapSpec(1.0, 0.5, 4.0)


# -- the obtuse two-cap geometry ------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 2.0), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_perp_geometry_invariants(R, wf, af):
    w = wf * R
    alpha = 0.5 * math.pi + af * 0.5 * math.pi
    g = perp_geometry(R, w, alpha)
    assert g.v ** 2 - (g.v ** 2 + g.c ** 2 + 1) ** 2 / (4 * (g.c ** 2 + math.cosh(R) ** 2)) >= -1e-12
    if not g.disjoint:
        for k in range(-10, 11):
            th = g.theta0 * k / 10
            assert g.m / math.cos(th) <= g.boundary_radius(th) * (1 + 1e-9) + 1e-12


def test_iota_perp_monte_carlo():
    (mc, _), = MonteCarloVolume(1.0, seed=12).estimate(
        [HalfSpace(0.4, direction(0.0)), HalfSpace(0.0, direction(2.0))])
    assert abs(iota_perp(1.0, 0.4, 2.0) - mc) <= MC_TOL * mc


def test_iota_perp_vanishes_towards_pi():
    assert iota_perp(1.0, 0.4, math.pi - 1e-6) < 1e-12
    assert iota_zero_axis(1.0, 0.4, math.pi) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.floats(0.2, 2.0), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_perp_closed_form_matches_slicing(R, wf, af):
    # two independent derivations of the same volume
    w = wf * R
    alpha = 0.5 * math.pi * (1 + af)
    if perp_geometry(R, w, alpha).v > 16:
        return
    closed = kernels_perp(R, w, alpha)
    assert closed == pytest.approx(iota_perp_slices(R, w, alpha), rel=1e-8, abs=1e-11)


def kernels_perp(R, w, alpha):
    from hypvol._backend import kernels
    g = perp_geometry(R, w, alpha)
    if g.disjoint or g.theta0 == 0.0:
        return 0.0
    return kernels.perp_integral(g.R, g.m, g.c, g.v, g.rho, g.mu, g.theta0, 1e-12, 1e-12)[0]


@pytest.mark.parametrize("eps", [1e-3, 1e-5, 1e-7])
def test_thin_sliver_scales_linearly(eps):
    # near-antipodal cap close to the centre: volume proportional to the opening
    v1 = iota_perp(1.0, 0.3 * eps, math.pi - eps)
    v2 = iota_perp(1.0, 0.6 * eps, math.pi - 2 * eps)
    assert v1 > 0 and v2 == pytest.approx(2 * v1, rel=1e-3)


def test_tiny_angle_is_coaxial():
    assert iota_zero_axis(1.0, 0.4, 5e-324) == kappa(1.0, 0.4)


def test_tiny_plane_distance_split():
    v = iota_general(1.0, 7e-97, 0.5, 1.0)
    assert v == pytest.approx(iota_general(1.0, 0.0, 0.5, 1.0), rel=1e-9)


def test_complements_spot():
    r = iota_zero_axis(1.0, 0.4, 1.9) + iota_zero_axis(1.0, 0.4, math.pi - 1.9) - kappa(1.0, 0.4)
    assert abs(r) < 1e-6


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 2.0), st.floats(0.01, 0.99), st.floats(0.0, 0.5 * math.pi))
def test_complements_identity(R, wf, alpha):
    w = wf * R
    r = iota_zero_axis(R, w, alpha) + iota_zero_axis(R, w, math.pi - alpha) - kappa(R, w)
    assert abs(r) < 1e-6


def test_zero_axis_dispatch():
    R, w = 1.0, 0.4
    assert iota_zero_axis(R, w, 0.0) == kappa(R, w)
    assert iota_zero_axis(R, w, 0.5 * math.pi) == 0.5 * kappa(R, w)
    assert iota_zero_axis(R, 1.2, 0.3) == 0.0
    # two half-balls meet in a lune
    assert iota_zero_axis(R, 0.0, 1.0) == pytest.approx(ball_volume(R) * (math.pi - 1.0) / (2 * math.pi))


def test_zero_axis_acute_monte_carlo():
    (mc, _), = MonteCarloVolume(1.0, seed=13).estimate(
        [HalfSpace(0.4, direction(0.0)), HalfSpace(0.0, direction(0.8))])
    assert abs(iota_zero_axis(1.0, 0.4, 0.8) - mc) <= MC_TOL * mc


def test_zero_axis_domain():
    with pytest.raises(DomainError):
        iota_zero_axis(1.0, 0.4, 3.5)


# -- splitting the angle --------------------------------------------------------------

def test_split_residual():
    w1, w2, alpha = 0.3, 0.5, 1.2
    a1, a2 = split_angles(w1, w2, alpha)
    assert abs(a1 + a2 - alpha) < 1e-15
    assert abs(math.tanh(w1) * math.cos(a2) - math.tanh(w2) * math.cos(a1)) < 1e-10


@settings(max_examples=300, deadline=None)
@given(st.floats(0.01, 2.0), st.floats(0.0, 1.0), st.floats(0.01, math.pi - 0.01))
def test_split_matches_closed_form(w1, extra, alpha):
    w2 = w1 + extra
    a1, _ = split_angles(w1, w2, alpha)
    # tan(alpha1) = (tanh w2 / tanh w1 - cos alpha) / sin alpha
    expected = math.atan((math.tanh(w2) / math.tanh(w1) - math.cos(alpha)) / math.sin(alpha))
    assert abs(a1 - expected) < 1e-10
    assert alpha - 0.5 * math.pi - 1e-12 <= a1 <= 0.5 * math.pi + 1e-12


def test_split_domain():
    with pytest.raises(DomainError):
        split_angles(0.5, 0.3, 1.0)


# -- general intersection and union ---------------------------------------------------

def test_iota_general_monte_carlo():
    (mc, _), = MonteCarloVolume(1.0, seed=14).estimate(
        [HalfSpace(0.3, direction(0.0)), HalfSpace(0.5, direction(1.2))])
    assert abs(iota_general(1.0, 0.3, 0.5, 1.2) - mc) <= MC_TOL * mc


def test_iota_general_cases():
    R, w1, w2 = 1.0, 0.3, 0.5
    p1, p2 = cap_angle_theta(w1, R), cap_angle_theta(w2, R)
    assert iota_general(R, w1, w2, 0.5 * (p1 - p2)) == kappa(R, w2)
    assert iota_general(R, w1, w2, p1 + p2 + 0.01) == 0.0
    assert iota_general(R, w1, 1.5, 0.3) == 0.0
    assert iota_general(R, 0.0, w2, 2.0) == iota_zero_axis(R, w2, 2.0)


@settings(max_examples=150, deadline=None)
@given(st.floats(0.2, 2.0), st.floats(0.0, 0.99), st.floats(0.0, 0.99), st.floats(0.0, math.pi))
def test_iota_bounds_and_symmetry(R, f1, f2, alpha):
    w1, w2 = f1 * R, f2 * R
    v = iota_general(R, w1, w2, alpha)
    assert v == iota_general(R, w2, w1, alpha)
    assert 0.0 <= v <= min(kappa(R, w1), kappa(R, w2))


def test_sigma_inclusion_exclusion():
    s = sigma_union(1.0, 0.3, 0.5, 1.2)
    assert s == kappa(1.0, 0.3) + kappa(1.0, 0.5) - iota_general(1.0, 0.3, 0.5, 1.2)


def test_sigma_monotone_grid():
    R, w = 0.9729550745276566, 0.3
    wps = [0.3, 0.4, 0.5, 0.6, 0.7, 0.8]
    alphas = [0.0, 0.3, 0.6, 0.9, 1.2, 1.5, 1.8, 2.1, 2.4]
    grid = [[sigma_union(R, w, wp, a) for a in alphas] for wp in wps]
    for row in grid:
        assert all(x <= y + 1e-9 for x, y in zip(row, row[1:]))
    for col in zip(*grid):
        assert all(x >= y - 1e-9 for x, y in zip(col, col[1:]))


# -- Euclidean helpers --------------------------------------------------------------

def test_circle_intersection():
    radius, offset = circle_intersection(3.0, 4.0, 5.0)
    assert radius == pytest.approx(12 / 5) and offset == pytest.approx(9 / 5)
    with pytest.raises(DomainError):
        circle_intersection(3.0, 4.0, 7.0)


@pytest.mark.parametrize("theta", [0.0, 0.3, 1.0, 1.5])
def test_halfplane_distance(theta):
    # the top of the unit geodesic semicircle to the point at angle theta on it
    d = uhs_distance((0.0, 0.0, 1.0), (math.sin(theta), 0.0, math.cos(theta)))
    assert halfplane_distance(theta) == pytest.approx(d, rel=1e-12, abs=1e-12)


def test_halfplane_domain():
    with pytest.raises(DomainError):
        halfplane_distance(0.5 * math.pi)
