import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypvol.bounds import (
    CONSTANTS,
    Constants,
    HalfOpenInterval,
    ParamRectangle,
    chi,
    delta_ab,
    far_case,
    grand_duke_gap,
    grand_duke_holds,
    m_near,
    rect_bounds,
    t_n,
    v_far,
    v_n,
    v_n_star,
    v_near,
    v_near_nought,
    w_star,
    w_total,
    z_gap,
)
from hypvol.caps import kappa
from hypvol.errors import DomainError
from hypvol.hyptrig import ball_volume, h3, in_X, phi_n, rho_short
from hypvol.verify import EVIL_STAR_INTERVALS

from oracles import HalfSpace, MonteCarloVolume, angle_by_law_of_cosines, direction

C = CONSTANTS
LAM0 = math.log(7)


def _phi_cosh_form(n, delta, D):
    ch = math.cosh(n * delta)
    return math.acosh(ch + (ch - 1.0) * (math.cosh(D) - math.cosh(delta)) / (math.cosh(delta) + 1.0))


# -- constants ----------------------------------------------------------------

def test_constants():
    assert (C.delta0, C.lambda0, C.mu0, C.vol_threshold) == (0.58, LAM0, 1.119, 3.44)
    assert 3 * C.delta0 < C.lambda0 < 4 * C.delta0
    assert C.h == pytest.approx(0.67, abs=0.01)
    assert C.h == h3(C.mu0 / 2)


def test_constants_checked():
    with pytest.raises(DomainError):
        Constants(delta0=0.3)


def test_interval_and_rectangle_validation():
    with pytest.raises(DomainError):
        HalfOpenInterval(0.6, 0.6)
    with pytest.raises(DomainError):
        ParamRectangle(0.2, 0.1, 0.0, 0.1)
    assert not HalfOpenInterval(0.69, 0.71).useful
    assert HalfOpenInterval(0.69, 0.7).useful and HalfOpenInterval(0.7, 0.71).useful
    assert not HalfOpenInterval(0.5, 0.6).useful


# -- displacement terms ---------------------------------------------------------

def test_t_n_values():
    assert t_n(2, C.delta0) == pytest.approx(1.16, abs=1e-12)
    assert t_n(3, 0.7) == pytest.approx(1.766, abs=1e-3)
    assert t_n(2, LAM0) == pytest.approx(_phi_cosh_form(2, C.delta0, LAM0), rel=1e-13)
    assert t_n(2, LAM0) == pytest.approx(1.6017, abs=1e-4)
    with pytest.raises(DomainError):
        t_n(2, 0.5)


@pytest.mark.parametrize("D", [0.6, 0.69])
def test_grand_duke_examples(D):
    assert grand_duke_holds(D, t_n(3, D), LAM0)


def test_grand_duke_domain():
    with pytest.raises(DomainError):
        grand_duke_holds(0.6, 0.6, LAM0)


@pytest.mark.parametrize("a,b", EVIL_STAR_INTERVALS)
def test_delta_negative_and_dominating(a, b):
    d = delta_ab(a, b)
    assert d < 0
    for k in range(10):
        D = a + (b - a) * k / 9
        assert grand_duke_gap(D, t_n(3, D), LAM0) <= d + 1e-12


def test_delta_domain():
    with pytest.raises(DomainError):
        delta_ab(0.6, 0.75)


# -- near volume --------------------------------------------------------------

def test_v_near_nought_at_delta0_nests():
    # Psi(0.58, 1.16) = 0: the smaller cap sits inside the larger one
    half = LAM0 / 2
    assert v_near_nought(C.delta0) == pytest.approx(ball_volume(half) - 2 * kappa(half, 0.29), rel=1e-12)


@pytest.mark.slow
def test_v_near_nought_monte_carlo():
    D = 0.65
    T2 = t_n(2, D)
    angle = angle_by_law_of_cosines(D, T2, D)
    half = LAM0 / 2
    (mc, _), = MonteCarloVolume(half, seed=21).estimate(
        ("union", HalfSpace(D / 2, direction(0.0)), HalfSpace(T2 / 2, direction(angle))))
    sigma = 0.5 * (ball_volume(half) - v_near_nought(D))
    assert abs(sigma - mc) <= 5e-3 * mc


def test_v_near_at_log7():
    # at D = log 7 the D/2 cap is empty, so only the Phi_2(delta0, D)/2 cap remains
    half = LAM0 / 2
    T2 = t_n(2, LAM0)
    expected = ball_volume(half) - 2 * kappa(half, T2 / 2)
    assert v_near_nought(LAM0) == pytest.approx(expected, rel=1e-13)
    assert v_near(LAM0) == v_near_nought(LAM0)
    assert t_n(3, LAM0) == pytest.approx(2.307, abs=1e-3) and t_n(3, LAM0) > LAM0


def test_quoted_4015_is_the_half_lambda_argument():
    # the widely quoted 4.015 is what the same expression gives at D = lambda0/2
    half = LAM0 / 2
    value = ball_volume(half) - 2 * kappa(half, phi_n(2, C.delta0, half) / 2)
    assert value == pytest.approx(4.015, abs=0.003)


def test_v_near_branches():
    assert v_near(0.65) == v_near_nought(0.65)
    jump = v_near_nought(0.7) - v_near(0.7)
    assert jump == pytest.approx(2 * kappa(LAM0 / 2, t_n(3, 0.7) / 2), rel=1e-12)
    assert jump > 0


@pytest.mark.parametrize("D", [LAM0, 2.0, 2.5, 4.0])
def test_v_near_large_D(D):
    assert v_near(D) >= 3.44


# -- far volume ----------------------------------------------------------------

def test_z_gap_values():
    assert abs(z_gap(LAM0, LAM0)) < 1e-12
    assert z_gap(0.58, LAM0) > 0
    Ds = [0.58, 0.7, 0.9, 1.2, 1.5, 1.9]
    zs = [z_gap(D, LAM0) for D in Ds]
    assert all(x > y for x, y in zip(zs, zs[1:]))


def test_v_far_cases():
    # Z vanishes exactly; in floating point it is one rounding away from 0
    assert v_far(LAM0, LAM0) == pytest.approx(0.0, abs=1e-40)
    Z = z_gap(0.58, LAM0)
    assert far_case(Z) == "boroczky"
    from hypvol.hyptrig import v_bor
    r = C.mu0 / 2
    expected = v_bor(r, C.h + LAM0 / 2) + ball_volume(min(r, (Z - C.h) / 2))
    assert v_far(0.58, LAM0) == pytest.approx(expected, rel=1e-14)
    assert far_case(0.3) == "ball" and far_case(0.0) == "zero"


def test_v_far_monotone_spot():
    vals = [v_far(D, LAM0) for D in (0.58, 0.8, 1.2, 1.9)]
    assert all(x >= y for x, y in zip(vals, vals[1:]))


def test_v_far_domain():
    with pytest.raises(DomainError):
        v_far(0.1, 0.1)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.05, 3.0), st.floats(0.05, 3.0), st.floats(0.0, 1.0))
def test_v_far_nonnegative_and_monotone(D, lam, frac):
    if not in_X(D, lam):
        return
    D2 = D + frac
    v = v_far(D, lam)
    assert v >= 0.0
    assert v_far(D2, lam) <= v + 1e-12


# -- interval bounds -------------------------------------------------------------

def test_m_near_paper_minimum():
    I = HalfOpenInterval(0.5971, 0.598)
    assert m_near(I, "paper_text") + v_far(0.598, LAM0) == pytest.approx(3.4409, abs=0.002)
    assert m_near(I, "sound") == m_near(I, "paper_text")


def test_m_near_modes_differ_above_branch():
    I = HalfOpenInterval(0.8, 0.85)
    diff = m_near(I, "paper_text") - m_near(I, "sound")
    assert diff == pytest.approx(kappa(LAM0 / 2, t_n(3, 0.8) / 2), rel=1e-12)


def test_m_near_rejects():
    with pytest.raises(DomainError):
        m_near(HalfOpenInterval(0.69, 0.71))
    with pytest.raises(DomainError):
        m_near(HalfOpenInterval(0.6, 0.61), mode="loose")


@pytest.mark.parametrize("a,b", [(0.58, 0.59), (0.5971, 0.598), (0.65, 0.7), (0.7, 0.75), (1.5, 1.9)])
def test_m_near_dominated(a, b):
    I = HalfOpenInterval(a, b)
    m = m_near(I, "sound")
    for k in range(10):
        D = a + (b - a) * k / 10
        assert m <= v_near(D) + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.floats(C.delta0, LAM0 - 0.011), st.floats(0.001, 0.01), st.randoms(use_true_random=False))
def test_interval_domination_property(a, width, rnd):
    b = a + width
    I = HalfOpenInterval(a, b)
    if not I.useful:
        return
    bound = m_near(I, "sound") + v_far(b, LAM0)
    for _ in range(20):
        D = rnd.uniform(a, b)
        assert bound <= v_near(D) + v_far(D, LAM0) + 1e-10


# -- short geodesic --------------------------------------------------------------

def test_v_n_values():
    assert v_n(1.0, 0.8) == ball_volume(0.4)
    assert v_n_star(C.delta0, 0.5) == pytest.approx(3.557, abs=0.002)
    assert v_n_star(C.delta0, 0.5) == v_n(C.delta0, 2 * rho_short(C.delta0) + 0.5)


def test_v_n_monotone_grid():
    # at fixed lambda a longer l means a smaller cap, so v_n grows with l
    ls = [0.1, 0.3, 0.5, 0.7]
    lams = [1.0, 1.5, 2.0, 2.5]
    grid = [[v_n(l, lam) for lam in lams] for l in ls]
    for row in grid:
        assert all(x <= y for x, y in zip(row, row[1:]))
    for col in zip(*grid):
        assert all(x <= y for x, y in zip(col, col[1:]))


def test_v_n_star_monotone_grid():
    # along lambda = 2 rho(l) + y the shrinking lambda wins: decreasing in l,
    # increasing in y, which is what makes V_N^S = v_n_star(l_hi, y_lo) a bound
    ls = [0.003, 0.1, 0.3, 0.58]
    ys = [0.0, 0.15, 0.3, 0.5]
    grid = [[v_n_star(l, y) for y in ys] for l in ls]
    for row in grid:
        assert all(a <= b for a, b in zip(row, row[1:]))
    for col in zip(*grid):
        assert all(a >= b for a, b in zip(col, col[1:]))


def test_w_star_composition():
    l, y = 0.3, 0.1
    lam = 2 * rho_short(l) + y
    assert w_star(l, y) == pytest.approx(v_far(l, lam) + v_n(l, lam), rel=1e-12)
    assert w_total(l, lam) == pytest.approx(w_star(l, y), rel=1e-12)
    assert w_star(C.delta0, 0.5) >= v_n_star(C.delta0, 0.5)


def test_chi_drives_branch():
    for l, y in [(0.1, 0.05), (0.3, 0.2), (0.58, 0.5)]:
        lam = 2 * rho_short(l) + y
        expected = "boroczky" if chi(l, y) > 0 else "ball"
        assert far_case(z_gap(l, lam)) in (expected, "zero")
        if chi(l, y) > 0:
            assert far_case(z_gap(l, lam)) == "boroczky"


def test_chi_infinite_at_y0():
    assert chi(0.3, 0.0) == math.inf


def test_rect_paper_minimum():
    b = rect_bounds(ParamRectangle(0.579, 0.58, 0.145, 0.15))
    assert b.W_S == pytest.approx(3.4511, abs=0.002)


def test_rect_domain():
    with pytest.raises(DomainError):
        rect_bounds(ParamRectangle(0.5, 0.7, 0.0, 0.1))


def _random_rect(rng):
    l0 = rng.uniform(0.003, 0.57)
    l1 = min(l0 + rng.uniform(0.001, 0.01), 0.58)
    y0 = rng.uniform(0.0, 0.49)
    y1 = min(y0 + rng.uniform(0.001, 0.01), 0.5)
    return ParamRectangle(l0, l1, y0, y1)


def test_rect_dual_bounds():
    rng = random.Random(5)
    seen = 0
    while seen < 30:
        b = rect_bounds(_random_rect(rng))
        if b.chi_S > 0.1:
            assert b.V_minus <= b.V_plus
            seen += 1


def test_rect_domination():
    rng = random.Random(6)
    for _ in range(5):
        S = _random_rect(rng)
        W = rect_bounds(S).W_S
        for _ in range(10):
            assert W <= w_star(rng.uniform(S.l_lo, S.l_hi), rng.uniform(S.y_lo, S.y_hi)) + 1e-10
