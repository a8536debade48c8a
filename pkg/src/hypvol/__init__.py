"""Hyperbolic ball and cap volumes, packing-density bounds and the grid
checks built from them."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .bounds import (
    CONSTANTS,
    Constants,
    HalfOpenInterval,
    ParamRectangle,
    chi,
    delta_ab,
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
from .caps import CapSpec, iota_general, iota_zero_axis, kappa, sigma_union
from .errors import BracketError, ConsistencyError, ConvergenceError, DomainError, HypvolError
from .hyptrig import (
    LoxodromicParams,
    ball_volume,
    boroczky_density,
    boroczky_profile,
    cap_angle_theta,
    cylinder_radius,
    h2,
    h3,
    omega,
    phi_n,
    psi,
    rho_k,
    rho_short,
    v_bor,
)
from .numerics import DEFAULT_TOLERANCES, Tolerances, integrate_adaptive, safe_inverse, solve_bracketed
from .verify import GridSpec, VerificationReport, verify_evil_star, verify_no_short_geodesic, verify_short_geodesic
