"""Volume lower-bound functions, pointwise and in the per-interval /
per-rectangle form used by the sampling sweeps."""

import math
from dataclasses import dataclass
from typing import Optional

from .caps import kappa, sigma_union
from .errors import DomainError
from .hyptrig import (
    ball_volume,
    cap_angle_theta,
    h3,
    phi_n,
    psi,
    rho_k,
    rho_short,
    v_bor,
)
from .numerics import DEFAULT_TOLERANCES

__all__ = [
    "Constants",
    "CONSTANTS",
    "BRANCH_POINT",
    "HalfOpenInterval",
    "ParamRectangle",
    "RectBounds",
    "MODES",
    "t_n",
    "grand_duke_holds",
    "grand_duke_gap",
    "delta_ab",
    "v_near_nought",
    "v_near",
    "z_gap",
    "v_far",
    "far_case",
    "m_near_nought",
    "m_near",
    "v_n",
    "v_n_star",
    "w_total",
    "w_star",
    "chi",
    "rect_bounds",
]

# v_near switches formula at this displacement
BRANCH_POINT = 0.7
MODES = ("sound", "paper_text")


@dataclass(frozen=True)
class Constants:
    delta0: float = 0.58
    lambda0: float = math.log(7.0)
    mu0: float = 1.119
    vol_threshold: float = 3.44

    def __post_init__(self):
        if not 3 * self.delta0 < self.lambda0 < 4 * self.delta0:
            raise DomainError(
                f"need 3*delta0 < lambda0 < 4*delta0, got delta0={self.delta0!r}, lambda0={self.lambda0!r}"
            )

    @property
    def h(self):
        return h3(0.5 * self.mu0)


CONSTANTS = Constants()
_H = CONSTANTS.h


@dataclass(frozen=True)
class HalfOpenInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"interval [{self.lo!r}, {self.hi!r}) is empty")

    @property
    def useful(self):
        """Inside [delta0, lambda0) with interior avoiding the branch point."""
        c = CONSTANTS
        return (c.delta0 <= self.lo and self.hi <= c.lambda0
                and not (self.lo < BRANCH_POINT < self.hi))

    def contains(self, x):
        return self.lo <= x < self.hi


@dataclass(frozen=True)
class ParamRectangle:
    l_lo: float
    l_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self):
        if not self.l_lo < self.l_hi:
            raise DomainError(f"empty length range [{self.l_lo!r}, {self.l_hi!r}]")
        if not self.y_lo <= self.y_hi:
            raise DomainError(f"empty offset range [{self.y_lo!r}, {self.y_hi!r}]")


@dataclass(frozen=True)
class RectBounds:
    chi_S: float
    V_plus: Optional[float]  # None when chi_S <= 0 and the formula does not apply
    V_minus: float
    V_N_S: float
    W_S: float
    used_plus: bool


def t_n(n, D):
    c = CONSTANTS
    if D < c.delta0:
        raise DomainError(f"T_n needs D >= delta0 = {c.delta0}, got {D!r}")
    return phi_n(n, c.delta0, D)


def grand_duke_gap(D, T3, lam, tol=DEFAULT_TOLERANCES):
    """Left side minus right side of the nesting inequality (negative means it holds)."""
    if not D < T3 < lam:
        raise DomainError(f"need D < T3 < lambda, got {(D, T3, lam)!r}")
    half = 0.5 * lam
    lhs = math.cos(cap_angle_theta(0.5 * D, half, tol) - cap_angle_theta(0.5 * T3, half, tol))
    rhs = (math.cosh(D) * math.cosh(T3) - math.cosh(2 * D)) / (math.sinh(D) * math.sinh(T3))
    return lhs - rhs


def grand_duke_holds(D, T3, lam, tol=DEFAULT_TOLERANCES):
    return grand_duke_gap(D, T3, lam, tol) < 0


def delta_ab(a, b, tol=DEFAULT_TOLERANCES):
    """Upper bound, valid for every D in [a, b], of the nesting-inequality gap
    at T3 = Phi_3(delta0, D), lambda = lambda0."""
    c = CONSTANTS
    if not c.delta0 <= a < b <= BRANCH_POINT:
        raise DomainError(f"need delta0 <= a < b <= 0.7, got a={a!r}, b={b!r}")
    half = 0.5 * c.lambda0
    phi_a = phi_n(3, c.delta0, a)
    phi_b = phi_n(3, c.delta0, b)
    angle = cap_angle_theta(0.5 * b, half, tol) - cap_angle_theta(0.5 * phi_a, half, tol)
    rhs = (1.0 / math.tanh(b)) / math.tanh(phi_b) - math.cosh(2 * b) / (math.sinh(a) * math.sinh(phi_a))
    return math.cos(angle) - rhs


def v_near_nought(D, tol=DEFAULT_TOLERANCES):
    c = CONSTANTS
    T2 = t_n(2, D)
    half = 0.5 * c.lambda0
    return ball_volume(half) - 2.0 * sigma_union(half, 0.5 * D, 0.5 * T2, psi(D, T2, tol), tol)


def v_near(D, tol=DEFAULT_TOLERANCES):
    """Lower bound for the volume of the lambda0/2-ball about the basepoint."""
    value = v_near_nought(D, tol)
    if D >= BRANCH_POINT:
        value -= 2.0 * kappa(0.5 * CONSTANTS.lambda0, 0.5 * t_n(3, D))
    return value


def z_gap(D, lam):
    return rho_k(4, D, lam) - 0.5 * lam


def far_case(Z):
    """Which of the three v_far formulas applies at gap ``Z``."""
    if Z > _H:
        return "boroczky"
    if Z > 0:
        return "ball"
    return "zero"


def _v_far_from_gap(Z, lam, tol):
    c = CONSTANTS
    r = 0.5 * c.mu0
    if Z > _H:
        return v_bor(r, _H + 0.5 * lam, tol) + ball_volume(min(r, 0.5 * (Z - _H)))
    if Z > 0:
        return ball_volume(min(r, Z))
    return 0.0


def v_far(D, lam, tol=DEFAULT_TOLERANCES):
    """Lower bound for the volume outside the lambda/2-ball."""
    return _v_far_from_gap(z_gap(D, lam), lam, tol)


def m_near_nought(I, tol=DEFAULT_TOLERANCES):
    c = CONSTANTS
    a, b = I.lo, I.hi
    T2a = phi_n(2, c.delta0, a)
    half = 0.5 * c.lambda0
    return ball_volume(half) - 2.0 * sigma_union(half, 0.5 * a, 0.5 * T2a, psi(b, T2a, tol), tol)


def m_near(I, mode="sound", tol=DEFAULT_TOLERANCES):
    """Lower bound for v_near over the useful interval ``I``.

    On [0.7, lambda0) the T3 cap is subtracted twice in ``sound`` mode (as in
    v_near itself) and once in ``paper_text`` mode.
    """
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    if not I.useful:
        raise DomainError(f"[{I.lo!r}, {I.hi!r}) is not a useful interval")
    value = m_near_nought(I, tol)
    if I.lo >= BRANCH_POINT:
        coef = 2.0 if mode == "sound" else 1.0
        value -= coef * kappa(0.5 * CONSTANTS.lambda0, 0.5 * t_n(3, I.lo))
    return value


def v_n(l, lam):
    if not (l > 0 and lam > 0):
        raise DomainError(f"v_n needs l > 0 and lambda > 0, got l={l!r}, lambda={lam!r}")
    return ball_volume(0.5 * lam) - 2.0 * kappa(0.5 * lam, 0.5 * l)


def _check_star(l, y):
    if not l > 0:
        raise DomainError(f"need l > 0, got {l!r}")
    if not y >= 0:
        raise DomainError(f"need y >= 0, got {y!r}")


def v_n_star(l, y):
    _check_star(l, y)
    return v_n(l, 2.0 * rho_short(l) + y)


def _rho4_star(l, y):
    """rho_4(l, 2 rho(l) + y), infinite at y = 0.

    The admissibility slack is 1/(1+e^{2rho}) - 1/(1+e^{2rho+y}), evaluated
    with expm1 so it stays exact near y = 0.
    """
    e = math.exp(2.0 * rho_short(l))
    slack = e * math.expm1(y) / ((1.0 + e) * (1.0 + e * math.exp(y)))
    if slack <= 0:
        return math.inf
    return 0.5 * math.log(2.0 / slack - 1.0)


def w_total(l, lam, tol=DEFAULT_TOLERANCES):
    return v_far(l, lam, tol) + v_n(l, lam)


def w_star(l, y, tol=DEFAULT_TOLERANCES):
    _check_star(l, y)
    lam = 2.0 * rho_short(l) + y
    Z = _rho4_star(l, y) - 0.5 * lam
    return _v_far_from_gap(Z, lam, tol) + v_n(l, lam)


def chi(l, y):
    _check_star(l, y)
    lam = 2.0 * rho_short(l) + y
    return _rho4_star(l, y) - (_H + 0.5 * lam)


def rect_bounds(S, chi_threshold=0.1, tol=DEFAULT_TOLERANCES):
    """Lower bound W_S for w_star over the rectangle ``S``."""
    c = CONSTANTS
    if not (S.l_lo > 0 and S.l_hi <= c.delta0 + 1e-12 and S.y_lo >= 0 and S.y_hi <= 0.5 + 1e-12):
        raise DomainError(f"rectangle {S!r} is outside (0, delta0] x [0, 0.5]")
    r = 0.5 * c.mu0
    rho_lo, rho_hi = rho_short(S.l_lo), rho_short(S.l_hi)
    lam_S = 2.0 * rho_lo + S.y_hi
    gap = rho_k(4, S.l_hi, lam_S) - 0.5 * lam_S
    chi_S = gap - _H
    V_minus = ball_volume(max(0.0, min(r, gap)))
    V_plus = None
    if chi_S > 0:
        V_plus = v_bor(r, _H + 0.5 * (2.0 * rho_hi + S.y_lo), tol) + ball_volume(min(r, 0.5 * chi_S))
    V_N_S = v_n(S.l_hi, 2.0 * rho_hi + S.y_lo)
    used_plus = chi_S > chi_threshold
    W_S = V_N_S + (V_plus if used_plus else V_minus)
    return RectBounds(chi_S, V_plus, V_minus, V_N_S, W_S, used_plus)
