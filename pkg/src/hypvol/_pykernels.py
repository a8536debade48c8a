"""Pure-Python hot kernels. ``_kernels.pyx`` mirrors this module line for line;
keep the two in sync."""

import math

from .errors import ConvergenceError
from .numerics import MAX_PANELS, Tolerances, integrate_adaptive, sinh_minus_x

BACKEND = "python"


def kappa(R, w):
    """Cap volume for 0 < w < R (callers handle the boundary cases).

    Slicing the cap parallel to its plane gives
    kappa = B(R - w)/2 + pi tanh(w) sinh^2(R - w), with no cancellation.
    """
    S = R - w
    return math.pi * (0.5 * sinh_minus_x(2.0 * S) + math.tanh(w) * math.sinh(S) ** 2)


def perp_inner(theta, R, m, c, v, rho, mu):
    """Closed-form r-integral of r/L^2 - r/U^2 from m sec(theta) to eps(theta)."""
    ct, st = math.cos(theta), math.sin(theta)
    r_lo = m / ct
    r_hi = rho * mu / math.sqrt(ct * ct + rho * rho * st * st)
    if r_hi <= r_lo:
        return 0.0
    ch, sh = math.cosh(R), math.sinh(R)

    # lower boundary: L = cosh R - sqrt(a2 - u^2), u = r - m cos(theta)
    p = m * ct
    a2 = sh * sh - (m * st) ** 2
    a = math.sqrt(a2)
    g = 1.0 + (m * st) ** 2  # cosh^2 R - a^2
    k = math.sqrt((ch + a) / (ch - a))

    def lower_prim(r):
        u = r - p
        s = math.sqrt(max(a2 - u * u, 0.0))
        L = ch - s
        atan_term = math.atan(k * u / (a + s))
        return (-ch / L - math.log(L)
                + p * (ch * u / (g * L) + 2.0 * a2 / (g * math.sqrt(g)) * atan_term))

    # upper boundary: U^2 = b2 - s^2, s = r + (c - m) cos(theta)
    q = (c - m) * ct
    b2 = v * v - ((c - m) * st) ** 2
    b = math.sqrt(b2)
    s_lo, s_hi = r_lo + q, r_hi + q
    u2_lo = max(b2 - s_lo * s_lo, 0.0)
    u2_hi = max(b2 - s_hi * s_hi, 0.0)
    x, y = s_hi / b, s_lo / b
    atanh_diff = 0.5 * (math.log1p(x) - math.log1p(-x) - math.log1p(y) + math.log1p(-y))
    upper = -0.5 * math.log(u2_hi / u2_lo) - (q / b) * atanh_diff

    return lower_prim(r_hi) - lower_prim(r_lo) - upper


def perp_integral(R, m, c, v, rho, mu, theta0, quad_abs, quad_rel, max_panels=MAX_PANELS):
    """Integrate ``perp_inner`` over theta in [0, theta0].

    Returns ``(value, error_estimate, panels)``.
    """
    tol = Tolerances(quad_abs=quad_abs, quad_rel=quad_rel)
    res = integrate_adaptive(
        lambda t: perp_inner(t, R, m, c, v, rho, mu), 0.0, theta0, tol, max_panels
    )
    return res.value, res.error_estimate, res.subdivisions


__all__ = ["BACKEND", "kappa", "perp_inner", "perp_integral", "ConvergenceError"]
