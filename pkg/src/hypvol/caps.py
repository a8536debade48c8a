"""Volumes of caps of a hyperbolic ball and of intersections/unions of two caps.

A cap is the part of the closed ball of radius ``R`` beyond a plane at
distance ``w`` from the centre, perpendicular to a ray from the centre.
Two caps of the same ball are described by their plane distances and the
angle ``alpha`` between their rays.
"""

import math
from dataclasses import dataclass

from ._backend import kernels
from .errors import ConsistencyError, DomainError
from .hyptrig import ball_volume, cap_angle_theta
from .numerics import DEFAULT_TOLERANCES, Tolerances, integrate_adaptive, safe_inverse, solve_bracketed

__all__ = [
    "CapSpec",
    "PerpCapGeometry",
    "kappa",
    "perp_geometry",
    "iota_perp",
    "iota_perp_slices",
    "iota_zero_axis",
    "split_angles",
    "iota_general",
    "sigma_union",
    "circle_intersection",
    "halfplane_distance",
]

HALF_PI = 0.5 * math.pi
# beyond this hemisphere radius the closed-form inner integral cancels badly
# (about v^2 * 1e-16 relative) and iota_perp switches to slicing
PERP_V_MAX = 16.0


@dataclass(frozen=True)
class CapSpec:
    ball_radius: float
    plane_distance: float
    direction: float = 0.0

    def __post_init__(self):
        if not self.ball_radius > 0:
            raise DomainError(f"ball radius must be positive, got {self.ball_radius!r}")
        if not self.plane_distance >= 0:
            raise DomainError(f"plane distance must be non-negative, got {self.plane_distance!r}")
        if not 0 <= self.direction <= math.pi:
            raise DomainError(f"direction must lie in [0, pi], got {self.direction!r}")

    @property
    def empty(self):
        return self.plane_distance >= self.ball_radius

    def volume(self):
        return kappa(self.ball_radius, self.plane_distance)


@dataclass(frozen=True)
class PerpCapGeometry:
    """Upper half-space data for a half-ball meeting an obtuse cap.

    ``v`` and ``c`` are the Euclidean radius and (negated) centre abscissa
    of the cap's bounding hemisphere, ``mu`` the radius of the circle where
    it meets the ball's sphere, ``rho`` the axis ratio of that circle's
    vertical projection and ``m`` the offset of the projected centre.
    """

    R: float
    v: float
    c: float
    mu: float
    rho: float
    m: float
    theta0: float

    @property
    def disjoint(self):
        return self.m > self.rho * self.mu

    def boundary_radius(self, theta):
        ct, st = math.cos(theta), math.sin(theta)
        return self.rho * self.mu / math.sqrt(ct * ct + self.rho * self.rho * st * st)


def kappa(R, w):
    """Volume of a cap of a ball of radius ``R`` cut off at distance ``w``."""
    if not R > 0:
        raise DomainError(f"ball radius must be positive, got {R!r}")
    if not w >= 0:
        raise DomainError(f"plane distance must be non-negative, got {w!r}")
    if w >= R:
        return 0.0
    if w == 0:
        return 0.5 * ball_volume(R)
    return kernels.kappa(R, w)


def perp_geometry(R, w, alpha, tol=DEFAULT_TOLERANCES):
    """Build the geometry for a half-ball and a cap at distance ``w`` whose
    rays meet at the obtuse angle ``alpha``."""
    if not 0 < w < R:
        raise DomainError(f"need 0 < w < R, got w={w!r}, R={R!r}")
    if not HALF_PI < alpha < math.pi:
        raise DomainError(f"need pi/2 < alpha < pi, got {alpha!r}")
    phi = alpha - HALF_PI
    v = 1.0 / (math.sinh(w) + math.cosh(w) * math.cos(phi))
    c = v * math.sin(phi) * math.cosh(w)
    dist2 = c * c + math.cosh(R) ** 2
    k = (v * v + c * c + 1.0) / (2.0 * dist2)
    radicand = v * v - 0.5 * k * (v * v + c * c + 1.0)
    if radicand < 0:
        if radicand < -tol.domain_clamp:
            raise ConsistencyError(f"circle radius squared is negative ({radicand!r})")
        radicand = 0.0
    mu = math.sqrt(radicand)
    rho = math.cosh(R) / math.sqrt(dist2)
    m = c - c * k
    slack = (rho * mu) ** 2 - m * m
    theta0 = math.atan2(math.sqrt(slack), m * rho) if slack > 0 else 0.0
    return PerpCapGeometry(R, v, c, mu, rho, m, theta0)


def iota_perp(R, w, alpha, tol=DEFAULT_TOLERANCES):
    """Volume of (half-ball) ∩ (cap at distance ``w``) for an obtuse angle
    ``alpha`` between their rays."""
    g = perp_geometry(R, w, alpha, tol)
    if g.disjoint or g.theta0 == 0.0:
        return 0.0
    if g.v > PERP_V_MAX:
        return iota_perp_slices(R, w, alpha, tol)
    value, _, _ = kernels.perp_integral(
        g.R, g.m, g.c, g.v, g.rho, g.mu, g.theta0, tol.quad_abs, tol.quad_rel
    )
    return max(value, 0.0)


def iota_perp_slices(R, w, alpha, tol=DEFAULT_TOLERANCES):
    """``iota_perp`` by slicing parallel to the cap's plane.

    A point at distance s beyond the plane whose foot lies at distance r and
    angle phi from the foot of the centre is in the half-ball iff
    cos(phi) >= (A cosh r + B) / (C sinh r), with A, B, C below; the phi
    range is then 2 arccos of that bound. The r-range starts where the bound
    reaches 1 (explicit, r = r0 + asinh(B / sqrt(C^2 - A^2)) with
    tanh r0 = A/C) and the square-root edge there is removed by r = r* + t^2.
    Well conditioned however thin the intersection is.
    """
    if not 0 < w < R:
        raise DomainError(f"need 0 < w < R, got w={w!r}, R={R!r}")
    if not HALF_PI < alpha < math.pi:
        raise DomainError(f"need pi/2 < alpha < pi, got {alpha!r}")
    sw, cw, chR = math.sinh(w), math.cosh(w), math.cosh(R)
    ca, sa = -math.cos(alpha), math.sin(alpha)
    if sa <= ca * sw:
        return 0.0  # the cap lies entirely beyond the half-ball's plane
    r0 = math.atanh(ca * sw / sa)
    gap = math.sqrt(sa * sa - (ca * sw) ** 2)

    def r_range(s):
        r_max = safe_inverse("arccosh", max((chR - math.sinh(s) * sw) / (math.cosh(s) * cw), 1.0), tol)
        r_star = r0 + math.asinh(ca * cw * math.tanh(s) / gap)
        return r_star, r_max

    inner_tol = Tolerances(quad_abs=0.1 * tol.quad_abs, quad_rel=0.1 * tol.quad_rel,
                           root_tol=tol.root_tol, domain_clamp=tol.domain_clamp)

    def slice_area(s):
        r_star, r_max = r_range(s)
        if r_star >= r_max:
            return 0.0
        cs, ss = math.cosh(s), math.sinh(s)
        A, B, C = ca * cs * sw, ca * ss * cw, cs * sa

        def f(t):
            r = r_star + t * t
            sh = math.sinh(r)
            if sh <= 0:
                return 0.0
            bound = (A * math.cosh(r) + B) / (C * sh)
            return 4.0 * t * sh * math.acos(min(bound, 1.0))

        return integrate_adaptive(f, 0.0, math.sqrt(r_max - r_star), inner_tol).value

    def gap_at(s):
        r_star, r_max = r_range(s)
        return r_max - r_star

    if gap_at(0.0) <= 0:
        return 0.0
    s_end = solve_bracketed(gap_at, 0.0, R - w, tol)
    outer = integrate_adaptive(lambda s: math.cosh(s) ** 2 * slice_area(s), 0.0, s_end, tol)
    return outer.value


def iota_zero_axis(R, w, alpha, tol=DEFAULT_TOLERANCES):
    """Volume of (half-ball) ∩ (cap at distance ``w``), any angle in [0, pi]."""
    if not R > 0:
        raise DomainError(f"ball radius must be positive, got {R!r}")
    if not w >= 0:
        raise DomainError(f"plane distance must be non-negative, got {w!r}")
    if not 0 <= alpha <= math.pi:
        raise DomainError(f"alpha must lie in [0, pi], got {alpha!r}")
    if w >= R:
        return 0.0
    if alpha == 0:
        return kappa(R, w)
    if alpha == math.pi:
        return 0.0
    if alpha == HALF_PI:
        return 0.5 * kappa(R, w)
    if w == 0:
        # two half-balls: a lune of dihedral angle pi - alpha
        return ball_volume(R) * (math.pi - alpha) / (2.0 * math.pi)
    if alpha > HALF_PI:
        return iota_perp(R, w, alpha, tol)
    beta = math.pi - alpha
    if beta >= math.pi:
        # alpha below rounding of pi: the coaxial case
        return kappa(R, w)
    return kappa(R, w) - iota_perp(R, w, beta, tol)


def split_angles(w1, w2, alpha, tol=DEFAULT_TOLERANCES):
    """Split ``alpha`` as alpha1 + alpha2 with tanh(w1) cos(alpha2) = tanh(w2) cos(alpha1).

    alpha1 is the root of tanh(w1) cos(alpha - x) - tanh(w2) cos(x) on
    [alpha - pi/2, pi/2]. Dividing by cos(x) turns this into
    tanh(w1) (sin(alpha) tan(x) + cos(alpha)) = tanh(w2), increasing in x,
    so the sign change is unique. We solve for y = pi/2 - x, where the
    function reads tanh(w1) sin(pi - alpha - y) - tanh(w2) sin(y) and both
    bracket ends are exact; this matters when w1 is tiny and y is near 0.
    """
    if not 0 < w1 <= w2:
        raise DomainError(f"need 0 < w1 <= w2, got w1={w1!r}, w2={w2!r}")
    if not 0 < alpha < math.pi:
        raise DomainError(f"need 0 < alpha < pi, got {alpha!r}")
    t1, t2 = math.tanh(w1), math.tanh(w2)

    beta = math.pi - alpha

    def g(y):
        return t1 * math.sin(beta - y) - t2 * math.sin(y)

    try:
        a1 = HALF_PI - solve_bracketed(g, 0.0, beta, tol)
    except Exception as exc:
        raise ConsistencyError(f"angle split failed for {(w1, w2, alpha)!r}: {exc}") from exc
    return a1, alpha - a1


def iota_general(R, w1, w2, alpha, tol=DEFAULT_TOLERANCES):
    """Volume of the intersection of two caps of a ball of radius ``R`` at
    distances ``w1``, ``w2`` whose rays meet at angle ``alpha``."""
    if not R > 0:
        raise DomainError(f"ball radius must be positive, got {R!r}")
    if not (w1 >= 0 and w2 >= 0):
        raise DomainError(f"plane distances must be non-negative, got {w1!r}, {w2!r}")
    if not 0 <= alpha <= math.pi:
        raise DomainError(f"alpha must lie in [0, pi], got {alpha!r}")
    if w1 > w2:
        w1, w2 = w2, w1
    if w2 >= R:
        return 0.0
    if w1 == 0:
        return iota_zero_axis(R, w2, alpha, tol)
    psi1 = cap_angle_theta(w1, R, tol)
    psi2 = cap_angle_theta(w2, R, tol)
    if alpha <= psi1 - psi2:
        return kappa(R, w2)
    if alpha > psi1 + psi2:
        return 0.0
    a1, a2 = split_angles(w1, w2, alpha, tol)
    # both targets lie in [0, pi]; clamp rounding at the ends
    b1 = min(max(a1 + HALF_PI, 0.0), math.pi)
    b2 = min(max(a2 + HALF_PI, 0.0), math.pi)
    value = iota_zero_axis(R, w1, b1, tol) + iota_zero_axis(R, w2, b2, tol)
    return min(max(value, 0.0), kappa(R, w2))


def sigma_union(R, w, wp, alpha, tol=DEFAULT_TOLERANCES):
    """Volume of the union of two caps (inclusion-exclusion)."""
    return kappa(R, w) + kappa(R, wp) - iota_general(R, w, wp, alpha, tol)


def circle_intersection(r1, r2, D):
    """Radius of the circle where two Euclidean spheres meet, and the
    distance from the first centre to the circle's centre."""
    if not abs(r1 - r2) < D < r1 + r2:
        raise DomainError(f"spheres with radii {r1!r}, {r2!r} at distance {D!r} do not meet in a circle")
    offset = (r1 * r1 + D * D - r2 * r2) / (2.0 * D)
    return math.sqrt(r1 * r1 - offset * offset), offset


def halfplane_distance(theta, tol=DEFAULT_TOLERANCES):
    """Hyperbolic length of the arc of a geodesic semicircle from its top to
    the point at Euclidean angle ``theta`` from the vertical.

    cosh of the result equals sec(theta).
    """
    if not 0 <= theta < HALF_PI:
        raise DomainError(f"theta must lie in [0, pi/2), got {theta!r}")
    return safe_inverse("arccosh", 1.0 / math.cos(theta), tol)
