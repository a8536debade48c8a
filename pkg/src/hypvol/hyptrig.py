"""Hyperbolic trigonometry and the Böröczky packing-density machinery."""

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError
from .numerics import DEFAULT_TOLERANCES, integrate_adaptive, safe_inverse, sinh_minus_x

__all__ = [
    "LoxodromicParams",
    "BoroczkyProfile",
    "ball_volume",
    "omega",
    "cylinder_radius",
    "phi_n",
    "psi",
    "cap_angle_theta",
    "sigma_dist",
    "in_X",
    "rho_k",
    "rho_short",
    "h_n",
    "h2",
    "h3",
    "tetrahedron_volume",
    "boroczky_profile",
    "boroczky_density",
    "v_bor",
]

ARCSEC3 = math.acos(1.0 / 3.0)


@dataclass(frozen=True)
class LoxodromicParams:
    length: float
    twist: float = 0.0

    def __post_init__(self):
        if not self.length > 0:
            raise DomainError(f"translation length must be positive, got {self.length!r}")


@dataclass(frozen=True)
class BoroczkyProfile:
    radius: float
    beta: float
    tau: float
    density: float
    h2: float
    h3: float


def ball_volume(r):
    """Volume of a hyperbolic ball of radius ``r``: pi*(sinh 2r - 2r)."""
    if not r >= 0:
        raise DomainError(f"ball radius must be non-negative, got {r!r}")
    return math.pi * sinh_minus_x(2.0 * r)


def omega(l, theta, D, tol=DEFAULT_TOLERANCES):
    """Distance to the axis of a loxodromic (length ``l``, twist ``theta``)
    from a point that it displaces by ``D``."""
    if not l > 0:
        raise DomainError(f"translation length must be positive, got {l!r}")
    if D < l:
        raise DomainError(f"displacement D={D!r} is below the translation length l={l!r}")
    num = 2.0 * math.sinh(0.5 * (D + l)) * math.sinh(0.5 * (D - l))
    den = 2.0 * math.sinh(0.5 * l) ** 2 + 2.0 * math.sin(0.5 * theta) ** 2
    if den <= 0:
        raise DomainError("cosh l - cos theta vanishes")
    return math.asinh(math.sqrt(num / den))


def _term_count(lam, l):
    q = lam / l
    n = math.floor(q)
    # absorb last-bit noise when lam/l is an integer
    if q - n > 1.0 - 4 * math.ulp(q):
        n += 1
    return int(n)


def cylinder_radius(lam, lox):
    """Radius of the cylinder of points displaced by less than ``lam`` by some
    non-trivial power of the loxodromic ``lox``."""
    if lox.length >= lam:
        raise DomainError(
            f"translation length {lox.length!r} >= lambda {lam!r}: the cylinder is empty"
        )
    nmax = _term_count(lam, lox.length)
    # a term with n*l == lam (up to rounding) contributes radius 0
    return max(
        omega(n * lox.length, n * lox.twist, lam) if n * lox.length < lam else 0.0
        for n in range(1, nmax + 1)
    )


def phi_n(n, delta, D):
    """Lower bound for the displacement of the n-th power of an isometry of
    translation length at least ``delta`` that moves a point by ``D``.

    Uses sinh(Phi/2) = sinh(n*delta/2) * cosh(D/2) / cosh(delta/2), which is
    algebraically identical to the arccosh form and has no cancellation.
    """
    if n < 1 or int(n) != n:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if not 0 < delta <= D:
        raise DomainError(f"phi_n needs 0 < delta <= D, got delta={delta!r}, D={D!r}")
    s = math.sinh(0.5 * n * delta) * math.cosh(0.5 * D) / math.cosh(0.5 * delta)
    return 2.0 * math.asinh(s)


def psi(x, y, tol=DEFAULT_TOLERANCES):
    """Base angle of the isosceles triangle with legs ``x`` and base ``y``."""
    # y = 2x is the degenerate triangle; allow rounding just above it
    if not (0 < y and y - 2 * x <= tol.domain_clamp * max(1.0, 2 * x)):
        raise DomainError(f"psi needs 0 < y <= 2x, got x={x!r}, y={y!r}")
    # coth y - csch y = tanh(y/2)
    return safe_inverse("arccos", math.tanh(0.5 * y) / math.tanh(x), tol)


def cap_angle_theta(w, R, tol=DEFAULT_TOLERANCES):
    """Angular radius, seen from the centre, of the cap cut from a ball of
    radius ``R`` by a plane at distance ``w``."""
    if not 0 < w < R:
        raise DomainError(f"cap angle needs 0 < w < R, got w={w!r}, R={R!r}")
    return safe_inverse("arccos", math.tanh(w) / math.tanh(R), tol)


def sigma_dist(h, R1, R2):
    """Distance between points on opposite sides of a line, at distances
    ``R1``, ``R2`` from it, whose feet are ``h`` apart."""
    if h < 0 or R1 < 0 or R2 < 0:
        raise DomainError(f"sigma_dist needs non-negative arguments, got {(h, R1, R2)!r}")
    c = math.sinh(R1) * math.sinh(R2) + math.cosh(R1) * math.cosh(R2) * math.cosh(h)
    return math.acosh(max(c, 1.0))


def _x_slack(D, lam):
    return 0.5 - 1.0 / (1.0 + math.exp(D)) - 1.0 / (1.0 + math.exp(lam))


def in_X(D, lam):
    """Membership in the set where 1/(1+e^D) + 1/(1+e^lam) < 1/2."""
    return _x_slack(D, lam) > 0


def rho_k(k, D, lam):
    slack = _x_slack(D, lam)
    if not slack > 0:
        raise DomainError(f"(D, lambda) = ({D!r}, {lam!r}) lies outside the admissible set")
    if k <= 2 or int(k) != k:
        raise DomainError(f"k must be an integer > 2, got {k!r}")
    return 0.5 * math.log((k - 2) / slack - 1.0)


def rho_short(l):
    if not l > 0:
        raise DomainError(f"rho_short needs l > 0, got {l!r}")
    # (e^l + 3)/(e^l - 1) = 1 + 4/(e^l - 1)
    return 0.5 * math.log1p(4.0 / math.expm1(l))


def h2(R):
    if not R > 0:
        raise DomainError(f"h2 needs R > 0, got {R!r}")
    t = 2.0 * math.sinh(R) ** 2 / math.sqrt(math.cosh(2 * R) ** 2 - math.cosh(R) ** 2)
    return math.atanh(t)


def h3(R):
    """Circumradius of the regular tetrahedron with edge 2R."""
    if not R > 0:
        raise DomainError(f"h3 needs R > 0, got {R!r}")
    ch = math.cosh(h2(R))
    t = 2.0 * math.sinh(R) ** 2 / math.sqrt(math.cosh(2 * R) ** 2 - ch * ch)
    return math.atanh(t)


def h_n(n, R):
    if n == 2:
        return h2(R)
    if n == 3:
        return h3(R)
    raise DomainError(f"h_n is implemented for n in {{2, 3}}, got {n!r}")


def _dihedral(r):
    return math.acos(1.0 / (1.0 / math.cosh(2.0 * r) + 2.0))


def _tau_integrand(t):
    # arcsech(sec t - 2) == arccosh(cos t / (1 - 2 cos t)); clamp guards t = arcsec 3
    c = math.cos(t)
    return math.acosh(max(c / (1.0 - 2.0 * c), 1.0))


def tetrahedron_volume(r, tol=DEFAULT_TOLERANCES):
    """tau(r): three times the integral of arcsech(sec t - 2) over
    [beta(r), arcsec 3]."""
    if not r > 0:
        raise DomainError(f"tetrahedron radius must be positive, got {r!r}")
    return 3.0 * integrate_adaptive(_tau_integrand, _dihedral(r), ARCSEC3, tol).value


@lru_cache(maxsize=256)
def _profile(r, tol):
    beta = _dihedral(r)
    tau = tetrahedron_volume(r, tol)
    density = (3.0 * beta - math.pi) * ball_volume(r) / (math.pi * tau)
    return BoroczkyProfile(r, beta, tau, density, h2(r), h3(r))


def boroczky_profile(r, tol=DEFAULT_TOLERANCES):
    if not r > 0:
        raise DomainError(f"packing radius must be positive, got {r!r}")
    return _profile(float(r), tol)


def boroczky_density(r, tol=DEFAULT_TOLERANCES):
    return boroczky_profile(r, tol).density


def _phi_angle(R, rho):
    ch = math.cosh(R)
    num = math.sqrt(max(math.cosh(rho) ** 2 - ch * ch, 0.0))
    return safe_inverse("arcsin", num / (math.sinh(rho) * ch))


def v_bor(R, rho, tol=DEFAULT_TOLERANCES):
    """Lower bound for the volume of the h3(R)-ball about a 2R-thick point
    that has another point at distance ``rho``."""
    H = h3(R)
    if not rho > H:
        raise DomainError(f"v_bor needs rho > h3(R) = {H!r}, got rho={rho!r}")
    phi = _phi_angle(R, rho) - _phi_angle(R, H)
    c = math.cos(phi)
    profile = boroczky_profile(R, tol)
    return 0.5 * (1.0 - c) * ball_volume(H) + 0.5 * (1.0 + c) * ball_volume(R) / profile.density
