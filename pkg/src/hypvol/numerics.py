"""Scalar numerical kernels: adaptive quadrature, bracketed root finding and
domain-clamped inverse functions.

Everything here is pure and reentrant.
"""

import heapq
import math
from dataclasses import dataclass

from .errors import BracketError, ConvergenceError, DomainError

__all__ = [
    "Tolerances",
    "QuadratureResult",
    "DEFAULT_TOLERANCES",
    "MAX_PANELS",
    "gauss_kronrod_panel",
    "integrate_adaptive",
    "solve_bracketed",
    "safe_inverse",
    "sinh_minus_x",
]

MAX_PANELS = 10_000


def sinh_minus_x(x):
    """sinh(x) - x without cancellation for small |x|."""
    if abs(x) < 1.0:
        term = x * x * x / 6.0
        total = 0.0
        k = 3
        while abs(term) > 1e-17 * abs(total):
            total += term
            term *= x * x / ((k + 1) * (k + 2))
            k += 2
        return total
    return math.sinh(x) - x


@dataclass(frozen=True)
class Tolerances:
    quad_abs: float = 1e-10
    quad_rel: float = 1e-10
    root_tol: float = 1e-12
    domain_clamp: float = 1e-12

    def __post_init__(self):
        for name in ("quad_abs", "quad_rel", "root_tol", "domain_clamp"):
            value = getattr(self, name)
            if not value > 0:
                raise DomainError(f"tolerance {name} must be positive, got {value!r}")


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    subdivisions: int


# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 tables).
# Abscissae are listed from the outermost node inward; the centre node is last.
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
# Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


def _checked(f, x):
    y = f(x)
    if y != y:
        raise DomainError(f"integrand returned NaN at x={x!r}")
    return y


def gauss_kronrod_panel(f, a, b):
    """Return ``(K15, |K15 - G7|)`` for one panel ``[a, b]``."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fc = _checked(f, mid)
    kronrod = _WGK[7] * fc
    gauss = _WG[3] * fc
    for j in range(7):
        dx = half * _XGK[j]
        s = _checked(f, mid - dx) + _checked(f, mid + dx)
        kronrod += _WGK[j] * s
        if j % 2 == 1:
            gauss += _WG[j // 2] * s
    return kronrod * half, abs((kronrod - gauss) * half)


def integrate_adaptive(f, a, b, tol=DEFAULT_TOLERANCES, max_panels=MAX_PANELS):
    """Integrate ``f`` over ``[a, b]`` by globally adaptive G7/K15 bisection.

    The panel with the largest error estimate is split until the summed
    estimate is at most ``max(tol.quad_abs, tol.quad_rel * |value|)``.
    Raises ConvergenceError when ``max_panels`` is reached first, and
    DomainError if ``f`` produces NaN.
    """
    if not a <= b:
        raise DomainError(f"integration bounds out of order: a={a!r} > b={b!r}")
    if a == b:
        return QuadratureResult(0.0, 0.0, 1)

    value, err = gauss_kronrod_panel(f, a, b)
    # max-heap on panel error
    heap = [(-err, a, b, value)]
    total, total_err = value, err
    panels = 1
    while total_err > max(tol.quad_abs, tol.quad_rel * abs(total)):
        if panels >= max_panels:
            raise ConvergenceError(
                f"no convergence on [{a!r}, {b!r}] after {panels} panels "
                f"(error estimate {total_err:.3g})"
            )
        neg_err, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise ConvergenceError(
                f"panel [{lo!r}, {hi!r}] cannot be bisected further "
                f"(error estimate {total_err:.3g})"
            )
        v1, e1 = gauss_kronrod_panel(f, lo, mid)
        v2, e2 = gauss_kronrod_panel(f, mid, hi)
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        panels += 1
        total += (v1 + v2) - v
        total_err += (e1 + e2) + neg_err
        if panels % 64 == 0 or total_err <= max(tol.quad_abs, tol.quad_rel * abs(total)):
            # periodic exact re-sum keeps incremental rounding from drifting
            total = math.fsum(item[3] for item in heap)
            total_err = math.fsum(-item[0] for item in heap)
    return QuadratureResult(total, total_err, panels)


def solve_bracketed(g, lo, hi, tol=DEFAULT_TOLERANCES, max_iter=400):
    """Root of a continuous monotone ``g`` on ``[lo, hi]``.

    Bisection safeguarded secant steps: a secant candidate is accepted only
    when it lands strictly inside the current bracket and the previous step
    at least halved the bracket. Terminates when the bracket is narrower
    than ``tol.root_tol`` or an exact zero is hit.
    """
    if not lo <= hi:
        raise BracketError(f"empty bracket [{lo!r}, {hi!r}]")
    glo, ghi = g(lo), g(hi)
    if glo == 0:
        return lo
    if ghi == 0:
        return hi
    if (glo > 0) == (ghi > 0) or glo != glo or ghi != ghi:
        raise BracketError(f"g does not change sign on [{lo!r}, {hi!r}]: g(lo)={glo!r}, g(hi)={ghi!r}")

    a, b, ga, gb = lo, hi, glo, ghi
    last_width = 2.0 * (b - a)
    for _ in range(max_iter):
        width = b - a
        if width <= tol.root_tol:
            break
        x = a - ga * (b - a) / (gb - ga)
        if not (a < x < b) or width > 0.5 * last_width:
            x = 0.5 * (a + b)
        last_width = width
        gx = g(x)
        if gx == 0:
            return x
        if (gx > 0) == (ga > 0):
            a, ga = x, gx
        else:
            b, gb = x, gx
        if b - a >= width:
            # secant step stalled at an endpoint; force a bisection next time
            last_width = 0.0
    # return the end with the smaller residual
    return a if abs(ga) <= abs(gb) else b


_DOMAINS = {
    "arccosh": (1.0, math.inf),
    "arctanh": (-1.0, 1.0),
    "arccos": (-1.0, 1.0),
    "arcsin": (-1.0, 1.0),
    "arcsech": (0.0, 1.0),
}


def _arctanh(x):
    if x == 1.0:
        return math.inf
    if x == -1.0:
        return -math.inf
    return math.atanh(x)


def _arcsech(x):
    if x == 0.0:
        return math.inf
    return math.acosh(1.0 / x)


_FUNCS = {
    "arccosh": math.acosh,
    "arctanh": _arctanh,
    "arccos": math.acos,
    "arcsin": math.asin,
    "arcsech": _arcsech,
}


def safe_inverse(kind, x, tol=DEFAULT_TOLERANCES):
    """Evaluate an inverse function after clamping ``x`` onto its closed domain.

    Values outside the domain by more than ``tol.domain_clamp`` raise
    DomainError. ``kind`` is one of arccosh, arctanh, arccos, arcsin,
    arcsech, arcsec.
    """
    if x != x:
        raise DomainError(f"{kind} of NaN")
    eps = tol.domain_clamp
    if kind == "arcsec":
        # domain |x| >= 1
        if abs(x) < 1.0:
            if abs(x) < 1.0 - eps:
                raise DomainError(f"arcsec argument {x!r} has |x| < 1")
            x = math.copysign(1.0, x)
        return math.acos(1.0 / x)
    try:
        lo, hi = _DOMAINS[kind]
    except KeyError:
        raise DomainError(f"unknown inverse function {kind!r}") from None
    if x < lo:
        if x < lo - eps:
            raise DomainError(f"{kind} argument {x!r} below domain [{lo}, {hi}]")
        x = lo
    elif x > hi:
        if x > hi + eps:
            raise DomainError(f"{kind} argument {x!r} above domain [{lo}, {hi}]")
        x = hi
    return _FUNCS[kind](x)
