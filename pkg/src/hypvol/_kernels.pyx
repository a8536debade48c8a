# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Mirrors ``_pykernels`` line for line; keep in sync."""

from libc.math cimport (atan, cos, cosh, fabs, log, log1p, sin, sinh,
                        sqrt, tanh, isnan, M_PI)
from libc.stdlib cimport free, malloc

from .errors import ConvergenceError, DomainError
from .numerics import MAX_PANELS

BACKEND = "cython"

cdef double[8] XGK = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
]
cdef double[8] WGK = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
]
cdef double[4] WG = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
]


cdef double _sinh_minus_x(double x) nogil:
    cdef double term, total = 0.0
    cdef int k = 3
    if fabs(x) < 1.0:
        term = x * x * x / 6.0
        while fabs(term) > 1e-17 * fabs(total):
            total += term
            term *= x * x / ((k + 1) * (k + 2))
            k += 2
        return total
    return sinh(x) - x


cpdef double kappa(double R, double w):
    cdef double S = R - w
    cdef double sh = sinh(S)
    return M_PI * (0.5 * _sinh_minus_x(2.0 * S) + tanh(w) * sh * sh)


cdef struct PerpGeom:
    double R, m, c, v, rho, mu


cdef inline double _lower_prim(double r, double p, double a, double a2, double g,
                               double k, double ch) nogil:
    cdef double u = r - p
    cdef double t = a2 - u * u
    cdef double s = sqrt(t) if t > 0.0 else 0.0
    cdef double L = ch - s
    cdef double atan_term = atan(k * u / (a + s))
    return (-ch / L - log(L)
            + p * (ch * u / (g * L) + 2.0 * a2 / (g * sqrt(g)) * atan_term))


cdef double _perp_inner(double theta, PerpGeom* G) nogil:
    cdef double ct = cos(theta), st = sin(theta)
    cdef double r_lo = G.m / ct
    cdef double r_hi = G.rho * G.mu / sqrt(ct * ct + G.rho * G.rho * st * st)
    if r_hi <= r_lo:
        return 0.0
    cdef double ch = cosh(G.R), sh = sinh(G.R)
    cdef double p = G.m * ct
    cdef double ms = G.m * st
    cdef double a2 = sh * sh - ms * ms
    cdef double a = sqrt(a2)
    cdef double g = 1.0 + ms * ms
    cdef double k = sqrt((ch + a) / (ch - a))

    cdef double q = (G.c - G.m) * ct
    cdef double ks = (G.c - G.m) * st
    cdef double b2 = G.v * G.v - ks * ks
    cdef double b = sqrt(b2)
    cdef double s_lo = r_lo + q, s_hi = r_hi + q
    cdef double u2_lo = b2 - s_lo * s_lo
    cdef double u2_hi = b2 - s_hi * s_hi
    if u2_lo < 0.0:
        u2_lo = 0.0
    if u2_hi < 0.0:
        u2_hi = 0.0
    cdef double x = s_hi / b, y = s_lo / b
    cdef double atanh_diff = 0.5 * (log1p(x) - log1p(-x) - log1p(y) + log1p(-y))
    cdef double upper = -0.5 * log(u2_hi / u2_lo) - (q / b) * atanh_diff

    return (_lower_prim(r_hi, p, a, a2, g, k, ch)
            - _lower_prim(r_lo, p, a, a2, g, k, ch) - upper)


def perp_inner(double theta, double R, double m, double c, double v, double rho, double mu):
    cdef PerpGeom G = PerpGeom(R, m, c, v, rho, mu)
    return _perp_inner(theta, &G)


cdef int _panel(PerpGeom* G, double a, double b, double* val, double* err) nogil:
    cdef double half = 0.5 * (b - a), mid = 0.5 * (a + b)
    cdef double fc = _perp_inner(mid, G)
    cdef double kron = WGK[7] * fc, gauss = WG[3] * fc
    cdef double dx, s
    cdef int j
    if isnan(fc):
        return 1
    for j in range(7):
        dx = half * XGK[j]
        s = _perp_inner(mid - dx, G) + _perp_inner(mid + dx, G)
        if isnan(s):
            return 1
        kron += WGK[j] * s
        if j % 2 == 1:
            gauss += WG[j // 2] * s
    val[0] = kron * half
    err[0] = fabs((kron - gauss) * half)
    return 0


cdef struct Panel:
    double lo, hi, val, err


cdef void _heap_push(Panel* h, int n, Panel item) nogil:
    # max-heap on err; n is the size before insertion
    cdef int i = n, parent
    while i > 0:
        parent = (i - 1) // 2
        if h[parent].err >= item.err:
            break
        h[i] = h[parent]
        i = parent
    h[i] = item


cdef Panel _heap_pop(Panel* h, int n) nogil:
    # n is the size before removal
    cdef Panel top = h[0]
    cdef Panel last = h[n - 1]
    cdef int i = 0, child
    n -= 1
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and h[child + 1].err > h[child].err:
            child += 1
        if last.err >= h[child].err:
            break
        h[i] = h[child]
        i = child
    if n > 0:
        h[i] = last
    return top


cdef double _kahan_total(Panel* h, int n, double* err_out) nogil:
    cdef double s = 0.0, comp = 0.0, y, t, e = 0.0
    cdef int i
    for i in range(n):
        y = h[i].val - comp
        t = s + y
        comp = (t - s) - y
        s = t
        e += h[i].err
    err_out[0] = e
    return s


def perp_integral(double R, double m, double c, double v, double rho, double mu,
                  double theta0, double quad_abs, double quad_rel, int max_panels=MAX_PANELS):
    cdef PerpGeom G = PerpGeom(R, m, c, v, rho, mu)
    cdef double val, err, v1, e1, v2, e2, total, total_err, mid
    cdef int panels = 1, status = 0, n = 0
    cdef Panel top
    if theta0 <= 0.0:
        return 0.0, 0.0, 1
    cdef Panel* heap = <Panel*> malloc((max_panels + 1) * sizeof(Panel))
    if heap == NULL:
        raise MemoryError()
    try:
        with nogil:
            status = _panel(&G, 0.0, theta0, &val, &err)
            if status == 0:
                _heap_push(heap, n, Panel(0.0, theta0, val, err))
                n = 1
                total, total_err = val, err
                while total_err > max(quad_abs, quad_rel * fabs(total)):
                    if panels >= max_panels:
                        status = 2
                        break
                    top = _heap_pop(heap, n)
                    n -= 1
                    mid = 0.5 * (top.lo + top.hi)
                    if not (top.lo < mid < top.hi):
                        status = 3
                        break
                    status = _panel(&G, top.lo, mid, &v1, &e1)
                    if status == 0:
                        status = _panel(&G, mid, top.hi, &v2, &e2)
                    if status != 0:
                        break
                    _heap_push(heap, n, Panel(top.lo, mid, v1, e1))
                    n += 1
                    _heap_push(heap, n, Panel(mid, top.hi, v2, e2))
                    n += 1
                    panels += 1
                    total += (v1 + v2) - top.val
                    total_err += (e1 + e2) - top.err
                    if panels % 64 == 0 or total_err <= max(quad_abs, quad_rel * fabs(total)):
                        total = _kahan_total(heap, n, &total_err)
        if status == 1:
            raise DomainError("iota integrand returned NaN")
        if status == 2:
            raise ConvergenceError(
                f"no convergence on [0, {theta0!r}] after {panels} panels "
                f"(error estimate {total_err:.3g})")
        if status == 3:
            raise ConvergenceError(f"panel cannot be bisected further (error estimate {total_err:.3g})")
        return total, total_err, panels
    finally:
        free(heap)
