# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels: regularized incomplete beta and the
studentized range distribution. Mirrors ``_kernels_py`` exactly."""

from libc.math cimport erfc, exp, expm1, fabs, isinf, lgamma, log, pow

import numpy as np

cdef enum:
    GL_ORDER = 10
    INNER_PANELS = 17
    OUTER_PANELS = 48
    N_INNER = 170
    N_OUTER = 480

cdef double BETA_EPS = 1e-15
cdef double BETA_FPMIN = 1e-300
cdef int BETA_MAXIT = 10000
cdef double INNER_LO = -8.5
cdef double INNER_HI = 8.5
cdef double OUTER_TAIL = 40.0
cdef int OUTER_BISECT = 60
cdef double QTUKEY_XTOL = 1e-9
cdef int QTUKEY_MAXIT = 200
cdef double INV_SQRT2 = 0.7071067811865475
cdef double INV_SQRT2PI = 0.3989422804014327

cdef double gl_nodes[GL_ORDER]
cdef double gl_weights[GL_ORDER]
cdef double inner_nodes[N_INNER]
cdef double inner_weights[N_INNER]
cdef double inner_cdfs[N_INNER]

cdef struct OuterGrid:
    int finite
    double nodes[N_OUTER]
    double weights[N_OUTER]


cdef inline double _phi(double z) nogil:
    return 0.5 * erfc(-z * INV_SQRT2)


def _init_tables():
    cdef int p, i, j
    cdef double width, mid, z
    nodes, weights = np.polynomial.legendre.leggauss(GL_ORDER)
    for i in range(GL_ORDER):
        gl_nodes[i] = float(nodes[i])
        gl_weights[i] = float(weights[i])
    width = (INNER_HI - INNER_LO) / INNER_PANELS
    j = 0
    for p in range(INNER_PANELS):
        mid = INNER_LO + (p + 0.5) * width
        for i in range(GL_ORDER):
            z = mid + 0.5 * width * gl_nodes[i]
            inner_nodes[j] = z
            inner_weights[j] = (0.5 * width * gl_weights[i]
                                * INV_SQRT2PI * exp(-0.5 * z * z))
            inner_cdfs[j] = _phi(z)
            j += 1


_init_tables()


cdef double _betacf(double a, double b, double x) except? -1.0:
    cdef double qab = a + b, qap = a + 1.0, qam = a - 1.0
    cdef double c = 1.0, d, h, aa, delta
    cdef int m, m2
    d = 1.0 - qab * x / qap
    if fabs(d) < BETA_FPMIN:
        d = BETA_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, BETA_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < BETA_FPMIN:
            d = BETA_FPMIN
        c = 1.0 + aa / c
        if fabs(c) < BETA_FPMIN:
            c = BETA_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < BETA_FPMIN:
            d = BETA_FPMIN
        c = 1.0 + aa / c
        if fabs(c) < BETA_FPMIN:
            c = BETA_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < BETA_EPS:
            return h
    raise ArithmeticError(
        f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


cdef double _beta_series(double a, double b, double x) except? -1.0:
    cdef double term = 1.0, total = 1.0 / a, contrib
    cdef int n
    for n in range(1, BETA_MAXIT + 1):
        term *= (n - b) * x / n
        contrib = term / (a + n)
        total += contrib
        if fabs(contrib) < BETA_EPS * fabs(total):
            return total
    raise ArithmeticError(
        f"incomplete beta series did not converge (a={a}, b={b}, x={x})")


cdef double _lower_tail(double a, double b, double x, double y,
                        double lbeta) except? -1.0:
    cdef double front
    if x <= 0.1 and b * x <= 1.0:
        return exp(a * log(x) - lbeta) * _beta_series(a, b, x)
    front = exp(a * log(x) + b * log(y) - lbeta)
    return front * _betacf(a, b, x) / a


cpdef double betainc(double a, double b, double x, double y) except? -1.0:
    """Regularized incomplete beta I_x(a, b), with ``y = 1 - x`` given exactly."""
    cdef double lbeta
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    lbeta = lgamma(a) + lgamma(b) - lgamma(a + b)
    if x < (a + 1.0) / (a + b + 2.0):
        return _lower_tail(a, b, x, y, lbeta)
    return 1.0 - _lower_tail(b, a, y, x, lbeta)


cpdef double betainc_upper(double a, double b, double x, double y) except? -1.0:
    """Complement 1 - I_x(a, b) without cancellation on the small side."""
    cdef double lbeta
    if x <= 0.0:
        return 1.0
    if y <= 0.0:
        return 0.0
    lbeta = lgamma(a) + lgamma(b) - lgamma(a + b)
    if x < (a + 1.0) / (a + b + 2.0):
        return 1.0 - _lower_tail(a, b, x, y, lbeta)
    return _lower_tail(b, a, y, x, lbeta)


cdef inline double _chi_excess(double u, double df) nogil:
    # log-density drop of sqrt(chi2_df / df) at s = exp(u) relative to the mode s = 1
    return df * (0.5 * expm1(2.0 * u) - u)


cdef double _tail_limit(double df, double sign) nogil:
    # u on one side of the mode where the log density has dropped by OUTER_TAIL
    cdef double near = 0.0, far = sign, mid
    cdef int it
    while _chi_excess(far, df) < OUTER_TAIL:
        near = far
        far *= 2.0
    for it in range(OUTER_BISECT):
        mid = 0.5 * (near + far)
        if _chi_excess(mid, df) < OUTER_TAIL:
            near = mid
        else:
            far = mid
    return far


cdef void _outer_grid(double df, OuterGrid* grid) nogil:
    cdef double lo, hi, width, mid, u, top, norm
    cdef int p, i, j = 0
    if isinf(df):
        grid.finite = 0
        return
    grid.finite = 1
    lo = _tail_limit(df, -1.0)
    hi = _tail_limit(df, 1.0)
    width = (hi - lo) / OUTER_PANELS
    for p in range(OUTER_PANELS):
        mid = lo + (p + 0.5) * width
        for i in range(GL_ORDER):
            u = mid + 0.5 * width * gl_nodes[i]
            grid.nodes[j] = exp(u)
            grid.weights[j] = log(0.5 * width * gl_weights[i]) - _chi_excess(u, df)
            j += 1
    top = grid.weights[0]
    for j in range(1, N_OUTER):
        if grid.weights[j] > top:
            top = grid.weights[j]
    norm = 0.0
    for j in range(N_OUTER):
        grid.weights[j] = exp(grid.weights[j] - top)
        norm += grid.weights[j]
    for j in range(N_OUTER):
        grid.weights[j] /= norm


cdef double _range_cdf(double w, int k) nogil:
    cdef double total = 0.0, diff
    cdef int i
    if w <= 0.0:
        return 0.0
    for i in range(N_INNER):
        diff = inner_cdfs[i] - _phi(inner_nodes[i] - w)
        if diff > 0.0:
            total += inner_weights[i] * pow(diff, k - 1)
    total *= k
    return total if total < 1.0 else 1.0


cdef double _ptukey_grid(double q, int k, OuterGrid* grid) nogil:
    cdef double total = 0.0
    cdef int j
    if q <= 0.0:
        return 0.0
    if not grid.finite:
        return _range_cdf(q, k)
    for j in range(N_OUTER):
        total += grid.weights[j] * _range_cdf(q * grid.nodes[j], k)
    return total if total < 1.0 else 1.0


cpdef double ptukey(double q, int k, double df):
    """CDF of the studentized range for ``k`` groups and ``df`` error df."""
    cdef OuterGrid grid
    _outer_grid(df, &grid)
    return _ptukey_grid(q, k, &grid)


cpdef double qtukey(double p, int k, double df) except? -1.0:
    """Quantile of the studentized range by bisection on the CDF."""
    cdef OuterGrid grid
    cdef double lo = 0.0, hi = 8.0, mid
    cdef int it
    _outer_grid(df, &grid)
    while _ptukey_grid(hi, k, &grid) < p:
        lo = hi
        hi *= 2.0
        if hi > 1e6:
            raise ArithmeticError("studentized range quantile bracket overflow")
    for it in range(QTUKEY_MAXIT):
        mid = 0.5 * (lo + hi)
        if _ptukey_grid(mid, k, &grid) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo < QTUKEY_XTOL:
            break
    return 0.5 * (lo + hi)
