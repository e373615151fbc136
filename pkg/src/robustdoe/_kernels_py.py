"""Pure-Python numerical kernels.

Line-for-line mirror of ``_kernels.pyx``. Used when the compiled extension
is unavailable or when ``ROBUSTDOE_PURE_PYTHON`` is set.
"""
import math

import numpy as np

BETA_EPS = 1e-15
BETA_FPMIN = 1e-300
BETA_MAXIT = 10000

GL_ORDER = 10
GL_NODES, GL_WEIGHTS = (tuple(float(v) for v in arr)
                        for arr in np.polynomial.legendre.leggauss(GL_ORDER))

# inner integral over the standard normal variable
INNER_LO = -8.5
INNER_HI = 8.5
INNER_PANELS = 17
# outer integral over log of the scaled chi variable, cut where the density
# has fallen by exp(-OUTER_TAIL) from its mode
OUTER_TAIL = 40.0
OUTER_PANELS = 48
OUTER_BISECT = 60

QTUKEY_XTOL = 1e-9
QTUKEY_MAXIT = 200

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_INV_SQRT2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _betacf(a, b, x):
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < BETA_FPMIN:
        d = BETA_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, BETA_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < BETA_FPMIN:
            d = BETA_FPMIN
        c = 1.0 + aa / c
        if abs(c) < BETA_FPMIN:
            c = BETA_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < BETA_FPMIN:
            d = BETA_FPMIN
        c = 1.0 + aa / c
        if abs(c) < BETA_FPMIN:
            c = BETA_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < BETA_EPS:
            return h
    raise ArithmeticError(
        f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def _beta_series(a, b, x):
    # sum_n (1-b)_n x^n / (n! (a+n)); caller multiplies by x^a / B(a, b)
    term = 1.0
    total = 1.0 / a
    for n in range(1, BETA_MAXIT + 1):
        term *= (n - b) * x / n
        contrib = term / (a + n)
        total += contrib
        if abs(contrib) < BETA_EPS * abs(total):
            return total
    raise ArithmeticError(
        f"incomplete beta series did not converge (a={a}, b={b}, x={x})")


def _lower_tail(a, b, x, y, lbeta):
    # I_x(a, b) for x below the continued-fraction switch point
    if x <= 0.1 and b * x <= 1.0:
        return math.exp(a * math.log(x) - lbeta) * _beta_series(a, b, x)
    front = math.exp(a * math.log(x) + b * math.log(y) - lbeta)
    return front * _betacf(a, b, x) / a


def betainc(a, b, x, y):
    """Regularized incomplete beta I_x(a, b), with ``y = 1 - x`` given exactly."""
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    lbeta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    if x < (a + 1.0) / (a + b + 2.0):
        return _lower_tail(a, b, x, y, lbeta)
    return 1.0 - _lower_tail(b, a, y, x, lbeta)


def betainc_upper(a, b, x, y):
    """Complement 1 - I_x(a, b) without cancellation on the small side."""
    if x <= 0.0:
        return 1.0
    if y <= 0.0:
        return 0.0
    lbeta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    if x < (a + 1.0) / (a + b + 2.0):
        return 1.0 - _lower_tail(a, b, x, y, lbeta)
    return _lower_tail(b, a, y, x, lbeta)


def _phi(z):
    return 0.5 * math.erfc(-z * _INV_SQRT2)


def _chi_excess(u, df):
    # log-density drop of sqrt(chi2_df / df) at s = exp(u) relative to the mode s = 1
    return df * (0.5 * math.expm1(2.0 * u) - u)


def _tail_limit(df, sign):
    # u on one side of the mode where the log density has dropped by OUTER_TAIL
    near = 0.0
    far = sign
    while _chi_excess(far, df) < OUTER_TAIL:
        near = far
        far *= 2.0
    for _ in range(OUTER_BISECT):
        mid = 0.5 * (near + far)
        if _chi_excess(mid, df) < OUTER_TAIL:
            near = mid
        else:
            far = mid
    return far


def _outer_grid(df):
    # nodes s and normalized weights for sqrt(chi2_df / df), integrated over u = log s
    lo = _tail_limit(df, -1.0)
    hi = _tail_limit(df, 1.0)
    width = (hi - lo) / OUTER_PANELS
    nodes = []
    logw = []
    for p in range(OUTER_PANELS):
        mid = lo + (p + 0.5) * width
        for i in range(GL_ORDER):
            u = mid + 0.5 * width * GL_NODES[i]
            nodes.append(math.exp(u))
            logw.append(math.log(0.5 * width * GL_WEIGHTS[i]) - _chi_excess(u, df))
    top = max(logw)
    weights = [math.exp(v - top) for v in logw]
    norm = sum(weights)
    return nodes, [w / norm for w in weights]


def _inner_grid():
    width = (INNER_HI - INNER_LO) / INNER_PANELS
    nodes = []
    weights = []
    cdfs = []
    for p in range(INNER_PANELS):
        mid = INNER_LO + (p + 0.5) * width
        for i in range(GL_ORDER):
            z = mid + 0.5 * width * GL_NODES[i]
            nodes.append(z)
            weights.append(0.5 * width * GL_WEIGHTS[i]
                           * _INV_SQRT2PI * math.exp(-0.5 * z * z))
            cdfs.append(_phi(z))
    return nodes, weights, cdfs


_INNER = _inner_grid()


def _range_cdf(w, k):
    # P(range of k standard normals <= w)
    if w <= 0.0:
        return 0.0
    nodes, weights, cdfs = _INNER
    total = 0.0
    for i in range(len(nodes)):
        diff = cdfs[i] - _phi(nodes[i] - w)
        if diff > 0.0:
            total += weights[i] * diff ** (k - 1)
    return min(1.0, k * total)


def _ptukey_grid(q, k, grid):
    if q <= 0.0:
        return 0.0
    if grid is None:
        return _range_cdf(q, k)
    nodes, weights = grid
    total = 0.0
    for j in range(len(nodes)):
        total += weights[j] * _range_cdf(q * nodes[j], k)
    return min(1.0, total)


def _grid_for(df):
    if math.isinf(df):
        return None
    return _outer_grid(df)


def ptukey(q, k, df):
    """CDF of the studentized range for ``k`` groups and ``df`` error df."""
    return _ptukey_grid(q, k, _grid_for(df))


def qtukey(p, k, df):
    """Quantile of the studentized range by bisection on the CDF."""
    grid = _grid_for(df)
    lo = 0.0
    hi = 8.0
    while _ptukey_grid(hi, k, grid) < p:
        lo = hi
        hi *= 2.0
        if hi > 1e6:
            raise ArithmeticError("studentized range quantile bracket overflow")
    for _ in range(QTUKEY_MAXIT):
        mid = 0.5 * (lo + hi)
        if _ptukey_grid(mid, k, grid) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo < QTUKEY_XTOL:
            break
    return 0.5 * (lo + hi)
