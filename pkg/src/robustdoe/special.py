"""F-distribution tail probabilities and studentized-range critical values.

The heavy lifting is done by ``_kernels`` (Cython) when it is importable and
by the line-for-line pure-Python mirror ``_kernels_py`` otherwise. Set
``ROBUSTDOE_PURE_PYTHON=1`` to force the fallback.
"""
import math
import os

from .errors import DomainError

if os.environ.get("ROBUSTDOE_PURE_PYTHON"):
    from . import _kernels_py as _backend
else:
    try:
        from . import _kernels as _backend
    except ImportError:
        from . import _kernels_py as _backend

BACKEND = "compiled" if _backend.__name__.endswith("._kernels") else "python"


def betainc(a, b, x):
    """Regularized incomplete beta function I_x(a, b)."""
    if not (a > 0 and b > 0):
        raise DomainError(f"betainc requires a, b > 0 (got a={a}, b={b})")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"betainc requires 0 <= x <= 1 (got {x})")
    return _backend.betainc(float(a), float(b), float(x), 1.0 - float(x))


def _check_df(df1, df2):
    for name, df in (("df1", df1), ("df2", df2)):
        if not df >= 1:
            raise DomainError(f"{name} must be >= 1 (got {df})")


def f_p_value(f, df1, df2):
    """Upper-tail probability P(F > f) for F(df1, df2).

    Evaluated as I_x(df2/2, df1/2) with x = df2 / (df2 + df1 f); the
    complement 1 - x is formed directly so neither tail loses precision.
    ``f = inf`` gives 0.
    """
    if math.isnan(f) or f < 0:
        raise DomainError(f"F statistic must be >= 0 (got {f})")
    _check_df(df1, df2)
    if math.isinf(f):
        return 0.0
    denom = df2 + df1 * f
    x = df2 / denom
    y = df1 * f / denom
    return _backend.betainc(0.5 * df2, 0.5 * df1, x, y)


def f_cdf(f, df1, df2):
    """Lower-tail probability P(F <= f)."""
    if math.isnan(f) or f < 0:
        raise DomainError(f"F statistic must be >= 0 (got {f})")
    _check_df(df1, df2)
    if math.isinf(f):
        return 1.0
    denom = df2 + df1 * f
    return _backend.betainc_upper(0.5 * df2, 0.5 * df1, df2 / denom, df1 * f / denom)


def _check_range_args(k, df):
    if int(k) != k or k < 2:
        raise DomainError(f"number of groups k must be an integer >= 2 (got {k})")
    if math.isnan(df) or df < 1:
        raise DomainError(f"error df must be >= 1 (got {df})")


def studentized_range_cdf(q, k, df):
    """P(Q <= q) for the studentized range of ``k`` means with ``df`` error df.

    ``df`` may be ``math.inf`` (normal range).
    """
    _check_range_args(k, df)
    if math.isnan(q):
        raise DomainError("q must not be NaN")
    return _backend.ptukey(float(q), int(k), float(df))


def studentized_range_q(alpha, k, df):
    """Critical value q with P(Q > q) = alpha.

    >>> round(studentized_range_q(0.05, 3, 24), 3)
    3.532
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1) (got {alpha})")
    _check_range_args(k, df)
    return _backend.qtukey(1.0 - alpha, int(k), float(df))
