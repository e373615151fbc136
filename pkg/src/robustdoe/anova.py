"""One-way ANOVA with exact F tail probabilities and Tukey HSD comparisons."""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .design import Plan, ResponseTable
from .errors import DegenerateError, DomainError
from .special import f_p_value, studentized_range_cdf, studentized_range_q

DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class AnovaTable:
    source: str
    df_factor: int
    df_error: int
    ss_factor: float
    ss_error: float
    ss_total: float
    f: float
    p: float
    # None, "zero-error-variance" (F infinite) or "constant-data" (F undefined)
    degenerate: str | None = None

    @property
    def df_total(self) -> int:
        return self.df_factor + self.df_error

    @property
    def ms_factor(self) -> float:
        return self.ss_factor / self.df_factor

    @property
    def ms_error(self) -> float:
        return self.ss_error / self.df_error

    def significant(self, alpha=DEFAULT_ALPHA) -> bool:
        return not math.isnan(self.p) and self.p < alpha

    def rows(self) -> list[dict]:
        return [
            {"source": "Factor", "df": self.df_factor, "ss": self.ss_factor,
             "ms": self.ms_factor, "f": self.f, "p": self.p},
            {"source": "Error", "df": self.df_error, "ss": self.ss_error,
             "ms": self.ms_error, "f": None, "p": None},
            {"source": "Total", "df": self.df_total, "ss": self.ss_total,
             "ms": None, "f": None, "p": None},
        ]

    def to_csv(self) -> str:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, int):
                return str(v)
            return f"{v:.6g}"

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["source", "df", "ss", "ms", "f", "p"])
        for row in self.rows():
            writer.writerow([row["source"]] + [fmt(row[k])
                                               for k in ("df", "ss", "ms", "f", "p")])
        return buf.getvalue()


def _as_groups(groups):
    arrays = [np.asarray(g, dtype=float).ravel() for g in groups]
    if len(arrays) < 2:
        raise DegenerateError(f"one-way ANOVA needs >= 2 groups (got {len(arrays)})")
    if any(a.size == 0 for a in arrays):
        raise DegenerateError("one-way ANOVA groups must be non-empty")
    if not all(np.all(np.isfinite(a)) for a in arrays):
        raise DegenerateError("one-way ANOVA needs finite data")
    n_total = sum(a.size for a in arrays)
    if n_total - len(arrays) < 1:
        raise DegenerateError("one-way ANOVA needs N - k >= 1 error df")
    return arrays


def one_way_anova(groups, source="Factor") -> AnovaTable:
    arrays = _as_groups(groups)
    k = len(arrays)
    everything = np.concatenate(arrays)
    n_total = everything.size
    grand = float(np.mean(everything))
    means = [float(np.mean(a)) for a in arrays]
    ss_factor = float(sum(a.size * (m - grand) ** 2 for a, m in zip(arrays, means)))
    ss_error = float(sum(np.sum((a - m) ** 2) for a, m in zip(arrays, means)))
    ss_total = float(np.sum((everything - grand) ** 2))
    df_factor, df_error = k - 1, n_total - k
    degenerate = None
    if ss_error == 0.0:
        if ss_factor > 0.0:
            f, p, degenerate = math.inf, 0.0, "zero-error-variance"
        else:
            f, p, degenerate = math.nan, math.nan, "constant-data"
    else:
        f = (ss_factor / df_factor) / (ss_error / df_error)
        p = f_p_value(f, df_factor, df_error)
    return AnovaTable(source, df_factor, df_error, ss_factor, ss_error, ss_total,
                      f, p, degenerate)


@dataclass(frozen=True)
class TukeyPair:
    level_a: int
    level_b: int
    mean_diff: float        # mean(level_b) - mean(level_a)
    hsd_threshold: float
    significant: bool
    p_adj: float


@dataclass(frozen=True)
class TukeyResult:
    source: str
    alpha: float
    q_critical: float
    hsd_threshold: float
    group_means: tuple[float, ...]
    pairs: tuple[TukeyPair, ...]

    def significant_pairs(self) -> list[tuple[int, int]]:
        return [(p.level_a, p.level_b) for p in self.pairs if p.significant]


def tukey_hsd(groups, alpha=DEFAULT_ALPHA, source="Factor") -> TukeyResult:
    """All-pairs Tukey HSD for equal group sizes.

    Levels in the result are 1-based positions in ``groups``.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1) (got {alpha})")
    arrays = _as_groups(groups)
    sizes = {a.size for a in arrays}
    if len(sizes) != 1:
        raise DomainError(f"Tukey HSD needs equal group sizes (got {sorted(sizes)}); "
                          "the Tukey-Kramer variant is not supported")
    n = sizes.pop()
    table = one_way_anova(arrays, source)
    k = len(arrays)
    q = studentized_range_q(alpha, k, table.df_error)
    se = math.sqrt(table.ms_error / n)
    hsd = q * se
    means = tuple(float(np.mean(a)) for a in arrays)
    pairs = []
    for i, j in itertools.combinations(range(k), 2):
        diff = means[j] - means[i]
        if se > 0.0:
            p_adj = 1.0 - studentized_range_cdf(abs(diff) / se, k, table.df_error)
        else:
            p_adj = 0.0 if diff != 0.0 else 1.0
        pairs.append(TukeyPair(i + 1, j + 1, diff, hsd, abs(diff) > hsd,
                               min(1.0, max(0.0, p_adj))))
    return TukeyResult(source, alpha, q, hsd, means, tuple(pairs))


def factor_groups(plan: Plan, responses: ResponseTable, code: str) -> list[np.ndarray]:
    """All responses grouped by the levels of one factor (control or noise)."""
    values = responses.values
    if code == plan.noise.code:
        return [values[:, L].copy() for L in range(plan.num_noise_levels)]
    idx = plan.codes.index(code)
    levels = plan.level_matrix()[:, idx]
    factor = plan.controls[idx]
    return [values[levels == L].ravel() for L in range(1, factor.num_levels + 1)]


def factor_anovas(plan: Plan, responses: ResponseTable) -> dict[str, AnovaTable]:
    """One one-way ANOVA per factor, controls first then noise."""
    return {code: one_way_anova(factor_groups(plan, responses, code), code)
            for code in plan.codes + [plan.noise.code]}


def gated_tukey(plan: Plan, responses: ResponseTable,
                anovas: dict[str, AnovaTable],
                alpha=DEFAULT_ALPHA) -> dict[str, TukeyResult]:
    """Tukey HSD only for factors whose ANOVA is significant at ``alpha``."""
    return {code: tukey_hsd(factor_groups(plan, responses, code), alpha, code)
            for code, table in anovas.items() if table.significant(alpha)}
