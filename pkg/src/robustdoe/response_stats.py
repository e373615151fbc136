"""Signal-to-noise ratios, per-run summaries and main-effects tables."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .design import NOISE, Plan, ResponseTable
from .errors import DegenerateError, DomainError, SnrDomainError

SMALLER_THE_BETTER = "smaller-the-better"
LARGER_THE_BETTER = "larger-the-better"
NOMINAL_THE_BEST = "nominal-the-best"


@dataclass(frozen=True)
class SnrCriterion:
    kind: str = SMALLER_THE_BETTER
    target: float | None = None

    def __post_init__(self):
        if self.kind not in (SMALLER_THE_BETTER, LARGER_THE_BETTER, NOMINAL_THE_BEST):
            raise DomainError(f"unknown S/N criterion {self.kind!r}")
        if self.kind == NOMINAL_THE_BEST:
            if self.target is None or not math.isfinite(self.target):
                raise DomainError("nominal-the-best needs a finite target")

    @classmethod
    def parse(cls, text: str) -> "SnrCriterion":
        """``smaller-the-better``, ``larger-the-better`` or ``nominal-the-best:<target>``."""
        kind, _, target = str(text).partition(":")
        kind = kind.strip().lower()
        if kind == NOMINAL_THE_BEST:
            try:
                return cls(kind, float(target))
            except ValueError:
                raise DomainError(
                    f"nominal-the-best needs a numeric target, e.g. "
                    f"'nominal-the-best:10' (got {text!r})") from None
        if target:
            raise DomainError(f"criterion {kind!r} takes no target")
        return cls(kind)

    def __str__(self):
        if self.kind == NOMINAL_THE_BEST:
            return f"{self.kind}:{self.target:g}"
        return self.kind


STB = SnrCriterion(SMALLER_THE_BETTER)


def sample_sd(values) -> float | None:
    """n-1 standard deviation; None for fewer than two values."""
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        return None
    return float(np.std(arr, ddof=1))


def snr(responses, criterion: SnrCriterion = STB) -> float:
    """Taguchi S/N ratio in dB.

    smaller-the-better: -10 log10(mean(y^2))
    larger-the-better:  -10 log10(mean(1/y^2))
    nominal-the-best:    10 log10(mean^2 / s^2)
    """
    y = np.asarray(responses, dtype=float).ravel()
    if y.size == 0:
        raise DegenerateError("S/N ratio of an empty response list")
    if not np.all(np.isfinite(y)):
        raise SnrDomainError("S/N ratio needs finite responses")
    # squares are formed after scaling so tiny or huge responses cannot under/overflow
    if criterion.kind == SMALLER_THE_BETTER:
        top = float(np.max(np.abs(y)))
        if top == 0.0:
            raise SnrDomainError("smaller-the-better S/N undefined: all responses are zero")
        u = y / top
        return -20.0 * math.log10(top) - 10.0 * math.log10(float(np.mean(u * u)))
    if criterion.kind == LARGER_THE_BETTER:
        if np.any(y <= 0.0):
            raise SnrDomainError("larger-the-better S/N needs strictly positive responses")
        low = float(np.min(y))
        u = low / y
        return 20.0 * math.log10(low) - 10.0 * math.log10(float(np.mean(u * u)))
    if y.size < 2:
        raise SnrDomainError("nominal-the-best S/N needs at least two responses")
    mean = float(np.mean(y))
    var = float(np.var(y, ddof=1))
    if var <= 0.0 or mean == 0.0:
        raise SnrDomainError("nominal-the-best S/N undefined for zero mean or zero variance")
    return 10.0 * math.log10(mean * mean / var)


@dataclass(frozen=True)
class RunSummary:
    mean: float
    sd: float
    snr: float


def run_summaries(responses: ResponseTable,
                  criterion: SnrCriterion = STB) -> list[RunSummary]:
    out = []
    for row in responses.values:
        sd = sample_sd(row)
        out.append(RunSummary(float(np.mean(row)), 0.0 if sd is None else sd,
                              snr(row, criterion)))
    return out


@dataclass(frozen=True)
class LevelEffect:
    mean: float
    spread: float | None
    snr: float


@dataclass
class MainEffects:
    """Per-factor, per-level mean / spread / S/N, controls first then noise."""

    factors: dict[str, list[LevelEffect]]
    kinds: dict[str, str]
    grand_mean: float
    grand_snr: float
    criterion: SnrCriterion = field(default=STB)

    @property
    def control_codes(self) -> list[str]:
        return [c for c, k in self.kinds.items() if k != NOISE]

    def snr_of(self, code: str, level: int) -> float:
        return self.factors[code][level - 1].snr

    def mean_of(self, code: str, level: int) -> float:
        return self.factors[code][level - 1].mean

    def to_rows(self) -> list[dict]:
        return [{"factor": code, "level": i, "mean": e.mean, "spread": e.spread,
                 "snr": e.snr}
                for code, effects in self.factors.items()
                for i, e in enumerate(effects, start=1)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["factor", "level", "mean", "spread", "snr"])
        for r in self.to_rows():
            writer.writerow([r["factor"], r["level"], repr(r["mean"]),
                             "" if r["spread"] is None else repr(r["spread"]),
                             repr(r["snr"])])
        return buf.getvalue()


def main_effects(plan: Plan, responses: ResponseTable,
                 criterion: SnrCriterion = STB) -> MainEffects:
    summaries = run_summaries(responses, criterion)
    run_means = np.array([s.mean for s in summaries])
    run_snrs = np.array([s.snr for s in summaries])
    levels = plan.level_matrix()
    factors = {}
    kinds = {}
    for i, f in enumerate(plan.controls):
        effects = []
        for L in range(1, f.num_levels + 1):
            mask = levels[:, i] == L
            effects.append(LevelEffect(float(np.mean(run_means[mask])),
                                       sample_sd(run_means[mask]),
                                       float(np.mean(run_snrs[mask]))))
        factors[f.code] = effects
        kinds[f.code] = f.kind
    noise_effects = []
    for L in range(plan.num_noise_levels):
        column = responses.values[:, L]
        noise_effects.append(LevelEffect(float(np.mean(column)), sample_sd(column),
                                         snr(column, criterion)))
    factors[plan.noise.code] = noise_effects
    kinds[plan.noise.code] = NOISE
    return MainEffects(factors, kinds, float(np.mean(run_means)),
                       float(np.mean(run_snrs)), criterion)
