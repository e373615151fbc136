"""Optimal-level selection, additive prediction, quality loss and confirmation runs."""
from __future__ import annotations

import csv
import io
import itertools
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .design import Plan, ResponseTable
from .errors import CombinationError, DataError, DomainError
from .response_stats import (LARGER_THE_BETTER, NOMINAL_THE_BEST, STB, MainEffects,
                             SnrCriterion, run_summaries, sample_sd, snr)

# Wide enough for the bundled headform data's near-optimal sets (gaps 0.09 and
# 0.19 dB), narrow enough to exclude the next levels (0.37 and 0.48 dB).
DEFAULT_DELTA_DB = 0.3

_TOKEN = re.compile(r"^([A-Za-z]+)(\d+)$")


def format_combination(combination: dict[str, int]) -> str:
    return "-".join(f"{code}{level}" for code, level in combination.items())


def parse_combination(text: str, plan: Plan) -> dict[str, int]:
    """``"A2-B1"`` -> ``{"A": 2, "B": 1}`` in plan factor order."""
    parts = [p.strip() for p in str(text).strip().split("-")]
    found = {}
    for part in parts:
        match = _TOKEN.match(part)
        if not match:
            raise CombinationError(f"malformed combination {text!r}: "
                                   f"expected code-level tokens like 'A2-B1'")
        code, level = match.group(1), int(match.group(2))
        if code not in plan.codes:
            raise CombinationError(f"combination {text!r}: unknown factor {code!r}")
        if code in found:
            raise CombinationError(f"combination {text!r}: factor {code!r} repeated")
        n = plan.control(code).num_levels
        if not 1 <= level <= n:
            raise CombinationError(f"combination {text!r}: unknown level {code}{level} "
                                   f"({code} has levels 1..{n})")
        found[code] = level
    missing = [c for c in plan.codes if c not in found]
    if missing:
        raise CombinationError(f"combination {text!r}: no level for {', '.join(missing)}")
    return {c: found[c] for c in plan.codes}


@dataclass(frozen=True)
class FactorSelection:
    code: str
    best_level: int
    near_optimal: tuple[int, ...]
    ranking: tuple[int, ...]


@dataclass(frozen=True)
class OptimalSelection:
    delta: float
    factors: tuple[FactorSelection, ...]
    recommended: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "delta_db": self.delta,
            "factors": [{"code": f.code, "best_level": f.best_level,
                         "near_optimal": list(f.near_optimal),
                         "ranking": list(f.ranking)} for f in self.factors],
            "recommended": [format_combination(c) for c in self.recommended],
        }


def optimal_levels(effects: MainEffects, criterion: SnrCriterion | None = None,
                   delta: float = DEFAULT_DELTA_DB) -> OptimalSelection:
    """Best and near-optimal levels per control factor by S/N.

    Ties go to the lower level index. Recommended combinations are the
    cross product of near-optimal sets in lexicographic order.
    """
    if criterion is not None and criterion != effects.criterion:
        raise DomainError(f"main effects were computed under {effects.criterion}, "
                          f"not {criterion}")
    if not delta >= 0:
        raise DomainError(f"delta must be >= 0 dB (got {delta})")
    selections = []
    for code in effects.control_codes:
        values = [e.snr for e in effects.factors[code]]
        best = 0
        for i, v in enumerate(values):
            if v > values[best]:
                best = i
        cutoff = values[best] - delta
        near = tuple(i + 1 for i, v in enumerate(values) if v >= cutoff)
        ranking = tuple(i + 1 for i in sorted(range(len(values)),
                                               key=lambda i: (-values[i], i)))
        selections.append(FactorSelection(code, best + 1, near, ranking))
    recommended = tuple(
        dict(zip(effects.control_codes, combo))
        for combo in itertools.product(*(s.near_optimal for s in selections)))
    return OptimalSelection(float(delta), tuple(selections), recommended)


@dataclass(frozen=True)
class Prediction:
    combination: dict
    predicted_snr: float
    predicted_mean: float

    @property
    def label(self) -> str:
        return format_combination(self.combination)


def predict(effects: MainEffects, combination: dict[str, int]) -> Prediction:
    """Additive main-effects prediction of S/N and mean."""
    codes = effects.control_codes
    unknown = [c for c in combination if c not in codes]
    if unknown:
        raise CombinationError(f"unknown control factor(s) {unknown}")
    missing = [c for c in codes if c not in combination]
    if missing:
        raise CombinationError(f"no level given for {missing}")
    s = effects.grand_snr
    m = effects.grand_mean
    for code in codes:
        level = combination[code]
        n = len(effects.factors[code])
        if not (isinstance(level, (int, np.integer)) and 1 <= level <= n):
            raise CombinationError(f"unknown level {code}{level} "
                                   f"({code} has levels 1..{n})")
        s += effects.snr_of(code, level) - effects.grand_snr
        m += effects.mean_of(code, level) - effects.grand_mean
    return Prediction({c: int(combination[c]) for c in codes}, s, m)


def quality_loss(responses, criterion: SnrCriterion = STB, k_const=1.0) -> float:
    """Average quadratic quality loss per unit for the given criterion."""
    if not k_const > 0:
        raise DomainError(f"loss constant must be > 0 (got {k_const})")
    y = np.asarray(responses, dtype=float).ravel()
    if y.size == 0:
        raise DomainError("quality loss of an empty response list")
    if criterion.kind == NOMINAL_THE_BEST:
        return float(k_const * np.mean((y - criterion.target) ** 2))
    if criterion.kind == LARGER_THE_BETTER:
        if np.any(y == 0.0):
            raise DomainError("larger-the-better loss undefined for a zero response")
        return float(k_const * np.mean(1.0 / (y * y)))
    return float(k_const * np.mean(y * y))


# -- confirmation runs ----------------------------------------------------

@dataclass(frozen=True)
class ConfirmationCell:
    noise_level: int
    runs: tuple[float, ...]
    mean: float
    sd: float | None
    reference: float | None      # main-array cell for the matching run
    delta: float | None          # mean - reference


@dataclass(frozen=True)
class ConfirmationCombo:
    combination: dict
    cells: tuple[ConfirmationCell, ...]
    mean: float
    snr: float
    reference_run: int | None
    reference_mean: float | None
    reference_snr: float | None
    prediction: Prediction

    @property
    def label(self) -> str:
        return format_combination(self.combination)

    @property
    def mean_delta_vs_run(self):
        return None if self.reference_mean is None else self.mean - self.reference_mean

    @property
    def snr_delta_vs_run(self):
        return None if self.reference_snr is None else self.snr - self.reference_snr

    @property
    def mean_delta_vs_prediction(self):
        return self.mean - self.prediction.predicted_mean

    @property
    def snr_delta_vs_prediction(self):
        return self.snr - self.prediction.predicted_snr


@dataclass(frozen=True)
class ConfirmationReport:
    criterion: SnrCriterion
    combos: tuple[ConfirmationCombo, ...]

    def to_dict(self) -> dict:
        return {
            "criterion": str(self.criterion),
            "combinations": [
                {
                    "combination": c.label,
                    "cells": [{"noise_level": cell.noise_level, "runs": list(cell.runs),
                               "mean": cell.mean, "sd": cell.sd,
                               "reference": cell.reference, "delta": cell.delta}
                              for cell in c.cells],
                    "mean": c.mean,
                    "snr": c.snr,
                    "reference_run": c.reference_run,
                    "reference_mean": c.reference_mean,
                    "reference_snr": c.reference_snr,
                    "predicted_mean": c.prediction.predicted_mean,
                    "predicted_snr": c.prediction.predicted_snr,
                    "mean_delta_vs_run": c.mean_delta_vs_run,
                    "snr_delta_vs_run": c.snr_delta_vs_run,
                    "mean_delta_vs_prediction": c.mean_delta_vs_prediction,
                    "snr_delta_vs_prediction": c.snr_delta_vs_prediction,
                }
                for c in self.combos
            ],
        }


def read_confirmation(plan: Plan, source) -> dict[str, dict[int, list[float]]]:
    """Parse ``combination,noise_level,response`` CSV (path or text).

    Returns {combination label: {noise level: [responses]}} in file order.
    """
    text = Path(source).read_text() if isinstance(source, Path) else str(source)
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if any(cell.strip() for cell in r)]
    if not rows:
        raise DataError("confirmation file is empty")
    header = [h.strip() for h in rows[0]]
    if header != ["combination", "noise_level", "response"]:
        raise DataError("confirmation: expected header "
                        f"'combination,noise_level,response', got {','.join(header)!r}")
    if len(rows) == 1:
        raise DataError("confirmation file has no data rows")
    runs: dict[str, dict[int, list[float]]] = {}
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise DataError(f"confirmation line {i}: expected 3 fields, got {len(row)}")
        combination = parse_combination(row[0], plan)
        label = format_combination(combination)
        try:
            noise = int(row[1])
        except ValueError:
            raise DataError(f"confirmation line {i}: noise_level {row[1]!r} "
                            "is not an integer") from None
        if not 1 <= noise <= plan.num_noise_levels:
            raise DataError(f"confirmation line {i}: noise_level {noise} outside "
                            f"1..{plan.num_noise_levels}")
        try:
            value = float(row[2])
        except ValueError:
            raise DataError(f"confirmation line {i}: response {row[2]!r} "
                            "is not a number") from None
        if not np.isfinite(value):
            raise DataError(f"confirmation line {i}: response is not finite")
        runs.setdefault(label, {}).setdefault(noise, []).append(value)
    return runs


def analyze_confirmation(plan: Plan, effects: MainEffects, responses: ResponseTable,
                         runs: dict[str, dict[int, list[float]]],
                         criterion: SnrCriterion | None = None) -> ConfirmationReport:
    """Summarize confirmation runs and compare them with the main array.

    ``runs`` maps a combination label (``"A2-B1"``) to per-noise-level
    response lists. Deltas are signed: confirmation minus reference.
    """
    criterion = criterion or effects.criterion
    if not runs:
        raise DataError("no confirmation runs given")
    summaries = run_summaries(responses, criterion)
    combos = []
    for label, per_noise in runs.items():
        combination = parse_combination(label, plan)
        ref_run = plan.run_for(combination)
        cells = []
        pooled = []
        for noise in range(1, plan.num_noise_levels + 1):
            values = [float(v) for v in per_noise.get(noise, [])]
            if not values:
                raise DataError(f"confirmation {label}: no runs at noise level {noise}")
            pooled.extend(values)
            mean = float(np.mean(values))
            reference = None if ref_run is None else responses.cell(ref_run, noise)
            cells.append(ConfirmationCell(noise, tuple(values), mean, sample_sd(values),
                                          reference,
                                          None if reference is None else mean - reference))
        extra = set(per_noise) - set(range(1, plan.num_noise_levels + 1))
        if extra:
            raise DataError(f"confirmation {label}: unknown noise level(s) {sorted(extra)}")
        ref = None if ref_run is None else summaries[ref_run - 1]
        combos.append(ConfirmationCombo(
            combination, tuple(cells), float(np.mean(pooled)), snr(pooled, criterion),
            ref_run, None if ref is None else ref.mean, None if ref is None else ref.snr,
            predict(effects, combination)))
    return ConfirmationReport(criterion, tuple(combos))
