"""Taguchi robust parameter design toolkit."""

__version__ = "0.1.0"

from .anova import AnovaTable, TukeyResult, one_way_anova, tukey_hsd  # noqa: E402
from .design import (Factor, LevelValue, Plan, ResponseTable, build_plan,  # noqa: E402
                     ingest_responses, load_plan, run_schedule)
from .oa_catalog import OrthogonalArray, lookup, select_array, verify  # noqa: E402
from .optimizer import (analyze_confirmation, optimal_levels, predict,  # noqa: E402
                        quality_loss)
from .response_stats import (MainEffects, RunSummary, SnrCriterion,  # noqa: E402
                             main_effects, run_summaries, snr)
from .special import BACKEND, f_p_value, studentized_range_q  # noqa: E402

__all__ = [
    "AnovaTable", "BACKEND", "Factor", "LevelValue", "MainEffects", "OrthogonalArray",
    "Plan", "ResponseTable", "RunSummary", "SnrCriterion", "TukeyResult",
    "analyze_confirmation", "build_plan", "f_p_value", "ingest_responses", "load_plan",
    "lookup", "main_effects", "one_way_anova", "optimal_levels", "predict",
    "quality_loss", "run_schedule", "run_summaries", "select_array", "snr",
    "studentized_range_q", "tukey_hsd", "verify",
]
