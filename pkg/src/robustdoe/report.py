"""Analysis bundle assembly, JSON serialization and Markdown rendering.

Markdown is always rendered from the JSON-ready dict, so re-rendering a
saved ``report.json`` reproduces ``report.md`` exactly.
"""
from __future__ import annotations

import hashlib
import json
import math

from . import __version__
from .anova import DEFAULT_ALPHA, factor_anovas, gated_tukey
from .design import Plan, ResponseTable
from .errors import DegenerateError
from .optimizer import (DEFAULT_DELTA_DB, ConfirmationReport, OptimalSelection,
                        optimal_levels, predict)
from .response_stats import STB, SnrCriterion, main_effects, run_summaries

REPORT_KEYS = ("plan", "oa_table", "main_effects", "anova", "tukey", "optimal",
               "predictions", "confirmation", "provenance")


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _jsonable(obj):
    # non-finite floats are not valid JSON
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def _tukey_dict(result):
    return {
        "alpha": result.alpha,
        "q_critical": result.q_critical,
        "hsd_threshold": result.hsd_threshold,
        "group_means": list(result.group_means),
        "pairs": [{"levels": [p.level_a, p.level_b], "mean_diff": p.mean_diff,
                   "significant": p.significant, "p_adj": p.p_adj}
                  for p in result.pairs],
    }


def selection_dict(selection: OptimalSelection, effects) -> dict:
    out = selection.to_dict()
    out["predictions"] = [_prediction_dict(predict(effects, c))
                          for c in selection.recommended]
    return out


def _prediction_dict(pred):
    return {"combination": pred.label, "predicted_snr": pred.predicted_snr,
            "predicted_mean": pred.predicted_mean}


def build_report(plan: Plan, responses: ResponseTable, *,
                 criterion: SnrCriterion = STB, alpha=DEFAULT_ALPHA,
                 delta=DEFAULT_DELTA_DB, inputs: dict | None = None,
                 confirmation: ConfirmationReport | None = None) -> dict:
    """Full analysis bundle as a JSON-ready dict.

    ``inputs`` maps an input role to ``(file name, raw bytes)`` and feeds the
    provenance digests.
    """
    summaries = run_summaries(responses, criterion)
    effects = main_effects(plan, responses, criterion)
    anovas = factor_anovas(plan, responses)
    for code, table in anovas.items():
        if table.degenerate == "constant-data":
            raise DegenerateError(f"ANOVA for factor {code!r} is undefined: "
                                  "all responses are identical")
    tukeys = gated_tukey(plan, responses, anovas, alpha)
    selection = optimal_levels(effects, criterion, delta)

    levels = plan.level_matrix()
    oa_table = [
        {"run": r + 1,
         "levels": {code: int(levels[r, i]) for i, code in enumerate(plan.codes)},
         "responses": [float(v) for v in responses.values[r]],
         "mean": s.mean, "sd": s.sd, "snr": s.snr}
        for r, s in enumerate(summaries)
    ]
    factors = list(plan.controls) + [plan.noise]
    effects_dict = {
        "criterion": str(criterion),
        "grand_mean": effects.grand_mean,
        "grand_snr": effects.grand_snr,
        "factors": {
            f.code: {"name": f.name, "kind": f.kind,
                     "levels": [{"level": i, "label": f.levels[i - 1].label,
                                 "mean": e.mean, "spread": e.spread, "snr": e.snr}
                                for i, e in enumerate(effects.factors[f.code], start=1)]}
            for f in factors
        },
    }
    plan_dict = plan.to_dict()
    plan_dict["columns"] = dict(zip(plan.codes, plan.columns))
    plan_dict["measurements"] = plan.num_measurements

    provenance = {"tool": "robustdoe", "version": __version__,
                  "settings": {"alpha": alpha, "criterion": str(criterion),
                               "delta_db": delta},
                  "inputs": {role: {"file": name, "sha256": digest(data)}
                             for role, (name, data) in sorted((inputs or {}).items())}}
    report = {
        "plan": plan_dict,
        "oa_table": oa_table,
        "main_effects": effects_dict,
        "anova": {code: {"rows": t.rows(), "degenerate": t.degenerate}
                  for code, t in anovas.items()},
        "tukey": {code: _tukey_dict(t) for code, t in tukeys.items()},
        "optimal": selection.to_dict(),
        "predictions": [_prediction_dict(predict(effects, c))
                        for c in selection.recommended],
        "confirmation": None if confirmation is None else confirmation.to_dict(),
        "provenance": provenance,
    }
    return _jsonable(report)


# -- Markdown ------------------------------------------------------------

def fmt(value, digits=2) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, int):
        return str(value)
    return f"{value:.{digits}f}"


def _table(header, rows) -> list[str]:
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(row) + " |" for row in rows]
    return lines + [""]


def _mean_sd(mean, sd):
    return fmt(mean) if sd is None else f"{fmt(mean)} ({fmt(sd)})"


def render_optimal(optimal: dict, predictions: list[dict]) -> list[str]:
    lines = [f"## Optimal levels (near-optimal within {fmt(optimal['delta_db'])} dB)", ""]
    lines += _table(["Factor", "Best level", "Near-optimal", "Ranking by S/N"],
                    [[f["code"], str(f["best_level"]),
                      ", ".join(str(v) for v in f["near_optimal"]),
                      " > ".join(str(v) for v in f["ranking"])]
                     for f in optimal["factors"]])
    lines += ["Recommended combinations: " + ", ".join(optimal["recommended"]), ""]
    lines += _table(["Combination", "Predicted mean", "Predicted S/N (dB)"],
                    [[p["combination"], fmt(p["predicted_mean"]), fmt(p["predicted_snr"])]
                     for p in predictions])
    return lines


def render_confirmation(conf: dict, noise_code: str) -> list[str]:
    combos = conf["combinations"]
    if not combos:
        return []
    noise_levels = [c["noise_level"] for c in combos[0]["cells"]]
    header = ["Combination"] + [f"{noise_code}{n}" for n in noise_levels]
    rows = []
    for c in combos:
        depth = max(len(cell["runs"]) for cell in c["cells"])
        for i in range(depth):
            rows.append([c["combination"] if i == 0 else ""]
                        + [fmt(cell["runs"][i]) if i < len(cell["runs"]) else ""
                           for cell in c["cells"]])
        rows.append(["Mean (SD)"] + [_mean_sd(cell["mean"], cell["sd"])
                                     for cell in c["cells"]])
    lines = ["## Confirmation runs", ""] + _table(header, rows)
    lines += ["### Confirmation versus main array and prediction", ""]
    lines += _table(
        ["Combination", "Run", "Mean", "S/N (dB)", "Mean - run", "S/N - run",
         "Mean - predicted", "S/N - predicted"]
        + [f"{noise_code}{n} - run" for n in noise_levels],
        [[c["combination"], fmt(c["reference_run"]), fmt(c["mean"]), fmt(c["snr"]),
          fmt(c["mean_delta_vs_run"]), fmt(c["snr_delta_vs_run"]),
          fmt(c["mean_delta_vs_prediction"]), fmt(c["snr_delta_vs_prediction"])]
         + [fmt(cell["delta"]) for cell in c["cells"]]
         for c in combos])
    return lines


def render_markdown(report: dict) -> str:
    plan = report["plan"]
    codes = [c["code"] for c in plan["controls"]]
    noise_code = plan["noise"]["code"]
    response = plan["response"]
    unit = f" ({response['unit']})" if response.get("unit") else ""
    lines = ["# Robust parameter design report", "",
             f"Response: {response['name']}{unit}. Inner array {plan['array']}, "
             f"columns " + ", ".join(f"{c}->{j}" for c, j in plan["columns"].items())
             + f"; noise factor {noise_code} at {len(plan['noise']['levels'])} levels; "
             f"{plan['measurements']} measurements.", ""]

    n_noise = len(plan["noise"]["levels"])
    lines += ["## Completed orthogonal array", ""]
    lines += _table(
        ["Run"] + codes + [f"{noise_code}{n}" for n in range(1, n_noise + 1)]
        + ["Mean", "SD", "S/N"],
        [[str(row["run"])] + [str(row["levels"][c]) for c in codes]
         + [fmt(v) for v in row["responses"]]
         + [fmt(row["mean"]), fmt(row["sd"]), fmt(row["snr"])]
         for row in report["oa_table"]])

    effects = report["main_effects"]
    all_codes = list(effects["factors"])
    depth = max(len(f["levels"]) for f in effects["factors"].values())

    def per_level(cell):
        rows = []
        for L in range(depth):
            row = [str(L + 1)]
            for code in all_codes:
                levels = effects["factors"][code]["levels"]
                row.append(cell(levels[L]) if L < len(levels) else "")
            rows.append(row)
        return rows

    lines += ["## Main effects: mean (spread)", ""]
    lines += _table(["Level"] + all_codes,
                    per_level(lambda e: _mean_sd(e["mean"], e["spread"])))
    lines += [f"## Main effects: S/N (dB, {effects['criterion']})", ""]
    lines += _table(["Level"] + all_codes, per_level(lambda e: fmt(e["snr"])))
    lines += [f"Grand mean {fmt(effects['grand_mean'])}, "
              f"grand S/N {fmt(effects['grand_snr'])} dB.", ""]

    for code, table in report["anova"].items():
        lines += [f"## ANOVA: {effects['factors'][code]['name']} ({code})", ""]
        lines += _table(["Source", "df", "SS", "MS", "F", "p"],
                        [[r["source"], fmt(r["df"]), fmt(r["ss"]), fmt(r["ms"]),
                          fmt(r["f"]), fmt(r["p"])] for r in table["rows"]])
        if table["degenerate"]:
            lines += [f"Degenerate: {table['degenerate']}.", ""]

    for code, t in report["tukey"].items():
        lines += [f"## Tukey HSD: {code}", "",
                  f"alpha {fmt(t['alpha'])}, q {fmt(t['q_critical'], 3)}, "
                  f"HSD {fmt(t['hsd_threshold'], 3)}.", ""]
        lines += _table(["Pair", "Mean difference", "Adjusted p", "Significant"],
                        [[f"{code}{a} vs {code}{b}", fmt(p["mean_diff"]), fmt(p["p_adj"]),
                          fmt(p["significant"])]
                         for p in t["pairs"] for a, b in [p["levels"]]])

    lines += render_optimal(report["optimal"], report["predictions"])
    if report.get("confirmation"):
        lines += render_confirmation(report["confirmation"], noise_code)

    prov = report["provenance"]
    lines += ["## Provenance", "", f"{prov['tool']} {prov['version']}; settings: "
              + ", ".join(f"{k}={v}" for k, v in prov["settings"].items()), ""]
    for role, info in prov["inputs"].items():
        lines.append(f"- {role}: `{info['file']}` sha256 `{info['sha256']}`")
    return "\n".join(lines).rstrip() + "\n"


def write_bundle(out_dir, report: dict) -> None:
    """Write report.json, report.md and the main-effects plot data."""
    text = dumps(report)
    (out_dir / "report.json").write_text(text)
    (out_dir / "report.md").write_text(render_markdown(json.loads(text)))
    rows = ["factor,level,mean,spread,snr"]
    for code, f in report["main_effects"]["factors"].items():
        for e in f["levels"]:
            spread = "" if e["spread"] is None else repr(e["spread"])
            rows.append(f"{code},{e['level']},{e['mean']!r},{spread},{e['snr']!r}")
    (out_dir / "main_effects.csv").write_text("\n".join(rows) + "\n")

