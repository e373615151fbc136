"""Command-line front end.

Exit codes: 0 success, 2 plan/schema error, 3 data error, 4 degenerate
statistics.
"""
from __future__ import annotations

import argparse
import json
import shutil
import sys
from importlib import resources
from pathlib import Path

from . import __version__, oa_catalog
from .anova import DEFAULT_ALPHA
from .design import load_plan, read_responses, schedule_csv
from .errors import DataError, DegenerateError, DomainError, PlanError
from .optimizer import (DEFAULT_DELTA_DB, analyze_confirmation, optimal_levels,
                        read_confirmation)
from .report import (build_report, dumps, render_confirmation, render_optimal,
                     selection_dict, write_bundle)
from .response_stats import SnrCriterion, main_effects

EXIT_OK = 0
EXIT_PLAN = 2
EXIT_DATA = 3
EXIT_DEGENERATE = 4


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _read_bytes(path, code, what) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(code, f"cannot read {what} {str(path)!r}: {exc.strerror}") from None


def _load_plan(path):
    data = _read_bytes(path, EXIT_PLAN, "plan file")
    return load_plan(path), data


def _load_inputs(args):
    plan, plan_bytes = _load_plan(args.plan)
    resp_bytes = _read_bytes(args.responses, EXIT_DATA, "responses file")
    responses = read_responses(plan, resp_bytes.decode("utf-8"))
    inputs = {"plan": (Path(args.plan).name, plan_bytes),
              "responses": (Path(args.responses).name, resp_bytes)}
    return plan, responses, inputs


def _criterion(args) -> SnrCriterion:
    try:
        return SnrCriterion.parse(args.criterion)
    except DomainError as exc:
        raise CliError(EXIT_PLAN, str(exc)) from None


def cmd_plan(args) -> int:
    plan, _ = _load_plan(args.plan)
    out = _out_dir(args)
    (out / "schedule.csv").write_text(schedule_csv(plan))
    print(f"{plan.inner.name}: {plan.num_runs} inner runs x "
          f"{plan.num_noise_levels} noise levels = {plan.num_measurements} runs")
    print(f"schedule written to {out / 'schedule.csv'}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    plan, responses, inputs = _load_inputs(args)
    report = build_report(plan, responses, criterion=_criterion(args),
                          alpha=args.alpha, delta=args.delta_db, inputs=inputs)
    out = _out_dir(args)
    write_bundle(out, report)
    for code, table in report["anova"].items():
        factor = table["rows"][0]
        print(f"ANOVA {code}: F({factor['df']},{table['rows'][1]['df']}) = "
              f"{_num(factor['f'])}, p = {_num(factor['p'])}")
    for code, t in report["tukey"].items():
        sig = [f"{code}{a}-{code}{b}" for p in t["pairs"] if p["significant"]
               for a, b in [p["levels"]]]
        print(f"Tukey {code}: significant pairs {', '.join(sig) or 'none'}")
    print(f"report written to {out / 'report.md'}")
    return EXIT_OK


def _num(v):
    return v if isinstance(v, str) or v is None else f"{v:.2f}"


def cmd_optimize(args) -> int:
    plan, responses, _ = _load_inputs(args)
    criterion = _criterion(args)
    effects = main_effects(plan, responses, criterion)
    selection = optimal_levels(effects, criterion, args.delta_db)
    data = selection_dict(selection, effects)
    out = _out_dir(args)
    (out / "optimal.json").write_text(dumps(data))
    md = render_optimal(data, data["predictions"])
    (out / "optimal.md").write_text("\n".join(md).rstrip() + "\n")
    for p in data["predictions"]:
        print(f"{p['combination']}: predicted mean {p['predicted_mean']:.2f}, "
              f"predicted S/N {p['predicted_snr']:.2f} dB")
    return EXIT_OK


def cmd_confirm(args) -> int:
    plan, responses, inputs = _load_inputs(args)
    criterion = _criterion(args)
    conf_bytes = _read_bytes(args.confirmation, EXIT_DATA, "confirmation file")
    runs = read_confirmation(plan, conf_bytes.decode("utf-8"))
    inputs["confirmation"] = (Path(args.confirmation).name, conf_bytes)
    effects = main_effects(plan, responses, criterion)
    confirmation = analyze_confirmation(plan, effects, responses, runs, criterion)
    report = build_report(plan, responses, criterion=criterion, alpha=args.alpha,
                          delta=args.delta_db, inputs=inputs, confirmation=confirmation)
    out = _out_dir(args)
    write_bundle(out, report)
    conf = json.loads(dumps(confirmation.to_dict()))
    (out / "confirmation.json").write_text(dumps(conf))
    md = "\n".join(render_confirmation(conf, plan.noise.code)).rstrip() + "\n"
    (out / "confirmation.md").write_text(md)
    print(md, end="")
    return EXIT_OK


def cmd_array(args) -> int:
    try:
        oa = oa_catalog.lookup(args.name)
    except PlanError as exc:
        raise CliError(EXIT_PLAN, str(exc)) from None
    sys.stdout.write(oa.to_csv())
    return EXIT_OK


def cmd_example(args) -> int:
    out = _out_dir(args)
    source = resources.files("robustdoe") / "datasets" / "headform"
    for name in ("plan.json", "responses.csv", "confirmation.csv"):
        with resources.as_file(source / name) as path:
            shutil.copyfile(path, out / name)
    print(f"example dataset copied to {out}")
    return EXIT_OK


def _probability(text):
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return value


def _non_negative(text):
    value = float(text)
    if not value >= 0.0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustdoe", description="Taguchi robust parameter design analysis")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, responses=True):
        p.add_argument("plan", help="plan JSON file")
        if responses:
            p.add_argument("responses", help="responses CSV (run,noise_level,response)")
        p.add_argument("--out", default="doe-out", help="output directory (default: %(default)s)")

    def analysis_flags(p):
        p.add_argument("--alpha", type=_probability, default=DEFAULT_ALPHA,
                       help="significance level (default: %(default)s)")
        p.add_argument("--criterion", default="smaller-the-better",
                       help="smaller-the-better | larger-the-better | "
                            "nominal-the-best:<target> (default: %(default)s)")
        p.add_argument("--delta-db", type=_non_negative, default=DEFAULT_DELTA_DB,
                       help="near-optimal S/N window in dB (default: %(default)s)")

    p = sub.add_parser("plan", help="validate a plan and write the run schedule")
    common(p, responses=False)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("analyze", help="S/N, main effects, ANOVA and Tukey report")
    common(p)
    analysis_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("optimize", help="optimal levels and predictions")
    common(p)
    analysis_flags(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("confirm", help="analyze confirmation runs")
    common(p)
    p.add_argument("confirmation", help="confirmation CSV (combination,noise_level,response)")
    analysis_flags(p)
    p.set_defaults(func=cmd_confirm)

    p = sub.add_parser("array", help="print a catalog orthogonal array as CSV")
    p.add_argument("name")
    p.set_defaults(func=cmd_array)

    p = sub.add_parser("example", help="copy the bundled example dataset")
    p.add_argument("--out", default="headform-example")
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except PlanError as exc:
        print(f"plan error: {exc}", file=sys.stderr)
        return EXIT_PLAN
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DegenerateError as exc:
        print(f"degenerate statistics: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PLAN


if __name__ == "__main__":
    sys.exit(main())
