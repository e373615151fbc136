"""Crossed inner/outer array plans and the response tables measured on them."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from . import oa_catalog
from .errors import (DataError, DuplicateCellError, LevelMismatchError,
                     MissingCellError, NonFiniteValueError, PlanError,
                     TooManyFactorsError)
from .oa_catalog import OrthogonalArray

CONTROL = "control"
NOISE = "noise"


@dataclass(frozen=True)
class LevelValue:
    label: str
    value: float | None = None
    unit: str | None = None

    def __post_init__(self):
        if not str(self.label).strip():
            raise PlanError("level label must be non-empty")
        if self.value is not None:
            try:
                value = float(self.value)
            except (TypeError, ValueError):
                raise PlanError(f"level {self.label!r}: value {self.value!r} "
                                "is not a number") from None
            if not math.isfinite(value):
                raise PlanError(f"level {self.label!r}: value must be finite")
            object.__setattr__(self, "value", value)

    def to_dict(self) -> dict:
        out = {"label": self.label}
        if self.value is not None:
            out["value"] = self.value
        if self.unit is not None:
            out["unit"] = self.unit
        return out


@dataclass(frozen=True)
class Factor:
    name: str
    code: str
    kind: str
    levels: tuple[LevelValue, ...]

    def __post_init__(self):
        levels = tuple(lv if isinstance(lv, LevelValue) else LevelValue(str(lv))
                       for lv in self.levels)
        object.__setattr__(self, "levels", levels)
        if self.kind not in (CONTROL, NOISE):
            raise PlanError(f"factor {self.code!r}: kind must be "
                            f"'control' or 'noise' (got {self.kind!r})")
        if not self.code or not str(self.code).isalpha():
            raise PlanError(f"factor code must be alphabetic (got {self.code!r})")
        if len(levels) < 2:
            raise PlanError(f"factor {self.code!r} needs >= 2 levels "
                            f"(got {len(levels)})")
        labels = [lv.label for lv in levels]
        if len(set(labels)) != len(labels):
            raise PlanError(f"factor {self.code!r}: level labels must be unique")

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    def to_dict(self) -> dict:
        return {"name": self.name, "code": self.code,
                "levels": [lv.to_dict() for lv in self.levels]}


@dataclass(frozen=True)
class Plan:
    inner: OrthogonalArray
    controls: tuple[Factor, ...]
    columns: tuple[int, ...]
    noise: Factor
    response_name: str = "response"
    response_unit: str = ""
    nonnegative: bool = False
    annotations: tuple[str, ...] = ()

    @property
    def num_runs(self) -> int:
        return self.inner.num_runs

    @property
    def num_noise_levels(self) -> int:
        return self.noise.num_levels

    @property
    def num_measurements(self) -> int:
        return self.num_runs * self.num_noise_levels

    @property
    def codes(self) -> list[str]:
        return [f.code for f in self.controls]

    def control(self, code: str) -> Factor:
        for f in self.controls:
            if f.code == code:
                return f
        raise KeyError(code)

    def level_matrix(self) -> np.ndarray:
        """Runs x controls matrix of 1-based level indices."""
        return np.column_stack([self.inner.column(j) for j in self.columns])

    def run_for(self, combination: dict[str, int]) -> int | None:
        """1-based inner run whose control levels equal ``combination``."""
        target = [combination[c] for c in self.codes]
        for run, row in enumerate(self.level_matrix().tolist(), start=1):
            if row == target:
                return run
        return None

    def to_dict(self) -> dict:
        out = {
            "response": {"name": self.response_name, "unit": self.response_unit},
            "controls": [f.to_dict() for f in self.controls],
            "noise": self.noise.to_dict(),
            "array": self.inner.name,
        }
        if self.nonnegative:
            out["response"]["nonnegative"] = True
        if self.annotations:
            out["annotations"] = list(self.annotations)
        return out


class ScheduleEntry(NamedTuple):
    run: int
    noise_level: int
    settings: dict


@dataclass(frozen=True, eq=False)
class ResponseTable:
    """Inner-run x noise-level matrix of measurements."""

    values: np.ndarray
    name: str = "response"
    unit: str = ""

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise DataError("response table must be 2-D (runs x noise levels)")
        if not np.all(np.isfinite(values)):
            raise NonFiniteValueError("response table contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def shape(self):
        return self.values.shape

    def cell(self, run: int, noise_level: int) -> float:
        return float(self.values[run - 1, noise_level - 1])

    def __eq__(self, other):
        if not isinstance(other, ResponseTable):
            return NotImplemented
        return (self.name == other.name and self.unit == other.unit
                and np.array_equal(self.values, other.values))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["run", "noise_level", "response"])
        runs, noise = self.values.shape
        for r in range(runs):
            for n in range(noise):
                writer.writerow([r + 1, n + 1, repr(float(self.values[r, n]))])
        return buf.getvalue()


def build_plan(controls: Iterable[Factor], noise: Factor, oa: OrthogonalArray,
               response_name="response", response_unit="", nonnegative=False,
               annotations=()) -> Plan:
    controls = tuple(controls)
    if not controls:
        raise PlanError("plan needs at least one control factor")
    for f in controls:
        if f.kind != CONTROL:
            raise PlanError(f"factor {f.code!r} is not a control factor")
    if noise.kind != NOISE:
        raise PlanError(f"factor {noise.code!r} is not a noise factor")
    codes = [f.code for f in controls] + [noise.code]
    if len(set(codes)) != len(codes):
        raise PlanError(f"factor codes must be unique (got {codes})")
    for f in controls:
        if f.num_levels not in oa.levels:
            raise LevelMismatchError(
                f"factor {f.code!r} has {f.num_levels} levels but {oa.name} "
                f"only has columns with {sorted(set(oa.levels))} levels")
    columns = oa_catalog.assign_columns(oa, [f.num_levels for f in controls])
    if columns is None:
        raise TooManyFactorsError(
            f"{oa.name} has too few columns for {len(controls)} control factors")
    return Plan(oa, controls, tuple(columns), noise, response_name,
                response_unit, bool(nonnegative), tuple(annotations))


def run_schedule(plan: Plan) -> list[ScheduleEntry]:
    """Inner-run-major, then noise level."""
    levels = plan.level_matrix()
    out = []
    for r in range(plan.num_runs):
        settings = {f.code: f.levels[levels[r, i] - 1]
                    for i, f in enumerate(plan.controls)}
        for n in range(1, plan.num_noise_levels + 1):
            out.append(ScheduleEntry(r + 1, n, settings))
    return out


def schedule_csv(plan: Plan) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["run", "noise_level"] + plan.codes)
    for entry in run_schedule(plan):
        writer.writerow([entry.run, entry.noise_level]
                        + [entry.settings[c].label for c in plan.codes])
    return buf.getvalue()


def _as_int(value, what):
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise DataError(f"{what} {value!r} is not an integer") from None
    if not number.is_integer():
        raise DataError(f"{what} {value!r} is not an integer")
    return int(number)


def ingest_responses(plan: Plan, rows: Iterable) -> ResponseTable:
    """Assemble a complete table from (run, noise_level, response) rows.

    Rows may be 3-sequences or mappings with those keys.
    """
    values = np.full((plan.num_runs, plan.num_noise_levels), np.nan)
    seen = set()
    for i, row in enumerate(rows, start=1):
        if isinstance(row, dict):
            try:
                row = (row["run"], row["noise_level"], row["response"])
            except KeyError as exc:
                raise DataError(f"row {i}: missing field {exc.args[0]!r}") from None
        if len(row) != 3:
            raise DataError(f"row {i}: expected 3 fields, got {len(row)}")
        run = _as_int(row[0], f"row {i}: run")
        noise = _as_int(row[1], f"row {i}: noise_level")
        if not 1 <= run <= plan.num_runs:
            raise DataError(f"row {i}: run {run} outside 1..{plan.num_runs}")
        if not 1 <= noise <= plan.num_noise_levels:
            raise DataError(f"row {i}: noise_level {noise} outside "
                            f"1..{plan.num_noise_levels}")
        try:
            value = float(row[2])
        except (TypeError, ValueError):
            raise DataError(f"row {i}: response {row[2]!r} is not a number") from None
        if not math.isfinite(value):
            raise NonFiniteValueError(f"row {i}: response for cell ({run}, {noise}) "
                                      f"is not finite ({row[2]!r})")
        if plan.nonnegative and value < 0:
            raise DataError(f"row {i}: response {value} is negative but "
                            f"{plan.response_name!r} is a magnitude")
        if (run, noise) in seen:
            raise DuplicateCellError(f"row {i}: duplicate cell ({run}, {noise})")
        seen.add((run, noise))
        values[run - 1, noise - 1] = value
    missing = [(r, n) for r in range(1, plan.num_runs + 1)
               for n in range(1, plan.num_noise_levels + 1) if (r, n) not in seen]
    if missing:
        raise MissingCellError(missing)
    return ResponseTable(values, plan.response_name, plan.response_unit)


def _csv_rows(text, header, what):
    reader = csv.DictReader(io.StringIO(text))
    fields = [f.strip() for f in (reader.fieldnames or [])]
    if fields != header:
        raise DataError(f"{what}: expected header {','.join(header)!r}, "
                        f"got {','.join(fields)!r}")
    rows = []
    for row in reader:
        if None in row or any(v is None for v in row.values()):
            raise DataError(f"{what}: line {reader.line_num} has the wrong "
                            "number of fields")
        rows.append({k.strip(): v.strip() for k, v in row.items()})
    return rows


def read_responses(plan: Plan, source) -> ResponseTable:
    """Parse the ``run,noise_level,response`` CSV (path or text)."""
    text = Path(source).read_text() if isinstance(source, Path) else str(source)
    return ingest_responses(plan, _csv_rows(text, ["run", "noise_level", "response"],
                                            "responses"))


# -- plan file ------------------------------------------------------------

def _require(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise PlanError(f"{where}: missing required field {key!r}")
    value = obj[key]
    if not isinstance(value, kind):
        raise PlanError(f"{where}.{key}: expected {kind.__name__}, "
                        f"got {type(value).__name__}")
    return value


def _level_from_dict(d, where):
    if isinstance(d, str):
        return LevelValue(d)
    label = _require(d, "label", str, where)
    value = d.get("value")
    if value is not None and (isinstance(value, bool)
                              or not isinstance(value, (int, float))):
        raise PlanError(f"{where}.value: expected a number")
    unit = d.get("unit")
    if unit is not None and not isinstance(unit, str):
        raise PlanError(f"{where}.unit: expected a string")
    return LevelValue(label, value, unit)


def _factor_from_dict(d, kind, where):
    name = _require(d, "name", str, where)
    code = _require(d, "code", str, where)
    levels = _require(d, "levels", list, where)
    return Factor(name, code, kind,
                  tuple(_level_from_dict(lv, f"{where}.levels[{i}]")
                        for i, lv in enumerate(levels)))


def plan_from_dict(d: dict) -> Plan:
    if not isinstance(d, dict):
        raise PlanError("plan: expected a JSON object")
    response = _require(d, "response", dict, "plan")
    rname = _require(response, "name", str, "plan.response")
    unit = response.get("unit", "")
    if not isinstance(unit, str):
        raise PlanError("plan.response.unit: expected a string")
    controls = _require(d, "controls", list, "plan")
    noise = _require(d, "noise", dict, "plan")
    array = _require(d, "array", str, "plan")
    annotations = d.get("annotations", [])
    if not isinstance(annotations, list) or not all(isinstance(a, str)
                                                    for a in annotations):
        raise PlanError("plan.annotations: expected a list of strings")
    factors = [_factor_from_dict(c, CONTROL, f"plan.controls[{i}]")
               for i, c in enumerate(controls)]
    noise_factor = _factor_from_dict(noise, NOISE, "plan.noise")
    return build_plan(factors, noise_factor, oa_catalog.lookup(array), rname, unit,
                      bool(response.get("nonnegative", False)), annotations)


def load_plan(path) -> Plan:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise PlanError(f"plan: invalid JSON ({exc})") from None
    return plan_from_dict(data)
