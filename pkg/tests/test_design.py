import copy
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robustdoe.design import (Factor, LevelValue, ResponseTable, build_plan, ingest_responses,
                              load_plan, plan_from_dict, read_responses, run_schedule,
                              schedule_csv)
from robustdoe.errors import (DataError, DuplicateCellError, LevelMismatchError,
                              MissingCellError, NonFiniteValueError, PlanError,
                              TooManyFactorsError, UnknownArrayError)
from robustdoe.oa_catalog import lookup

from conftest import STUDY_Y


def three_level(code, kind="control"):
    return Factor(code.lower(), code, kind, tuple(LevelValue(f"{code}{i}") for i in (1, 2, 3)))


def small_plan(noise_levels=3):
    noise = Factor("noise", "X", "noise",
                   tuple(LevelValue(f"x{i}") for i in range(1, noise_levels + 1)))
    return build_plan([three_level("A"), three_level("B")], noise, lookup("L9"))


def rows_for(values):
    return [(r + 1, n + 1, values[r, n]) for r in range(values.shape[0])
            for n in range(values.shape[1])]


class TestPlan:
    def test_study_plan_has_27_measurements(self, study_plan):
        assert study_plan.inner.name == "L9"
        assert study_plan.columns == (1, 2)
        assert study_plan.num_measurements == 27

    def test_two_level_noise_gives_18(self):
        assert small_plan(noise_levels=2).num_measurements == 18

    def test_single_level_noise_rejected(self):
        with pytest.raises(PlanError, match=">= 2 levels"):
            Factor("noise", "X", "noise", (LevelValue("only"),))

    def test_level_mismatch(self):
        four = Factor("d", "D", "control", tuple(LevelValue(str(i)) for i in range(4)))
        with pytest.raises(LevelMismatchError):
            build_plan([four], three_level("X", "noise"), lookup("L9"))

    def test_too_many_factors(self):
        controls = [three_level(c) for c in "ABCDE"]
        with pytest.raises(TooManyFactorsError):
            build_plan(controls, three_level("X", "noise"), lookup("L9"))

    def test_kind_checked(self):
        with pytest.raises(PlanError):
            build_plan([three_level("A", "noise")], three_level("X", "noise"), lookup("L9"))

    def test_duplicate_codes(self):
        with pytest.raises(PlanError, match="unique"):
            build_plan([three_level("A"), three_level("A")], three_level("X", "noise"),
                       lookup("L9"))

    def test_non_finite_level_value(self):
        with pytest.raises(PlanError, match="finite"):
            LevelValue("bad", float("inf"))

    def test_annotations_recorded(self, study_plan):
        assert any("0.4 kg" in a for a in study_plan.annotations)

    def test_run_for(self, study_plan):
        assert study_plan.run_for({"A": 2, "B": 1}) == 4
        assert study_plan.run_for({"A": 3, "B": 3}) == 9


class TestSchedule:
    def test_first_entry(self, study_plan):
        first = run_schedule(study_plan)[0]
        assert (first.run, first.noise_level) == (1, 1)
        assert first.settings["A"].value == 1.0 and first.settings["A"].unit == "mm"
        assert first.settings["B"].value == 0.2 and first.settings["B"].unit == "MPa"

    def test_run_four(self, study_plan):
        entry = next(e for e in run_schedule(study_plan) if (e.run, e.noise_level) == (4, 1))
        assert entry.settings["A"].value == 3.0
        assert entry.settings["B"].value == 0.2

    def test_ordering_run_major(self, study_plan):
        keys = [(e.run, e.noise_level) for e in run_schedule(study_plan)]
        assert keys == sorted(keys)
        assert len(keys) == 27

    def test_length_with_two_noise_levels(self):
        plan = small_plan(noise_levels=2)
        assert len(run_schedule(plan)) == plan.num_runs * 2

    def test_levels_partition_runs(self, study_plan):
        for code in study_plan.codes:
            counts = {}
            for e in run_schedule(study_plan):
                if e.noise_level == 1:
                    counts[e.settings[code].label] = counts.get(e.settings[code].label, 0) + 1
            assert sorted(counts.values()) == [3, 3, 3]

    def test_csv(self, study_plan):
        lines = schedule_csv(study_plan).splitlines()
        assert lines[0] == "run,noise_level,A,B"
        assert len(lines) == 28


class TestIngest:
    def test_study_table(self, study_responses):
        assert study_responses.shape == (9, 3)
        assert study_responses.cell(1, 3) == 10.75
        np.testing.assert_array_equal(study_responses.values, STUDY_Y)

    def test_missing_cell_named(self, study_plan):
        rows = [r for r in rows_for(STUDY_Y) if (r[0], r[1]) != (9, 2)]
        with pytest.raises(MissingCellError) as exc:
            ingest_responses(study_plan, rows)
        assert exc.value.missing == [(9, 2)]
        assert "(9, 2)" in str(exc.value)

    def test_nan_rejected(self, study_plan):
        text = "run,noise_level,response\n" + "".join(
            f"{r},{n},{'NaN' if (r, n) == (3, 3) else v}\n" for r, n, v in rows_for(STUDY_Y))
        with pytest.raises(NonFiniteValueError):
            read_responses(study_plan, text)

    def test_duplicate_rejected(self, study_plan):
        rows = rows_for(STUDY_Y) + [(1, 1, 3.0)]
        with pytest.raises(DuplicateCellError):
            ingest_responses(study_plan, rows)

    def test_out_of_range_run(self, study_plan):
        with pytest.raises(DataError):
            ingest_responses(study_plan, rows_for(STUDY_Y) + [(10, 1, 1.0)])

    def test_negative_rejected_for_magnitudes(self, study_plan):
        rows = [(r, n, -v if (r, n) == (1, 1) else v) for r, n, v in rows_for(STUDY_Y)]
        with pytest.raises(DataError, match="negative"):
            ingest_responses(study_plan, rows)

    def test_wrong_header(self, study_plan):
        with pytest.raises(DataError):
            read_responses(study_plan, "run,level,y\n1,1,2.0\n")

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=18, max_size=18))
    def test_csv_round_trip(self, values):
        plan = small_plan(noise_levels=2)
        table = ResponseTable(np.array(values).reshape(9, 2))
        assert read_responses(plan, table.to_csv()) == table


class TestPlanFile:
    def test_study_file_round_trip(self, study_plan):
        again = plan_from_dict(json.loads(json.dumps(study_plan.to_dict())))
        assert again.to_dict() == study_plan.to_dict()

    def test_missing_field_named(self, study_plan):
        d = copy.deepcopy(study_plan.to_dict())
        del d["controls"][0]["code"]
        with pytest.raises(PlanError, match=r"plan.controls\[0\]: missing required field 'code'"):
            plan_from_dict(d)

    def test_unknown_array(self, study_plan):
        d = copy.deepcopy(study_plan.to_dict())
        d["array"] = "L7"
        with pytest.raises(UnknownArrayError, match="unknown array"):
            plan_from_dict(d)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "plan.json"
        path.write_text("{not json")
        with pytest.raises(PlanError, match="invalid JSON"):
            load_plan(path)
