import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from robustdoe.design import ResponseTable
from robustdoe.errors import DegenerateError, DomainError, SnrDomainError
from robustdoe.response_stats import (LARGER_THE_BETTER, NOMINAL_THE_BEST, STB, SnrCriterion,
                                      main_effects, run_summaries, sample_sd, snr)

from conftest import STUDY_RUNS, STUDY_Y

positive = st.floats(1e-3, 1e3, allow_nan=False, allow_infinity=False)


class TestSnr:
    def test_run_one(self):
        assert snr([2.90, 6.56, 10.75]) == pytest.approx(-17.45, abs=0.01)

    def test_run_nine(self):
        assert snr([3.08, 6.50, 8.59]) == pytest.approx(-16.21, abs=0.01)

    def test_unit_responses(self):
        assert snr([1.0, 1.0, 1.0]) == 0.0

    def test_larger_the_better(self):
        crit = SnrCriterion(LARGER_THE_BETTER)
        assert snr([10.0, 10.0], crit) == pytest.approx(20.0, abs=1e-12)
        with pytest.raises(SnrDomainError):
            snr([1.0, 0.0], crit)

    def test_nominal_the_best(self):
        crit = SnrCriterion.parse("nominal-the-best:10")
        y = [9.0, 10.0, 11.0]
        assert snr(y, crit) == pytest.approx(10 * math.log10(100 / 1.0))
        with pytest.raises(SnrDomainError):
            snr([5.0, 5.0], crit)

    def test_all_zero_smaller_the_better(self):
        with pytest.raises(SnrDomainError):
            snr([0.0, 0.0])

    def test_extreme_magnitudes(self):
        assert snr([3e-186, 0.0]) == pytest.approx(-20 * math.log10(3e-186) + 10 * math.log10(2))
        assert snr([1e200, 1e200]) == pytest.approx(-4000.0)
        crit = SnrCriterion(LARGER_THE_BETTER)
        assert snr([1e-200, 1e-200], crit) == pytest.approx(-4000.0)

    def test_empty(self):
        with pytest.raises(DegenerateError):
            snr([])

    @settings(max_examples=200, deadline=None)
    @given(st.lists(positive, min_size=1, max_size=12), positive)
    def test_scale_law(self, y, c):
        shift = snr(np.array(y) * c) - snr(y)
        assert shift == pytest.approx(-20 * math.log10(c), abs=1e-9)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(positive, min_size=1, max_size=12), st.data(), st.floats(1e-3, 10))
    def test_monotone(self, y, data, bump):
        i = data.draw(st.integers(0, len(y) - 1))
        bigger = list(y)
        bigger[i] += bump
        assert snr(bigger) < snr(y)


class TestCriterion:
    @pytest.mark.parametrize("text", ["smaller-the-better", "larger-the-better",
                                      "nominal-the-best:2.5"])
    def test_round_trip(self, text):
        assert str(SnrCriterion.parse(text)) == text

    @pytest.mark.parametrize("text", ["biggest", "nominal-the-best", "nominal-the-best:x",
                                      "nominal-the-best:inf", "smaller-the-better:3"])
    def test_rejects(self, text):
        with pytest.raises(DomainError):
            SnrCriterion.parse(text)

    def test_nominal_target_required(self):
        with pytest.raises(DomainError):
            SnrCriterion(NOMINAL_THE_BEST)


class TestRunSummaries:
    def test_study_rows(self, study_responses):
        for s, (mean, sd, sn) in zip(run_summaries(study_responses), STUDY_RUNS):
            assert s.mean == pytest.approx(mean, abs=0.01)
            assert s.sd == pytest.approx(sd, abs=0.01)
            assert s.snr == pytest.approx(sn, abs=0.01)

    def test_constant_row(self):
        s = run_summaries(ResponseTable([[1.0, 1.0, 1.0]]))[0]
        assert (s.mean, s.sd, s.snr) == (1.0, 0.0, 0.0)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-1e4, 1e4), min_size=6, max_size=6))
    def test_sd_matches_two_pass(self, values):
        table = ResponseTable(np.array(values).reshape(2, 3))
        assume(np.any(table.values != 0, axis=1).all())
        for row, s in zip(table.values, run_summaries(table)):
            m = sum(row) / len(row)
            brute = math.sqrt(sum((v - m) ** 2 for v in row) / (len(row) - 1))
            assert s.sd == pytest.approx(brute, rel=1e-12, abs=1e-12)

    def test_sample_sd_single_value(self):
        assert sample_sd([4.0]) is None


class TestMainEffects:
    def test_a_level_one(self, study_plan, study_responses):
        e = main_effects(study_plan, study_responses).factors["A"][0]
        assert e.mean == pytest.approx(6.72, abs=0.02)
        assert e.spread == pytest.approx(0.04, abs=0.02)
        assert e.snr == pytest.approx(-17.28, abs=0.01)

    def test_x_level_three(self, study_plan, study_responses):
        e = main_effects(study_plan, study_responses).factors["X"][2]
        assert e.mean == pytest.approx(10.10, abs=0.02)
        assert e.spread == pytest.approx(0.61, abs=0.02)
        assert e.snr == pytest.approx(-20.09, abs=0.01)

    def test_x_level_one_uses_raw_column(self, study_plan, study_responses):
        e = main_effects(study_plan, study_responses).factors["X"][0]
        assert e.mean == pytest.approx(STUDY_Y[:, 0].mean(), abs=1e-12)
        assert e.snr == pytest.approx(snr(STUDY_Y[:, 0]), abs=1e-12)

    def test_grand_values(self, study_plan, study_responses):
        effects = main_effects(study_plan, study_responses)
        assert effects.grand_mean == pytest.approx(STUDY_Y.mean(), rel=1e-12)
        assert effects.grand_snr == pytest.approx(-16.99, abs=0.01)

    def test_constant_table(self, study_plan):
        effects = main_effects(study_plan, ResponseTable(np.full((9, 3), 4.0)))
        for levels in effects.factors.values():
            for e in levels:
                assert e.mean == 4.0 and e.spread == 0.0

    @settings(max_examples=100, deadline=None)
    @given(st.lists(positive, min_size=27, max_size=27))
    def test_level_means_average_to_grand(self, study_plan, values):
        effects = main_effects(study_plan, ResponseTable(np.array(values).reshape(9, 3)))
        for code in effects.control_codes:
            avg = np.mean([e.mean for e in effects.factors[code]])
            assert avg == pytest.approx(effects.grand_mean, rel=1e-9)

    def test_csv_header(self, study_plan, study_responses):
        lines = main_effects(study_plan, study_responses).to_csv().splitlines()
        assert lines[0] == "factor,level,mean,spread,snr"
        assert len(lines) == 10
        assert lines[1].startswith("A,1,")

    def test_criterion_recorded(self, study_plan, study_responses):
        assert main_effects(study_plan, study_responses).criterion == STB
