import math

import numpy as np
import pytest
from scipy import stats

from robustdoe.anova import (factor_anovas, factor_groups, gated_tukey, one_way_anova,
                             tukey_hsd)
from robustdoe.errors import DegenerateError, DomainError


def random_groups(rng):
    k = int(rng.integers(2, 7))
    sizes = rng.integers(1, 9, size=k)
    if sizes.sum() - k < 1:
        sizes[0] += 1
    loc = rng.normal(0, 3)
    scale = 10 ** rng.uniform(-2, 2)
    return [rng.normal(loc + rng.normal(0, scale), scale, size=int(n)) for n in sizes]


class TestOneWay:
    def test_identical_group_means(self):
        t = one_way_anova([(1, 2, 3)] * 3)
        assert (t.df_factor, t.df_error, t.df_total) == (2, 6, 8)
        assert t.ss_factor == 0.0 and t.f == 0.0 and t.p == 1.0

    def test_hand_computed(self):
        t = one_way_anova([[1, 2, 3], [4, 5, 6]])
        assert t.ss_factor == pytest.approx(13.5)
        assert t.ss_error == pytest.approx(4.0)
        assert t.f == pytest.approx(13.5)
        assert t.ms_error == pytest.approx(1.0)

    def test_matches_scipy(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            groups = random_groups(rng)
            ours = one_way_anova(groups)
            ref = stats.f_oneway(*groups)
            assert ours.f == pytest.approx(ref.statistic, rel=1e-9)
            assert ours.p == pytest.approx(ref.pvalue, rel=1e-8, abs=1e-14)

    def test_two_groups_equal_pooled_t_squared(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            a = rng.normal(0, 1, size=int(rng.integers(2, 12)))
            b = rng.normal(0.5, 1, size=int(rng.integers(2, 12)))
            t = stats.ttest_ind(a, b, equal_var=True)
            table = one_way_anova([a, b])
            assert table.f == pytest.approx(t.statistic ** 2, rel=1e-9)
            assert table.p == pytest.approx(t.pvalue, rel=1e-8)

    def test_zero_error_variance(self):
        t = one_way_anova([[1, 1], [2, 2]])
        assert t.f == math.inf and t.p == 0.0
        assert t.degenerate == "zero-error-variance"

    def test_constant_data(self):
        t = one_way_anova([[3, 3], [3, 3]])
        assert math.isnan(t.f) and math.isnan(t.p)
        assert t.degenerate == "constant-data"
        assert not t.significant()

    @pytest.mark.parametrize("groups", [[[1, 2, 3]], [[1], [2]], [[1, 2], []],
                                        [[1, 2], [3, float("nan")]]])
    def test_degenerate_inputs(self, groups):
        with pytest.raises(DegenerateError):
            one_way_anova(groups)

    def test_csv(self):
        lines = one_way_anova([[1, 2, 3], [4, 5, 6]]).to_csv().splitlines()
        assert lines[0] == "source,df,ss,ms,f,p"
        assert lines[1].startswith("Factor,1,13.5,13.5,13.5,")
        assert lines[3] == "Total,5,17.5,,,"


class TestProperties:
    def test_ss_additivity_and_affine_invariance(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            groups = random_groups(rng)
            t = one_way_anova(groups)
            assert t.ss_factor + t.ss_error == pytest.approx(t.ss_total, rel=1e-9)
            a = rng.choice([-1, 1]) * 10 ** rng.uniform(-3, 3)
            # offset sized to the data so the transform itself stays well-conditioned
            b = a * rng.normal(0, 10) * max(np.abs(np.concatenate(groups)).max(), 1e-300)
            moved = one_way_anova([a * g + b for g in groups])
            assert moved.f == pytest.approx(t.f, rel=1e-9)
            assert moved.df_error == t.df_error

    def test_p_in_unit_interval(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            p = one_way_anova(random_groups(rng)).p
            assert 0.0 <= p <= 1.0


class TestTukey:
    def test_identical_groups(self):
        result = tukey_hsd([[1, 2, 3]] * 3)
        assert result.significant_pairs() == []

    def test_threshold(self):
        groups = [[1.0, 2.0, 3.0, 2.5], [2.0, 3.5, 4.0, 3.0], [6.0, 7.0, 6.5, 8.0]]
        result = tukey_hsd(groups)
        ms_error = one_way_anova(groups).ms_error
        q = stats.studentized_range.ppf(0.95, 3, 9)
        assert result.q_critical == pytest.approx(q, abs=1e-6)
        assert result.hsd_threshold == pytest.approx(q * math.sqrt(ms_error / 4), rel=1e-6)
        for pair in result.pairs:
            assert pair.hsd_threshold == result.hsd_threshold
            assert pair.significant == (abs(pair.mean_diff) > pair.hsd_threshold)

    def test_against_scipy(self):
        rng = np.random.default_rng(5)
        groups = [rng.normal(mu, 1, size=6) for mu in (0, 0.4, 2.0, 2.1)]
        ours = tukey_hsd(groups)
        ref = stats.tukey_hsd(*groups)
        for pair in ours.pairs:
            i, j = pair.level_a - 1, pair.level_b - 1
            assert pair.p_adj == pytest.approx(ref.pvalue[i, j], abs=1e-5)
            assert pair.mean_diff == pytest.approx(-ref.statistic[i, j], abs=1e-12)

    def test_shift_invariance(self):
        rng = np.random.default_rng(9)
        groups = [rng.normal(mu, 1, size=5) for mu in (0, 1, 3)]
        base = tukey_hsd(groups)
        moved = tukey_hsd([g + 123.0 for g in groups])
        assert moved.hsd_threshold == pytest.approx(base.hsd_threshold, rel=1e-9)
        assert moved.significant_pairs() == base.significant_pairs()

    def test_unequal_sizes_rejected(self):
        with pytest.raises(DomainError, match="equal group sizes"):
            tukey_hsd([[1, 2, 3], [4, 5]])

    def test_bad_alpha(self):
        with pytest.raises(DomainError):
            tukey_hsd([[1, 2], [3, 4]], alpha=1.5)


class TestStudyData:
    def test_grouping_sizes(self, study_plan, study_responses):
        for code in ("A", "B", "X"):
            assert [g.size for g in factor_groups(study_plan, study_responses, code)] == [9] * 3

    def test_tables(self, study_plan, study_responses):
        tables = factor_anovas(study_plan, study_responses)
        assert list(tables) == ["A", "B", "X"]
        assert tables["A"].p == pytest.approx(0.96, abs=0.01)
        assert tables["X"].p < 1e-15

    def test_gating(self, study_plan, study_responses):
        tables = factor_anovas(study_plan, study_responses)
        assert list(gated_tukey(study_plan, study_responses, tables)) == ["X"]

    def test_thickness_groups_have_no_significant_pair(self, study_plan, study_responses):
        groups = factor_groups(study_plan, study_responses, "A")
        assert tukey_hsd(groups).significant_pairs() == []
