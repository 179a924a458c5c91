"""Simulation harness: reproducibility, sources, summaries, checks."""

import math

import numpy as np
import pytest

from projmean import (
    DomainError,
    EmpiricalSummary,
    ExperimentConfig,
    SourceDistribution,
    check_sticky,
    check_theorem1,
    draw_sample_mean,
    empirical_prob_leq,
    ks_distance,
    phi,
    run_experiment,
)
from projmean.montecarlo import _stream, check_g_scale


def small_cfg(**over):
    base = dict(
        family="poly",
        gamma=1.0,
        source=SourceDistribution(kind="normal_y", sigma=1.0),
        n=400,
        reps=2000,
        seed=123,
    )
    base.update(over)
    return ExperimentConfig(**base)


class TestSources:
    def test_normal_y_shortcut_variance(self):
        ys = np.array(
            [draw_sample_mean(SourceDistribution("normal_y", 1.0), 400, _stream(9, i))[1]
             for i in range(4000)]
        )
        assert np.var(ys) == pytest.approx(1.0 / 400.0, rel=0.1)
        assert np.mean(ys) == pytest.approx(0.0, abs=4.0 / math.sqrt(400 * 4000))

    def test_shortcut_matches_slow_path_distribution(self):
        src = SourceDistribution("normal_y", 2.0)
        fast = np.array(
            [draw_sample_mean(src, 100, _stream(1, i), shortcut=True)[1] for i in range(3000)]
        )
        slow = np.array(
            [draw_sample_mean(src, 100, _stream(2, i), shortcut=False)[1] for i in range(3000)]
        )
        assert np.var(fast) == pytest.approx(np.var(slow), rel=0.15)

    def test_uniform_variance(self):
        src = SourceDistribution("uniform_y", 0.5)
        ys = np.array(
            [draw_sample_mean(src, 50, _stream(3, i), shortcut=False)[1] for i in range(3000)]
        )
        assert np.var(ys) == pytest.approx(0.25 / 50.0, rel=0.15)

    def test_point_mass_lattice(self):
        src = SourceDistribution("point_mass_x0", 1.0)
        x, y = draw_sample_mean(src, 7, _stream(4, 0))
        assert x == 0.0
        assert (7.0 * y) == pytest.approx(round(7.0 * y))  # mean of 7 signs

    def test_normal_xy_correlation(self):
        src = SourceDistribution("normal_xy", 1.0, sigma_x=1.0, correlation=0.8)
        pairs = np.array(
            [draw_sample_mean(src, 1, _stream(5, i)) for i in range(4000)]
        )
        c = np.corrcoef(pairs[:, 0], pairs[:, 1])[0, 1]
        assert c == pytest.approx(0.8, abs=0.05)

    def test_preconditions(self):
        with pytest.raises(DomainError):
            SourceDistribution("normal_y", 0.0)
        with pytest.raises(DomainError):
            SourceDistribution("nope", 1.0)
        with pytest.raises(DomainError):
            SourceDistribution("normal_y", 1.0, sigma_x=0.5)
        with pytest.raises(DomainError):
            draw_sample_mean(SourceDistribution("normal_y", 1.0), 0, _stream(0, 0))


class TestDeterminism:
    def test_thread_count_is_inert(self):
        cfg = small_cfg(reps=5000)
        a = run_experiment(cfg, threads=1)
        b = run_experiment(cfg, threads=2)
        np.testing.assert_array_equal(a.t_n, b.t_n)
        np.testing.assert_array_equal(a.m1, b.m1)
        np.testing.assert_array_equal(a.m2, b.m2)

    def test_repeat_run_identical(self):
        cfg = small_cfg()
        a = run_experiment(cfg)
        b = run_experiment(cfg)
        np.testing.assert_array_equal(a.t_n, b.t_n)

    def test_seed_changes_results(self):
        a = run_experiment(small_cfg(seed=1))
        b = run_experiment(small_cfg(seed=2))
        assert not np.array_equal(a.t_n, b.t_n)


class TestExperiment:
    def test_single_replicate(self):
        res = run_experiment(small_cfg(reps=1))
        summ = res.summary("t_n")
        assert summ.count == 1
        assert summ.values.shape == (1,)

    def test_shortcut_resolution(self):
        assert small_cfg().resolve_shortcut() is True
        assert small_cfg(
            source=SourceDistribution("uniform_y", 1.0)
        ).resolve_shortcut() is False
        assert small_cfg(gaussian_shortcut=False).resolve_shortcut() is False

    def test_summary_sorted_and_tagged(self):
        res = run_experiment(small_cfg(reps=100))
        summ = res.summary("m2")
        assert np.all(np.diff(summ.values) >= 0.0)
        assert summ.metadata["statistic"] == "m2"
        assert summ.metadata["seed"] == 123

    def test_symmetry_of_t_law(self):
        res = run_experiment(small_cfg(reps=4000))
        summ = res.summary("t_n")
        bound = 3.0 / math.sqrt(4000)
        for u in (0.001, 0.005, 0.01, 0.02):
            p_lo = summ.prob_leq(-u)
            p_hi = summ.prob_geq(u)
            assert abs(p_lo - p_hi) <= bound

    def test_config_validation(self):
        with pytest.raises(DomainError):
            small_cfg(reps=0)
        with pytest.raises(DomainError):
            ExperimentConfig(
                family="poly",
                source=SourceDistribution("normal_y", 1.0),
                n=10, reps=10, seed=0,
            )  # missing gamma
        with pytest.raises(DomainError):
            ExperimentConfig(
                family="circle",
                source=SourceDistribution("normal_y", 1.0),
                n=10, reps=10, seed=0,
            )  # missing delta


class TestSummaryOps:
    def test_prob_leq_thirds(self):
        s = EmpiricalSummary.from_values(np.array([1.0, 2.0, 3.0]), {})
        assert empirical_prob_leq(s, 2.0) == pytest.approx(2.0 / 3.0)
        assert s.prob_leq(0.5) == 0.0
        assert s.prob_leq(4.0) == 1.0

    def test_ks_single_point_at_median(self):
        s = EmpiricalSummary.from_values(np.array([0.0]), {})
        assert ks_distance(s, phi) == pytest.approx(0.5)

    def test_ks_constant_zero(self):
        s = EmpiricalSummary.from_values(np.zeros(1000), {})
        assert ks_distance(s, phi) == pytest.approx(0.5, abs=1e-12)

    def test_ks_self_calibration(self):
        rng = np.random.default_rng(99)
        s = EmpiricalSummary.from_values(rng.standard_normal(20000), {})
        assert ks_distance(s, phi) <= 0.02

    def test_scaled(self):
        s = EmpiricalSummary.from_values(np.array([1.0, -2.0]), {})
        s2 = s.scaled(3.0)
        np.testing.assert_array_equal(s2.values, np.array([-6.0, 3.0]))


class TestChecks:
    def test_theorem1_small(self):
        table = check_theorem1(small_cfg(gamma=2.0, reps=4000), s_values=(0.0, 1.0))
        stats = {(r.s, r.statistic) for r in table.rows}
        assert (0.0, "t") in stats and (1.0, "m1_dev") in stats
        assert (0.0, "m1_dev") not in stats  # vacuous threshold at s = 0
        for r in table.rows:
            if r.statistic != "m1_dev":
                assert abs(r.empirical - r.theoretical) <= 0.05

    def test_theorem1_underflow_flagging(self):
        table = check_theorem1(
            small_cfg(family="exp", gamma=1.0, reps=50), s_values=(0.01, 1.0)
        )
        assert table.underflowed_s == (0.01,)
        assert all(r.s == 1.0 for r in table.rows)

    def test_theorem1_needs_rate_family(self):
        cfg = ExperimentConfig(
            family="kink",
            source=SourceDistribution("normal_y", 0.1),
            n=10, reps=10, seed=0,
        )
        with pytest.raises(DomainError):
            check_theorem1(cfg)

    def test_sticky_small(self):
        cfg = ExperimentConfig(
            family="kink",
            source=SourceDistribution("normal_y", 0.1),
            n=100, reps=500, seed=6,
        )
        res = check_sticky(cfg)
        assert res.fraction >= 0.99
        assert res.passed

    def test_g_scale_small(self):
        res = check_g_scale(small_cfg(gamma=2.0, reps=4000), tol_ks=0.05)
        assert res.ks <= 0.05
