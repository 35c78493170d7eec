"""Tests for distribution inversion, sequential plan solving, and benchmarking."""

import math

import numpy as np
import pytest

from qnetomo import (
    MeasurementTask,
    MonitoringPlan,
    OutcomeCounts,
    Path,
    Scheme,
    benchmark_variance,
    build_star,
    builtin_plan,
    estimate_path,
    expected_counts,
    jbm_distribution,
    lzm_distribution,
    pem_distribution,
    solve_plan,
    task_distribution,
)

BELL = ("phi+", "phi-", "psi+", "psi-")
ZZ = ("00", "01", "10", "11")


def bell_counts(top, rest, total=None):
    counts = {"phi+": top, "phi-": rest, "psi+": rest, "psi-": rest}
    return OutcomeCounts(BELL, counts, total or (top + 3 * rest))


def zz_counts(n00, n01, n10, n11):
    counts = dict(zip(ZZ, (n00, n01, n10, n11)))
    return OutcomeCounts(ZZ, counts, sum(counts.values()))


class TestPathInversion:
    def test_lzm_balanced_example(self):
        est = estimate_path(Scheme.LZM, zz_counts(375, 125, 125, 375))
        assert abs(est.value - 0.5) < 1e-12

    def test_pem_example(self):
        est = estimate_path(Scheme.PEM, bell_counts(700, 100))
        assert abs(est.value - 0.6) < 1e-12

    def test_jbm_uniform_counts_give_zero(self):
        est = estimate_path(Scheme.JBM, bell_counts(250, 250))
        assert est.value == 0.0

    def test_jbm_example(self):
        est = estimate_path(Scheme.JBM, bell_counts(4375, 1875))
        assert abs(est.value - 0.5) < 1e-12

    def test_lzm_clamps_negative_raw(self):
        est = estimate_path(Scheme.LZM, zz_counts(100, 400, 400, 100))
        assert est.value == 0.0
        assert est.raw < 0.0

    def test_pem_clamps_above_one(self):
        est = estimate_path(Scheme.PEM, bell_counts(1000, 0))
        assert est.value == 1.0
        assert est.raw == 1.0

    def test_jbm_truncates_negative_pre_root(self):
        est = estimate_path(Scheme.JBM, bell_counts(100, 300))
        assert est.value == 0.0
        assert est.raw == 0.0

    def test_perfect_counts_invert_exactly(self):
        for scheme, dist in (
            (Scheme.LZM, lzm_distribution),
            (Scheme.JBM, jbm_distribution),
            (Scheme.PEM, pem_distribution),
        ):
            for w in (0.0, 0.25, 0.6, 1.0):
                counts = expected_counts(dist(w), 100000)
                assert abs(estimate_path(scheme, counts).value - w) < 1e-12

    def test_task_attached(self):
        task = MeasurementTask(Scheme.PEM, Path(("e0",), ("v0", "v1")))
        est = estimate_path(Scheme.PEM, bell_counts(700, 100), task)
        assert est.task is task


class TestInversionIsMaximumLikelihood:
    """The closed-form inversions maximize the multinomial likelihood on [0, 1]."""

    @staticmethod
    def _loglik(dist_fn, counts, w):
        probs = dist_fn(w).as_dict()
        acc = 0.0
        for label, n in counts.counts.items():
            if n == 0:
                continue
            if probs[label] <= 0.0:
                return -math.inf
            acc += n * math.log(probs[label])
        return acc

    @pytest.mark.parametrize(
        "scheme,dist_fn,labels",
        [
            (Scheme.LZM, lzm_distribution, ZZ),
            (Scheme.JBM, jbm_distribution, BELL),
            (Scheme.PEM, pem_distribution, BELL),
        ],
    )
    def test_grid_argmax(self, scheme, dist_fn, labels):
        rng = np.random.default_rng(321)
        grid = np.linspace(0.0, 1.0, 1001)
        for _ in range(20):
            raw = rng.integers(1, 300, size=4)
            counts = OutcomeCounts(labels, dict(zip(labels, map(int, raw))), int(raw.sum()))
            est = estimate_path(scheme, counts)
            at_estimate = self._loglik(dist_fn, counts, est.value)
            best_on_grid = max(self._loglik(dist_fn, counts, g) for g in grid)
            assert at_estimate >= best_on_grid - 1e-9


class TestSolvePlan:
    def _exact_counts(self, plan, params, n=10000):
        return [expected_counts(task_distribution(t, params), n) for t in plan.tasks]

    @pytest.mark.parametrize("kind", ["JBM2", "JBM3", "HYB2", "HYB3"])
    def test_exact_recovery(self, kind):
        params = {"e0": 0.9, "e1": 0.8, "e2": 0.7}
        graph = build_star(3, [params[f"e{i}"] for i in range(3)])
        plan = builtin_plan(kind, graph)
        solved = solve_plan(plan, self._exact_counts(plan, params))
        assert not solved.unidentifiable
        for lid, w in params.items():
            assert abs(solved.values[lid] - w) < 1e-12

    def test_provenance_mentions_division(self):
        graph = build_star(3, [0.9, 0.8, 0.7])
        plan = builtin_plan("HYB3", graph)
        solved = solve_plan(plan, self._exact_counts(plan, graph.params()))
        assert "divided by e0" in solved.provenance["e1"]
        assert "e0" in solved.provenance["e0"] and "divided" not in solved.provenance["e0"]

    def test_dead_link_propagation(self):
        params = {"e0": 0.0, "e1": 0.8, "e2": 0.7}
        graph = build_star(3, [0.0, 0.8, 0.7])
        plan = builtin_plan("HYB3", graph)
        solved = solve_plan(plan, self._exact_counts(plan, params))
        assert solved.values["e0"] == 0.0
        assert solved.unidentifiable == frozenset({"e1", "e2"})
        assert "e1" not in solved.values and "e2" not in solved.values

    def test_counts_length_mismatch(self):
        graph = build_star(3, [0.9, 0.8, 0.7])
        plan = builtin_plan("JBM3", graph)
        with pytest.raises(ValueError, match="expected counts"):
            solve_plan(plan, self._exact_counts(plan, graph.params())[:2])

    def test_indirect_first_is_not_solvable(self):
        task = MeasurementTask(Scheme.PEM, Path(("e0", "e1"), ("v2", "v1")))
        plan = MonitoringPlan("bad-order", (task,))
        dist = pem_distribution(0.72)
        with pytest.raises(ValueError, match="not solvable"):
            solve_plan(plan, [expected_counts(dist, 1000)])

    def test_redundant_task_is_skipped(self):
        direct = MeasurementTask(Scheme.PEM, Path(("e0",), ("v0", "v1")))
        plan = MonitoringPlan("twice", (direct, direct))
        first = expected_counts(pem_distribution(0.9), 1000)
        second = expected_counts(pem_distribution(0.3), 1000)
        solved = solve_plan(plan, [first, second])
        assert abs(solved.values["e0"] - 0.9) < 1e-12


class TestBenchmark:
    def _single_link_plan(self):
        return MonitoringPlan(
            "PEM-direct", (MeasurementTask(Scheme.PEM, Path(("e0",), ("a", "b"))),)
        )

    def test_deterministic_given_seed(self):
        plan = self._single_link_plan()
        a = benchmark_variance(plan, {"e0": 0.6}, 2000, 20, seed=9)
        b = benchmark_variance(plan, {"e0": 0.6}, 2000, 20, seed=9)
        assert a == b

    def test_seed_changes_the_variance(self):
        plan = self._single_link_plan()
        a = benchmark_variance(plan, {"e0": 0.6}, 2000, 20, seed=9)
        b = benchmark_variance(plan, {"e0": 0.6}, 2000, 20, seed=10)
        assert a[0].variance != b[0].variance

    def test_single_link_ratio_near_one(self):
        plan = self._single_link_plan()
        (row,) = benchmark_variance(plan, {"e0": 0.6}, 20000, 100, seed=17)
        assert row.link == "e0"
        assert abs(row.true_w - 0.6) < 1e-15
        assert abs(row.crb - (1.0 / 20000) / (3.0 / (2.8 * 0.4))) < 1e-12
        assert 0.7 < row.ratio < 1.4

    def test_star_plan_rows(self):
        graph = build_star(3, [0.9, 0.8, 0.7])
        plan = builtin_plan("JBM3", graph)
        rows = benchmark_variance(plan, graph.params(), 20000, 100, seed=17)
        assert tuple(r.link for r in rows) == ("e0", "e1", "e2")
        for row in rows:
            assert 0.5 < row.ratio < 1.6

    def test_partial_coverage_reports_unidentifiable_bounds(self):
        plan = MonitoringPlan(
            "only-e0", (MeasurementTask(Scheme.JBM, Path(("e0",), ("v0", "v1"))),)
        )
        rows = benchmark_variance(
            plan, {"e0": 0.9, "e1": 0.8, "e2": 0.7}, 1000, 5, seed=3
        )
        assert all(math.isinf(r.crb) for r in rows)
        assert all(math.isnan(r.ratio) for r in rows)

    def test_parameter_validation(self):
        plan = self._single_link_plan()
        with pytest.raises(ValueError, match="at least 2 rounds"):
            benchmark_variance(plan, {"e0": 0.6}, 100, 1, seed=1)
        with pytest.raises(ValueError, match="at least 1 sample"):
            benchmark_variance(plan, {"e0": 0.6}, 0, 5, seed=1)
        with pytest.raises(ValueError, match="outside"):
            benchmark_variance(plan, {"e0": 1.5}, 100, 5, seed=1)
