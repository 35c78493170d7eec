"""Tests for analytic outcome distributions and deterministic sampling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qnetomo import (
    MeasurementTask,
    OutcomeCounts,
    OutcomeDistribution,
    Path,
    Scheme,
    derive_seed,
    expected_counts,
    jbm_distribution,
    jbm_oracle_probabilities,
    lzm_distribution,
    lzm_oracle_probabilities,
    pem_distribution,
    pem_oracle_probabilities,
    sample_outcomes,
    scheme_distribution,
    task_distribution,
)

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


class TestClosedForms:
    def test_lzm_half(self):
        d = lzm_distribution(0.5).as_dict()
        assert abs(d["00"] - 0.375) < 1e-15
        assert abs(d["11"] - 0.375) < 1e-15
        assert abs(d["01"] - 0.125) < 1e-15
        assert abs(d["10"] - 0.125) < 1e-15

    def test_jbm_half(self):
        d = jbm_distribution(0.5).as_dict()
        assert abs(d["phi+"] - 0.4375) < 1e-15
        for label in ("phi-", "psi+", "psi-"):
            assert abs(d[label] - 0.1875) < 1e-15

    def test_pem_point_six(self):
        d = pem_distribution(0.6).as_dict()
        assert abs(d["phi+"] - 0.7) < 1e-15
        for label in ("phi-", "psi+", "psi-"):
            assert abs(d[label] - 0.1) < 1e-15

    def test_labels_per_scheme(self):
        assert lzm_distribution(0.3).labels == ("00", "01", "10", "11")
        assert jbm_distribution(0.3).labels == ("phi+", "phi-", "psi+", "psi-")
        assert pem_distribution(0.3).labels == ("phi+", "phi-", "psi+", "psi-")

    def test_degenerate_endpoints(self):
        for dist in (lzm_distribution(0.0), jbm_distribution(0.0), pem_distribution(0.0)):
            np.testing.assert_allclose(dist.probabilities, [0.25] * 4, atol=1e-15)
        assert abs(jbm_distribution(1.0).as_dict()["phi+"] - 1.0) < 1e-15
        assert abs(pem_distribution(1.0).as_dict()["phi+"] - 1.0) < 1e-15
        assert abs(lzm_distribution(1.0).as_dict()["00"] - 0.5) < 1e-15

    def test_domain_guard(self):
        for fn in (lzm_distribution, jbm_distribution, pem_distribution):
            with pytest.raises(ValueError):
                fn(-0.01)
            with pytest.raises(ValueError):
                fn(1.01)

    @given(unit)
    @settings(max_examples=50)
    def test_probabilities_sum_to_one(self, w):
        for fn in (lzm_distribution, jbm_distribution, pem_distribution):
            assert abs(sum(fn(w).probabilities) - 1.0) < 1e-12

    @given(unit)
    @settings(max_examples=50)
    def test_jbm_equals_pem_of_squared_product(self, w):
        jbm = jbm_distribution(w)
        pem = pem_distribution(w * w)
        for a, b in zip(jbm.probabilities, pem.probabilities):
            assert abs(a - b) < 1e-12


class TestOracleAgreement:
    """Spot checks; the full grid comparison lives in the acceptance suite."""

    def test_lzm_two_links(self):
        exact = lzm_oracle_probabilities([0.9, 0.8])
        analytic = lzm_distribution(0.72).as_dict()
        for label, p in exact.items():
            assert abs(p - analytic[label]) < 1e-12

    def test_jbm_one_link(self):
        exact = jbm_oracle_probabilities([0.7])
        analytic = jbm_distribution(0.7).as_dict()
        for label, p in exact.items():
            assert abs(p - analytic[label]) < 1e-12

    def test_pem_three_links(self):
        exact = pem_oracle_probabilities([0.9, 0.7, 0.5])
        analytic = pem_distribution(0.9 * 0.7 * 0.5).as_dict()
        for label, p in exact.items():
            assert abs(p - analytic[label]) < 1e-12


class TestTaskDistribution:
    def test_path_product_is_multiplied(self):
        task = MeasurementTask(Scheme.PEM, Path(("e0", "e1"), ("v1", "v2")))
        dist = task_distribution(task, {"e0": 0.9, "e1": 0.8, "e2": 0.1})
        assert abs(dist.path_product - 0.72) < 1e-15
        assert dist.scheme is Scheme.PEM

    def test_scheme_dispatch(self):
        assert scheme_distribution(Scheme.LZM, 0.5).labels[0] == "00"
        assert scheme_distribution(Scheme.JBM, 0.5).labels[0] == "phi+"

    def test_missing_link_parameter(self):
        task = MeasurementTask(Scheme.LZM, Path(("e9",), ("a", "b")))
        with pytest.raises(KeyError):
            task_distribution(task, {"e0": 0.5})


class TestDistributionValidation:
    def test_rejects_negative_probability(self):
        with pytest.raises(ValueError, match="negative"):
            OutcomeDistribution(Scheme.LZM, ("a", "b"), (1.5, -0.5), 0.5)

    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError, match="sum"):
            OutcomeDistribution(Scheme.LZM, ("a", "b"), (0.6, 0.6), 0.5)

    def test_rejects_misaligned_labels(self):
        with pytest.raises(ValueError, match="align"):
            OutcomeDistribution(Scheme.LZM, ("a",), (0.5, 0.5), 0.5)


class TestSampling:
    def test_deterministic_given_seed(self):
        dist = pem_distribution(0.6)
        a = sample_outcomes(dist, 10000, seed=42)
        b = sample_outcomes(dist, 10000, seed=42)
        assert a.counts == b.counts
        assert a.seed == 42

    def test_different_seeds_differ(self):
        dist = pem_distribution(0.6)
        a = sample_outcomes(dist, 10000, seed=1)
        b = sample_outcomes(dist, 10000, seed=2)
        assert a.counts != b.counts

    def test_counts_total(self):
        counts = sample_outcomes(lzm_distribution(0.3), 987, seed=7)
        assert counts.total == 987
        assert sum(counts.counts.values()) == 987

    def test_law_of_large_numbers(self):
        # 3-sigma band per outcome at n = 1e6
        n = 1_000_000
        dist = jbm_distribution(0.5)
        counts = sample_outcomes(dist, n, seed=2024)
        for label, p in dist.as_dict().items():
            sigma = np.sqrt(p * (1 - p) / n)
            assert abs(counts.frequency(label) - p) < 3 * sigma + 1e-9

    def test_rejects_nonpositive_n(self):
        with pytest.raises(ValueError):
            sample_outcomes(lzm_distribution(0.5), 0, seed=1)

    def test_degenerate_distribution(self):
        counts = sample_outcomes(jbm_distribution(1.0), 500, seed=3)
        assert counts.counts["phi+"] == 500


class TestDerivedSeeds:
    def test_stable(self):
        assert derive_seed(12345, 0, 1) == derive_seed(12345, 0, 1)

    def test_index_sensitivity(self):
        base = 12345
        seen = {derive_seed(base, r, t) for r in range(5) for t in range(3)}
        assert len(seen) == 15

    def test_base_sensitivity(self):
        assert derive_seed(1, 0) != derive_seed(2, 0)


class TestExpectedCounts:
    def test_values(self):
        counts = expected_counts(pem_distribution(0.6), 1000)
        assert abs(counts.counts["phi+"] - 700.0) < 1e-9
        assert abs(counts.counts["psi-"] - 100.0) < 1e-9
        assert counts.seed is None

    def test_fractional_totals_allowed(self):
        counts = expected_counts(lzm_distribution(0.5), 10.5)
        assert abs(counts.total - 10.5) < 1e-15

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            expected_counts(lzm_distribution(0.5), 0)


class TestOutcomeCounts:
    def test_frequency(self):
        counts = OutcomeCounts(("a", "b"), {"a": 30, "b": 70}, 100)
        assert abs(counts.frequency("b") - 0.7) < 1e-15

    def test_label_cover(self):
        with pytest.raises(ValueError, match="cover"):
            OutcomeCounts(("a", "b"), {"a": 100}, 100)

    def test_total_consistency(self):
        with pytest.raises(ValueError, match="sum"):
            OutcomeCounts(("a", "b"), {"a": 30, "b": 60}, 100)
