"""Tests for observables, empirical measures, stationarity and sensitivity."""
from __future__ import annotations

import numpy as np
import pytest

from levyns.core.invariant import (
    EnergyBandObservable,
    Histogram,
    HistogramEdges,
    L2NormObservable,
    ModeCoeffObservable,
    adaptive_stride,
    initial_condition_sensitivity,
    kb_estimate,
    kb_windows,
    lag_autocorrelation,
    observable_registry,
    window_stationarity_test,
)
from levyns.core.solver import InitialCondition
from levyns.core.spectral import build_basis


class TestObservables:
    """Test suite for the observable registry."""

    def test_parse_list(self):
        """Tokens are parsed in order and duplicates dropped."""
        observables = observable_registry.parse_list("l2, mode:3,band:1:1,l2")
        assert [o.name for o in observables] == ["l2", "mode:3", "band:1:1"]

    @pytest.mark.parametrize("text", ["vorticity", "mode", "mode:0", "band:2", "l2:1", " , "])
    def test_bad_tokens(self, text):
        """Unknown names and wrong parameter counts are refused."""
        with pytest.raises(ValueError):
            observable_registry.parse_list(text)

    def test_values(self):
        """Each observable evaluates its formula on a single mode."""
        basis = build_basis(8)
        coeffs = np.zeros(8)
        coeffs[2] = 2.0
        lam = basis.eigenvalues[2]
        assert L2NormObservable().evaluate(coeffs, basis, 1.0) == 2.0
        assert ModeCoeffObservable(3).evaluate(coeffs, basis, 1.0) == 2.0
        assert EnergyBandObservable(1, 1).evaluate(coeffs, basis, 1.0) == pytest.approx(2.0)
        assert EnergyBandObservable(1.2, 2).evaluate(coeffs, basis, 1.0) == 0.0
        h1 = observable_registry.build("h1theta").evaluate(coeffs, basis, 0.5)
        assert h1 == pytest.approx((4.0 * lam) ** 0.25)
        assert observable_registry.build("ftheta").evaluate(coeffs, basis, 1.0) == pytest.approx(np.sqrt(5.0))

    def test_mode_beyond_basis(self):
        """mode:j needs j <= n."""
        with pytest.raises(ValueError):
            ModeCoeffObservable(9).check(build_basis(8))


class TestHistograms:
    """Test suite for fixed-edge histograms."""

    def test_mass_sums_to_one(self):
        """Bins, underflow and overflow carry all the mass."""
        rng = np.random.default_rng(0)
        samples = rng.standard_normal(1000)
        edges = HistogramEdges.from_samples(samples[:100], signed=True)
        histogram = Histogram.build("mode:1", samples, edges)
        assert histogram.total == pytest.approx(1.0)
        assert histogram.count == 1000
        rows = histogram.rows("0:1")
        assert rows[-1]["bin_hi"] == np.inf
        assert sum(row["mass"] for row in rows) == pytest.approx(1.0)

    def test_point_mass(self):
        """A constant sample still lands inside the edges."""
        edges = HistogramEdges.from_samples(np.full(10, 0.5))
        histogram = Histogram.build("l2", np.full(10, 0.5), edges)
        assert histogram.overflow == 0.0
        assert histogram.mass.sum() == pytest.approx(1.0)


class TestStride:
    """Test suite for the autocorrelation-based stride."""

    def test_white_noise_uses_floor(self):
        """Uncorrelated samples need only the minimum stride."""
        series = np.random.default_rng(1).standard_normal(10_000)
        assert adaptive_stride(series) == 10

    def test_persistent_series_hits_limit(self):
        """A trend never decorrelates; the stride caps at a tenth of the path."""
        assert adaptive_stride(np.arange(500.0)) == 50

    def test_constant_series(self):
        """A constant has zero autocorrelation by convention."""
        assert lag_autocorrelation(np.ones(50), 3) == 0.0


class TestEmpiricalMeasure:
    """Test suite for Krylov-Bogoliubov sampling."""

    def test_sampling_grid(self, make_config):
        """Samples sit at burn_in + i stride and pool over trajectories."""
        config = make_config()
        observables = observable_registry.parse_list("l2,mode:1")
        measure = kb_estimate(config, observables, 4, burn_in=0.05, stride=10)
        np.testing.assert_allclose(measure.times, [0.05, 0.06, 0.07, 0.08, 0.09, 0.1])
        assert measure.values.shape == (4, 2, 6)
        assert measure.samples("l2").shape == (24,)
        assert measure.underpowered
        assert not measure.adaptive_stride
        for histogram in measure.histograms():
            assert histogram.total == pytest.approx(1.0)

    def test_windows_are_half_open(self, make_config):
        """A window keeps start <= t < end and the original edges."""
        config = make_config()
        measure = kb_estimate(config, [L2NormObservable()], 2, burn_in=0.05, stride=10)
        window = measure.window(0.05, 0.08)
        np.testing.assert_allclose(window.times, [0.05, 0.06, 0.07])
        assert window.window_label == "0.05:0.08"
        assert window.edges is measure.edges

    def test_adaptive_stride_flag(self, make_config):
        """Without a stride the pilot path chooses one."""
        measure = kb_estimate(make_config(), [L2NormObservable()], 2, burn_in=0.0)
        assert measure.adaptive_stride
        assert measure.stride_steps >= 10

    def test_blown_up_ensemble_is_flagged(self, make_config):
        """When every trajectory blows up the measure is empty and flagged instead of raising."""
        config = make_config(n=8, initial=InitialCondition.random_sobolev(norm=1e200))
        measure = kb_estimate(config, [L2NormObservable()], 3, burn_in=0.0, stride=10)
        assert measure.flagged_count == 3
        assert measure.trajectories == 0
        assert measure.sample_count == 0
        assert measure.stride_steps == 10
        assert [h.count for h in measure.histograms()] == [0]

    def test_burn_in_range(self, make_config):
        """burn_in must lie before T."""
        with pytest.raises(ValueError):
            kb_estimate(make_config(), [L2NormObservable()], 2, burn_in=0.1)


class TestStationarity:
    """Test suite for the window comparison."""

    def test_decaying_path_is_not_stationary(self, make_config, noise_off):
        """A deterministic decay has disjoint windows: KS = 1 and a tiny p-value."""
        config = make_config(noise=noise_off, horizon=0.2)
        first, second = kb_windows(
            config, [L2NormObservable()], [(0.0, 0.1), (0.1, 0.2)], 10, stride=10
        )
        report = window_stationarity_test(first, second, seed=3)
        (comparison,) = report.comparisons
        assert comparison.distance == 1.0
        assert comparison.block_swaps
        assert not report.stationary

    def test_identical_windows(self, make_config):
        """A window compared with itself has distance 0 and p = 1."""
        measure = kb_estimate(make_config(), [L2NormObservable()], 4, burn_in=0.0, stride=10)
        report = window_stationarity_test(measure, measure)
        assert report.comparisons[0].p_value == 1.0
        assert report.stationary

    def test_overlap_is_refused(self, make_config):
        """Overlapping windows are not independent samples."""
        measure = kb_estimate(make_config(), [L2NormObservable()], 2, burn_in=0.0, stride=10)
        with pytest.raises(ValueError):
            window_stationarity_test(measure.window(0.0, 0.06), measure.window(0.03, 0.1))

    def test_few_trajectories_use_pooled_permutations(self, make_config):
        """Below 8 trajectories the permutation pools samples."""
        measure = kb_estimate(make_config(), [L2NormObservable()], 2, burn_in=0.0, stride=10)
        report = window_stationarity_test(measure.window(0.0, 0.05), measure.window(0.05, 0.1), permutations=99)
        assert not report.comparisons[0].block_swaps
        assert 0.0 < report.comparisons[0].p_value <= 1.0


class TestSensitivity:
    """Test suite for initial-condition sensitivity."""

    def test_amplitudes_differ_and_baseline_vanishes(self, make_config, noise_off):
        """Without noise different amplitudes separate; a reseeded rerun coincides."""
        configs = [
            make_config(noise=noise_off, initial=InitialCondition.single_mode((1, 0), amplitude=1.0)),
            make_config(noise=noise_off, initial=InitialCondition.single_mode((1, 0), amplitude=2.0)),
        ]
        report = initial_condition_sensitivity(configs, [L2NormObservable()], (0.05, 0.1), 2, stride=10)
        assert report.distances("l2")[0] > 0.0
        assert report.baseline_band("l2") == 0.0
        assert [row["baseline"] for row in report.rows()] == [False, True]

    def test_configs_must_share_noise(self, make_config, noise_off):
        """Only the initial condition may change between configs."""
        with pytest.raises(ValueError):
            initial_condition_sensitivity(
                [make_config(), make_config(noise=noise_off)], [L2NormObservable()], (0.05, 0.1), 2
            )
