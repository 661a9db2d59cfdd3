"""Tests for Levy measures, H_theta, the symbol and the samplers."""
from __future__ import annotations

import math

import numpy as np
import pytest

from levyns.core.constants import HILL_TOLERANCE, SIGMA_LEVEL
from levyns.core.errors import QuadratureError
from levyns.core.levy import (
    CoefficientSequence,
    CompoundPoissonSampler,
    LevyFamily,
    LevyMeasureSpec,
    LevyNoiseSpec,
    NoiseBackend,
    StreamPurpose,
    backend_agreement_check,
    bias_bound,
    empirical_cf,
    fractional_moment_check,
    h_theta,
    hill_bias_slope,
    hill_check,
    hill_estimator,
    hill_tail_count,
    increment,
    increment_cf,
    increment_cf_check,
    levy_symbol,
    make_stream,
    moment_growth,
    noise_streams,
    sample_path,
    sample_stable,
    sampler_test,
    stable_char_exponent,
    unit_increments,
)


class TestLevyMeasure:
    """Test suite for closed-form masses and moments."""

    def test_family(self):
        """Truncation switches the family."""
        assert LevyMeasureSpec(alpha=1.2).family is LevyFamily.SYMMETRIC_STABLE
        assert LevyMeasureSpec(alpha=1.2, truncation=5.0).family is LevyFamily.TRUNCATED_STABLE

    def test_big_jump_mass(self):
        """nu(|y| > 1) = 2c/alpha untruncated, 2c(1 - R^-alpha)/alpha truncated."""
        assert LevyMeasureSpec(alpha=1.5, intensity=2.0).big_jump_mass() == pytest.approx(8.0 / 3.0)
        truncated = LevyMeasureSpec(alpha=1.0, truncation=4.0)
        assert truncated.big_jump_mass() == pytest.approx(2.0 * (1.0 - 0.25))

    def test_theta_moment(self):
        """The big-jump theta-moment is finite iff theta < alpha when untruncated."""
        measure = LevyMeasureSpec(alpha=1.5)
        assert measure.big_jump_theta_moment(1.0) == pytest.approx(4.0)
        assert math.isinf(LevyMeasureSpec(alpha=0.8).big_jump_theta_moment(1.0))
        assert math.isfinite(LevyMeasureSpec(alpha=0.8, truncation=10.0).big_jump_theta_moment(1.0))

    def test_small_jump_second_moment(self):
        """int_{|y|<=delta} y^2 nu(dy) = 2c delta^(2-alpha)/(2-alpha)."""
        measure = LevyMeasureSpec(alpha=1.5)
        assert measure.small_jump_second_moment(0.01) == pytest.approx(4.0 * 0.01 ** 0.5)

    def test_invalid_parameters(self):
        """alpha outside (0, 2) and nonpositive intensity are rejected."""
        with pytest.raises(ValueError):
            LevyMeasureSpec(alpha=2.0)
        with pytest.raises(ValueError):
            LevyMeasureSpec(alpha=1.0, intensity=0.0)


class TestHTheta:
    """Test suite for the summability functional."""

    def test_reference_value(self, stable_noise):
        """alpha = 1.5, theta = 1, beta_j = j^-2: H = 4 + zeta(2)."""
        result = h_theta(stable_noise)
        assert not result.diverges
        assert result.value == pytest.approx(4.0 + math.pi ** 2 / 6.0, rel=1e-12)
        assert result.value == pytest.approx(5.6449, abs=1e-4)

    def test_big_jump_divergence(self):
        """theta >= alpha untruncated diverges and says why."""
        spec = LevyNoiseSpec(LevyMeasureSpec(alpha=0.8), CoefficientSequence.power(2.0), theta=1.0)
        result = h_theta(spec)
        assert result.diverges and math.isinf(result.value)
        assert "big-jump" in result.reason

    def test_series_divergence(self):
        """beta_j = j^-1 with theta = 1 makes the series diverge."""
        spec = LevyNoiseSpec(LevyMeasureSpec(alpha=1.5), CoefficientSequence.power(1.0), theta=1.0)
        assert h_theta(spec).diverges

    def test_linear_in_intensity(self, stable_noise):
        """Doubling c doubles the big-jump term only."""
        doubled = LevyNoiseSpec(LevyMeasureSpec(alpha=1.5, intensity=2.0), stable_noise.betas, 1.0)
        base, other = h_theta(stable_noise), h_theta(doubled)
        assert other.big_jump_term == pytest.approx(2.0 * base.big_jump_term)
        assert other.series_term == pytest.approx(base.series_term)

    def test_explicit_list_with_zeros(self):
        """Zeros in an explicit beta list contribute nothing."""
        betas = CoefficientSequence.from_values([1.0, 0.0, 0.25])
        spec = LevyNoiseSpec(LevyMeasureSpec(alpha=1.5), betas, theta=0.5)
        assert h_theta(spec).series_term == pytest.approx(1.0 + 0.5)


class TestCoefficients:
    """Test suite for beta sequences."""

    def test_parse(self):
        """power:<r> and explicit lists are both accepted."""
        power = CoefficientSequence.parse("power:1.5")
        np.testing.assert_allclose(power.values(3), [1.0, 2 ** -1.5, 3 ** -1.5])
        assert power.length is None
        explicit = CoefficientSequence.parse([0.5, 0.25])
        assert explicit.length == 2
        with pytest.raises(ValueError):
            explicit.values(3)
        with pytest.raises(ValueError):
            CoefficientSequence.parse("linear:2")


class TestLevySymbol:
    """Test suite for psi by quadrature against closed forms."""

    @pytest.mark.parametrize("alpha", [0.8, 1.0, 1.5])
    def test_matches_stable_closed_form(self, alpha):
        """Quadrature agrees with -K |xi|^alpha for the untruncated family."""
        measure = LevyMeasureSpec(alpha=alpha)
        for xi in (0.5, 1.0, 2.0):
            expected = stable_char_exponent(measure, xi)
            assert levy_symbol(measure, xi).real == pytest.approx(expected, rel=1e-6)

    def test_cauchy_constant(self):
        """At alpha = 1, psi(xi) = -pi c |xi|."""
        measure = LevyMeasureSpec(alpha=1.0, intensity=0.5)
        assert levy_symbol(measure, 3.0).real == pytest.approx(-0.5 * math.pi * 3.0, rel=1e-6)

    def test_symmetric_and_real(self):
        """psi is even in xi, real and vanishes at zero."""
        measure = LevyMeasureSpec(alpha=1.3, truncation=3.0)
        assert levy_symbol(measure, 0.0) == 0j
        assert levy_symbol(measure, -1.7) == levy_symbol(measure, 1.7)
        assert levy_symbol(measure, 1.7).imag == 0.0

    def test_truncated_below_stable(self):
        """Removing jumps beyond R makes |psi| smaller."""
        full = LevyMeasureSpec(alpha=1.5)
        truncated = LevyMeasureSpec(alpha=1.5, truncation=2.0)
        assert abs(levy_symbol(truncated, 1.0)) < abs(levy_symbol(full, 1.0))

    def test_quadrature_error_type(self):
        """QuadratureError carries the achieved tolerance."""
        error = QuadratureError("psi", 1e-3, 1e-10)
        assert error.achieved == 1e-3 and "did not converge" in str(error)


class TestStreams:
    """Test suite for counter-based streams."""

    def test_reproducible(self):
        """Same key, same draws."""
        a = make_stream(5, StreamPurpose.NOISE, 2, 3).random(10)
        b = make_stream(5, StreamPurpose.NOISE, 2, 3).random(10)
        np.testing.assert_array_equal(a, b)

    def test_keys_are_disjoint(self):
        """Purpose, trajectory and mode each change the stream."""
        base = make_stream(5, StreamPurpose.NOISE, 2, 3).random(4)
        for other in (
            make_stream(5, StreamPurpose.PERMUTATION, 2, 3),
            make_stream(5, StreamPurpose.NOISE, 1, 3),
            make_stream(5, StreamPurpose.NOISE, 2, 4),
            make_stream(6, StreamPurpose.NOISE, 2, 3),
        ):
            assert not np.array_equal(base, other.random(4))


class TestSampling:
    """Test suite for increments and noise paths."""

    def test_noise_of_a_mode_ignores_galerkin_size(self, stable_noise):
        """Mode j draws the same increments at n = 4 and n = 8."""
        small = sample_path(stable_noise, 4, 1e-2, 50, noise_streams(3, 0, 4))
        large = sample_path(stable_noise, 8, 1e-2, 50, noise_streams(3, 0, 8))
        np.testing.assert_array_equal(small.increments, large.increments[:, :4])

    def test_betas_scale_increments(self, stable_noise):
        """A zero coefficient switches a mode off."""
        spec = LevyNoiseSpec(stable_noise.measure, CoefficientSequence.from_values([1.0, 0.0, 0.5]), 1.0)
        path = sample_path(spec, 3, 1e-2, 20, noise_streams(1, 0, 3))
        assert np.all(path.increments[:, 1] == 0.0)
        assert np.any(path.increments[:, 0] != 0.0)

    def test_disabled_noise(self, noise_off):
        """The deterministic limit has zero increments."""
        path = sample_path(noise_off, 4, 1e-2, 10, noise_streams(0, 0, 4))
        assert not path.increments.any()

    def test_increment_shape(self, stable_noise):
        """One step of n per-mode jumps; the exact backend logs no big jumps."""
        step = increment(stable_noise, 6, 1e-3, make_stream(0))
        assert step.n == 6
        assert step.big_jumps == () and step.bias_bound is None
        with pytest.raises(ValueError):
            increment(stable_noise, 6, 0.0, make_stream(0))

    def test_levy_ito_logs_big_jumps(self, levy_ito_noise):
        """With cutoff 1 every nonzero increment comes from logged jumps with |y| > 1."""
        path = sample_path(levy_ito_noise, 3, 1e-2, 2000, noise_streams(9, 0, 3))
        assert path.tracks_big_jumps
        logged = np.zeros_like(path.increments)
        betas = levy_ito_noise.betas.values(3)
        for step, j, y in path.big_jumps:
            assert abs(y) > 1.0
            logged[step, j - 1] += betas[j - 1] * y
        np.testing.assert_allclose(logged, path.increments, atol=1e-12)
        assert len(path.big_jumps) > 0

    def test_big_jump_rate(self):
        """The compound-Poisson rate is nu(delta < |y| <= R)."""
        measure = LevyMeasureSpec(alpha=1.5)
        sampler = CompoundPoissonSampler(measure, 0.1)
        assert sampler.jump_rate == pytest.approx(measure.tail_mass(0.1))
        assert sampler.bias_bound(0.01) == pytest.approx(math.sqrt(0.01 * measure.small_jump_second_moment(0.1)))

    def test_exact_backend_requires_untruncated(self):
        """Truncated measures need the levy-ito backend."""
        with pytest.raises(ValueError):
            LevyNoiseSpec(
                LevyMeasureSpec(alpha=1.5, truncation=2.0),
                CoefficientSequence.power(2.0),
                1.0,
                backend=NoiseBackend.EXACT,
            )

    def test_stable_draws_reproducible(self):
        """Draws depend only on the generator state."""
        a = sample_stable(1.2, 1.0, make_stream(1), size=100)
        b = sample_stable(1.2, 1.0, make_stream(1), size=100)
        np.testing.assert_array_equal(a, b)


class TestChecks:
    """Test suite for the statistical helpers."""

    def test_empirical_cf_of_constant(self):
        """A point mass at zero has CF 1 with zero spread."""
        result = empirical_cf(np.zeros(100), 2.0)
        assert result.value == 1 + 0j
        assert result.std_error == 0.0

    def test_hill_on_pareto(self):
        """Exact Pareto tails give the index back."""
        rng = np.random.default_rng(0)
        samples = rng.pareto(1.5, 200_000) + 1.0
        assert hill_estimator(samples, 20_000) == pytest.approx(1.5, abs=0.05)

    def test_moment_growth_stabilises_below_alpha(self):
        """E|X|^theta settles for theta < alpha."""
        draws = sample_stable(1.5, 1.0, make_stream(2), size=200_000)
        growth = moment_growth(draws, 0.5, [50_000, 100_000, 200_000])
        assert np.all(np.abs(growth / growth[-1] - 1.0) < 0.05)

    def test_fractional_moment_chain(self, stable_noise):
        """E||L||^theta <= E(sum beta|L|)^theta <= sum beta^theta E|L|^theta."""
        spec = LevyNoiseSpec(stable_noise.measure, stable_noise.betas, theta=0.5)
        report = fractional_moment_check(spec, 8, 1.0, 20_000, make_stream(4))
        assert report.ordered
        assert report.norm_moment <= report.sum_moment <= report.bound

    def test_increment_cf_needs_draws(self, stable_noise):
        """Fewer than 10^4 draws are refused."""
        with pytest.raises(ValueError):
            increment_cf_check(stable_noise, 0.1, [1.0], 100, make_stream(0))

    @pytest.mark.slow
    def test_increment_cf_levy_ito(self):
        """Levy-Ito increments match exp(dt psi) up to the small-jump bias."""
        spec = LevyNoiseSpec(
            LevyMeasureSpec(alpha=1.5, truncation=5.0),
            CoefficientSequence.from_values([1.0]),
            1.0,
            backend=NoiseBackend.LEVY_ITO,
            small_jump_cutoff=0.05,
        )
        dt = 0.1
        report = increment_cf_check(spec, dt, [0.25, 0.5, 1.0], 200_000, make_stream(8))
        bias = bias_bound(spec, dt)
        for p in report.points:
            assert abs(p.empirical - p.theoretical) <= 5.0 * p.std_error + p.xi * bias

    @pytest.mark.slow
    def test_cauchy_sampler_self_test(self):
        """At alpha = 1 the median of |X| is 1 within 0.01 at 10^6 draws."""
        report = sampler_test(1.0, 1_000_000, make_stream(0, StreamPurpose.SAMPLER_TEST))
        checks = {c.check: c for c in report.checks}
        assert checks["cauchy_median_abs"].passed
        assert checks["positive_fraction"].passed
        assert abs(checks["hill_alpha"].value - 1.0) < 0.05

    def test_hill_bias_slope_at_three_halves(self):
        """For alpha = 1.5 the second-order tail term gives slope exactly 2."""
        assert hill_bias_slope(1.5) == pytest.approx(2.0, rel=1e-9)
        assert hill_bias_slope(0.8) < 0.0

    def test_hill_tail_count(self):
        """1% of the draws unless the first-order bias would pass 1%."""
        assert hill_tail_count(1.0, 1_000_000) == 10_000
        assert hill_tail_count(0.8, 1_000_000) == 10_000
        assert hill_tail_count(1.5, 1_000_000) == 3_333
        assert 100 < hill_tail_count(1.9, 1_000_000) < 1_000
        assert hill_tail_count(1.9, 100) == 10

    @pytest.mark.slow
    @pytest.mark.parametrize("alpha", [0.8, 1.2, 1.5, 1.9])
    def test_hill_recovers_alpha(self, alpha):
        """The Hill check passes at 10^6 draws; its band is 0.05 up to alpha = 1.2."""
        draws = np.asarray(sample_stable(alpha, 1.0, make_stream(21), size=1_000_000))
        check = hill_check(draws, alpha)
        assert check.passed
        assert abs(check.value - alpha) <= check.tolerance
        if alpha <= 1.2:
            assert check.tolerance <= HILL_TOLERANCE + 0.005
        else:
            assert check.tolerance > HILL_TOLERANCE

    def test_increment_cf_exact(self):
        """Exact increments at alpha = 1.5, dt = 0.1 match exp(dt psi) within 3 sigma."""
        spec = LevyNoiseSpec(LevyMeasureSpec(alpha=1.5), CoefficientSequence.from_values([1.0]), 0.5)
        report = increment_cf_check(spec, 0.1, [0.5, 1.0, 2.0, 4.0], 200_000, make_stream(17))
        assert report.passed
        assert [p.xi for p in report.points] == [0.5, 1.0, 2.0, 4.0]

    @pytest.mark.parametrize("backend", [NoiseBackend.EXACT, NoiseBackend.LEVY_ITO])
    def test_increment_cf_additive_in_time(self, backend):
        """Two independent dt increments have the CF of one 2 dt increment."""
        truncation = None if backend is NoiseBackend.EXACT else 5.0
        measure = LevyMeasureSpec(alpha=1.5, truncation=truncation)
        spec = LevyNoiseSpec(
            measure, CoefficientSequence.from_values([1.0]), 0.5, backend=backend, small_jump_cutoff=0.05
        )
        rng = make_stream(23)
        dt, size = 0.1, 100_000
        first, _ = unit_increments(spec, dt, size, rng)
        second, _ = unit_increments(spec, dt, size, rng)
        whole, _ = unit_increments(spec, 2.0 * dt, size, rng)
        for xi in (0.5, 1.0, 2.0):
            assert increment_cf(measure, xi, 2.0 * dt) == pytest.approx(increment_cf(measure, xi, dt) ** 2, rel=1e-8)
            summed, single = empirical_cf(first + second, xi), empirical_cf(whole, xi)
            se = math.hypot(summed.std_error, single.std_error)
            assert abs(summed.value - single.value) < 4.0 * se

    @pytest.mark.slow
    @pytest.mark.parametrize("alpha", [0.8, 1.5])
    def test_self_similarity(self, alpha):
        """A draw at scale 4^(1/alpha) and a sum of four unit draws pass KS at 1%."""
        report = sampler_test(alpha, 100_000, make_stream(5, StreamPurpose.SAMPLER_TEST))
        check = report.check("self_similarity_ks_p")
        assert check.passed
        assert check.value >= 0.01

    def test_cf_bias_factor(self):
        """expm1(dt xi^2 m2 / 2) with m2 the second moment below the cutoff."""
        measure = LevyMeasureSpec(alpha=1.5)
        sampler = CompoundPoissonSampler(measure, 1e-3)
        m2 = measure.small_jump_second_moment(1e-3)
        assert sampler.cf_bias_factor(0.1, 4.0) == pytest.approx(math.expm1(0.8 * m2))
        assert sampler.cf_bias_factor(0.1, 2.0) < sampler.cf_bias_factor(0.1, 4.0)
        assert CompoundPoissonSampler(measure, 1e-4).cf_bias_factor(0.1, 4.0) < sampler.cf_bias_factor(0.1, 4.0)

    def test_backend_agreement_coarse_cutoff(self):
        """At cutoff 0.5 the gap stays within 3 sigma plus the small-jump bias."""
        report = backend_agreement_check(
            LevyMeasureSpec(alpha=1.5), 0.1, [0.5, 1.0], 20_000, make_stream(31), cutoff=0.5
        )
        assert report.passed
        assert all(p.bias > 0.0 for p in report.points)

    def test_backend_agreement_needs_untruncated(self):
        """The exact side cannot sample a truncated measure."""
        with pytest.raises(ValueError):
            backend_agreement_check(LevyMeasureSpec(alpha=1.5, truncation=2.0), 0.1, [1.0], 10_000, make_stream(0))

    @pytest.mark.slow
    def test_backend_agreement_fine_cutoff(self):
        """Exact and levy-ito at cutoff 10^-3 agree within 3 sigma plus the bias bound."""
        report = backend_agreement_check(
            LevyMeasureSpec(alpha=1.5), 0.1, [0.5, 1.0, 2.0, 4.0], 200_000, make_stream(37), cutoff=1e-3
        )
        for p in report.points:
            assert p.gap <= SIGMA_LEVEL * p.std_error + p.bias
        assert report.passed
