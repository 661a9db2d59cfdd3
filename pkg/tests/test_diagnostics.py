"""Tests for the functional, path diagnostics, moment reports and martingale checks."""
from __future__ import annotations

import math

import numpy as np
import pytest

from levyns.core.diagnostics import (
    CFVerdict,
    MartingaleObserver,
    cadlag_check,
    closed_form_single_mode_gradient,
    dissipation_balance,
    f_lipschitz_check,
    f_theta,
    grad_f_theta,
    gradient_constant,
    gradient_fd_error,
    gradient_moment_report,
    hessian_f_theta,
    hessian_trace_bound,
    horizon_sequence,
    independence_test,
    joint_cf_points,
    lipschitz_sweep,
    martingale_cf_test,
    moment_bound_report,
    skorohod_upper_bound,
    tail_energy,
)
from levyns.core.levy import make_stream
from levyns.core.solver import InitialCondition, noise_path_for, run_trajectory, simulate, simulate_ensemble
from levyns.core.spectral import SpectralField, build_basis

LAMBDA_1 = 4.0 * math.pi ** 2


class TestFunctional:
    """Test suite for f(u) = (||u||^2 + 1)^(theta/2)."""

    def test_values_at_zero(self):
        """f(0) = 1 and grad f(0) = 0."""
        zero = SpectralField.zeros(build_basis(4))
        assert f_theta(zero, 0.5) == 1.0
        assert not grad_f_theta(zero, 0.5).coefficients.any()

    def test_gradient_against_differences(self):
        """The closed-form gradient matches central differences."""
        rng = np.random.default_rng(3)
        u = SpectralField(build_basis(8), rng.standard_normal(8))
        for theta in (0.3, 0.7, 1.0):
            assert gradient_fd_error(u, theta) < 1e-7

    def test_hessian_trace(self):
        """D^2 f is symmetric and its trace stays below n theta / s^(1 - theta/2)."""
        rng = np.random.default_rng(4)
        u = SpectralField(build_basis(6), 3.0 * rng.standard_normal(6))
        hessian = hessian_f_theta(u, 0.5)
        np.testing.assert_allclose(hessian, hessian.T)
        assert np.trace(hessian) <= hessian_trace_bound(u, 0.5)

    def test_lipschitz_pair(self):
        """|f(u) - f(v)| <= ||u - v||^theta on a hand-picked pair."""
        basis = build_basis(4)
        u = SpectralField(basis, [3.0, 0.0, 0.0, 0.0])
        v = SpectralField(basis, [0.0, 4.0, 0.0, 0.0])
        check = f_lipschitz_check(u, v, 1.0)
        assert check.holds
        assert check.difference == pytest.approx(math.sqrt(17.0) - math.sqrt(10.0))
        assert check.bound == pytest.approx(5.0)

    def test_lipschitz_sweep(self):
        """No violations over random pairs at many scales."""
        sweep = lipschitz_sweep(8, [0.25, 0.5, 1.0], 3000, np.random.default_rng(5))
        assert sweep.holds
        assert sweep.pairs == 3000
        assert sweep.witness is None

    def test_theta_range(self):
        """theta outside (0, 1] is refused."""
        with pytest.raises(ValueError):
            f_theta(SpectralField.zeros(build_basis(2)), 1.5)


class TestPathDiagnostics:
    """Test suite for pathwise checks on trajectory records."""

    def test_tail_energy(self, make_config):
        """The spectral tail is bounded by lambda_m^-2 sup ||u||^2."""
        record = simulate(make_config(n=16, initial=InitialCondition.random_sobolev(norm=2.0)))
        for m in (1, 5, 16):
            assert tail_energy(record, m).holds
        with pytest.raises(ValueError):
            tail_energy(record, 17)

    def test_dissipation_balance(self, make_config, noise_off):
        """Without noise f(u_T) - f(u_0) = -theta int ||grad u||^2 / sqrt(||u||^2 + 1)."""
        record = simulate(make_config(noise=noise_off, dt=1e-4))
        balance = dissipation_balance(record, 1.0)
        assert balance.change < 0.0
        assert abs(balance.discrepancy) <= 1e-4 * abs(balance.change)

    def test_cadlag_levy_ito(self, make_config, levy_ito_noise):
        """Jumps of the path sit exactly at logged big jumps."""
        record = simulate(make_config(noise=levy_ito_noise, horizon=2.0))
        report = cadlag_check(record, levy_ito_noise)
        assert report.holds
        assert report.checked_steps == 2000
        assert set(report.jump_steps) <= set(report.logged_steps)

    def test_cadlag_requirements(self, make_config, levy_ito_noise):
        """Strided records and backends that hide jumps are refused."""
        with pytest.raises(ValueError):
            cadlag_check(simulate(make_config(noise=levy_ito_noise, snapshot_stride=10)), levy_ito_noise)
        config = make_config()
        with pytest.raises(ValueError):
            cadlag_check(simulate(config), config.noise)

    def test_skorohod_bound(self, make_config):
        """A path is at distance 0 from itself and the bound never exceeds 1."""
        first = simulate(make_config())
        second = simulate(make_config(seed=99))
        assert skorohod_upper_bound(first, first) == 0.0
        assert 0.0 < skorohod_upper_bound(first, second) <= 1.0


class TestMomentReports:
    """Test suite for the a-priori moment estimates."""

    def test_zero_solution(self, make_config, noise_off):
        """phi = 0 without noise stays at 0, so C = 0 and the report passes."""
        config = make_config(noise=noise_off, initial=InitialCondition.zero())
        ensemble = simulate_ensemble(config, 16, workers=1)
        report = moment_bound_report(ensemble, 1.0, config.initial_field())
        assert report.c_hat == 0.0
        assert report.stable_under_t is None
        assert report.stable_under_m is True
        assert report.passed

    def test_noisy_rows(self, make_config):
        """One row per horizon; both terms are nonnegative."""
        config = make_config()
        ensemble = simulate_ensemble(config, 16, workers=1, horizons=[0.05, 0.1])
        report = moment_bound_report(ensemble, config.theta, config.initial_field())
        rows = report.rows()
        assert [row["t"] for row in rows] == pytest.approx([0.05, 0.1])
        assert all(row["sup_term"] > 0.0 and row["integral_term"] >= 0.0 for row in rows)
        assert report.c_hat >= rows[0]["c_hat_t"] - 1e-15
        assert report.trajectories == 16 and report.flagged_count == 0

    def test_needs_sixteen_trajectories(self, make_config):
        """Fewer than 16 trajectories are refused."""
        ensemble = simulate_ensemble(make_config(), 4, workers=1)
        with pytest.raises(ValueError):
            moment_bound_report(ensemble, 1.0, 1.0)

    def test_gradient_closed_form(self, make_config, noise_off):
        """A freely decaying mode gives int ||grad u|| = 1/sqrt(lambda_1) for large T."""
        config = make_config(noise=noise_off, horizon=1.0)
        ensemble = simulate_ensemble(config, 2, workers=1)
        report = gradient_moment_report(ensemble, 1.0, 1.0, c_hat=1.0)
        expected = closed_form_single_mode_gradient(1.0, LAMBDA_1, 1.0)
        assert expected == pytest.approx(1.0 / (2.0 * math.pi))
        assert report.mean[-1] == pytest.approx(expected, rel=1e-3)
        assert report.within_bound

    def test_gradient_constant(self):
        """C' = (2/lambda_1)^(1 - theta/2) C + lambda_1^(theta/2)."""
        assert gradient_constant(0.0, 1.0) == pytest.approx(2.0 * math.pi)
        assert gradient_constant(1.0, 1.0) == pytest.approx(math.sqrt(2.0 / LAMBDA_1) + 2.0 * math.pi)

    def test_horizon_sequence(self):
        """Horizons must increase strictly."""
        assert horizon_sequence([0.5, 1, 2]) == (0.5, 1.0, 2.0)
        with pytest.raises(ValueError):
            horizon_sequence([1.0, 1.0])


class TestMartingale:
    """Test suite for the martingale part of weak solutions."""

    def test_reconstruction_without_advection(self, make_config):
        """With n = 1, M_t is the summed noise up to the trapezoid error."""
        config = make_config(n=1, initial=InitialCondition.single_mode((0, 1)))
        steps = range(config.n_steps + 1)
        observer = MartingaleObserver([1], config.basis.eigenvalues, config.dt, steps)
        record = run_trajectory(config, 0, observers=(observer,))
        noise = np.concatenate([[0.0], np.cumsum(noise_path_for(config, 0).increments[:, 0])])
        x = LAMBDA_1 * config.dt
        # per step the trapezoid misses (e^{-x} - 1 + x (1 + e^{-x}) / 2) a_k = O(x^3) a_k
        per_step = abs(math.expm1(-x) + 0.5 * x * (1.0 + math.exp(-x)))
        allowed = per_step * np.concatenate([[0.0], np.cumsum(np.abs(record.snapshots[:-1, 0]))])
        assert np.all(np.abs(observer.values[0] - noise) <= allowed * (1.0 + 1e-6) + 1e-12)

    def test_noiseless_mode_passes(self, make_config, noise_off):
        """A mode that never moves has CF 1 at every point."""
        report = martingale_cf_test(make_config(noise=noise_off), 1, [1.0, 2.0], [(0.0, 0.05)], 4)
        assert report.beta == 0.0
        assert report.verdict is CFVerdict.PASS
        assert report.halved is not None and report.halved.dt == pytest.approx(5e-4)

    def test_pair_order(self, make_config):
        """Pairs must satisfy s < t."""
        with pytest.raises(ValueError):
            martingale_cf_test(make_config(), 1, [1.0], [(0.05, 0.05)], 4)

    @pytest.mark.slow
    def test_law_of_martingale_increments(self, make_config):
        """M^(1) increments follow exp((t - s) psi(beta_1 xi))."""
        report = martingale_cf_test(
            make_config(), 1, [0.5, 1.0, 2.0], [(0.0, 0.05), (0.05, 0.1)], 2000, workers=None
        )
        assert report.trajectories == 2000
        assert report.verdict is CFVerdict.PASS

    def test_independence(self, make_config):
        """Distinct modes have independent martingale increments."""
        (report,) = independence_test(make_config(), [(1, 2)], 200)
        assert report.modes == (1, 2) and report.t == pytest.approx(0.1)
        assert report.passed
        with pytest.raises(ValueError):
            independence_test(make_config(), [(2, 2)], 4)

    def test_joint_cf_detects_dependence(self):
        """Identical samples fail the product test; independent ones pass."""
        rng = make_stream(21)
        x = rng.standard_normal(20_000)
        y = rng.standard_normal(20_000)
        assert not all(p.passed for p in joint_cf_points(x, x, [(1.0, 1.0)]))
        assert all(p.passed for p in joint_cf_points(x, y, [(0.5, 0.5), (1.0, -1.0)]))
