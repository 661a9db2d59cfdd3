"""Monte Carlo estimates of the a-priori fractional moment bound.

For horizons t_k the ensemble gives

    S(t)  = E sup_{s<=t} ||u_s||^theta
    I(t)  = E int_0^t ||grad u_s||^2 / (||u_s||^2 + 1)^(1 - theta/2) ds

and the empirical envelope C = max_k (S + I)(t_k) / (1 + ||phi||^theta + t_k).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from levyns.core.constants import FLAGGED_FRACTION_LIMIT
from levyns.core.solver.ensemble import EnsembleResult
from levyns.core.spectral.basis import FOUR_PI_SQ
from levyns.core.spectral.field import SpectralField

logger = logging.getLogger(__name__)

MIN_TRAJECTORIES = 16


def _phi_norm(phi: Union[SpectralField, float]) -> float:
    return phi.norm() if isinstance(phi, SpectralField) else float(phi)


def _mean_se(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column means and Monte Carlo standard errors over trajectories (rows)."""
    count = values.shape[0]
    mean = values.mean(axis=0)
    if count < 2:
        return mean, np.full_like(mean, np.inf)
    return mean, values.std(axis=0, ddof=1) / math.sqrt(count)


def _affine_fit(t: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """(intercept, slope) by least squares; a single point gives slope 0."""
    if t.shape[0] < 2:
        return float(y[0]) if y.size else 0.0, 0.0
    slope, intercept = np.polyfit(t, y, 1)
    return float(intercept), float(slope)


@dataclass(frozen=True)
class EnvelopeEstimate:
    """Envelope constant with the horizon where it is attained and its standard error."""
    value: float
    std_error: float
    argmax: int


def _envelope(totals: np.ndarray, horizons: np.ndarray, phi_theta: float) -> EnvelopeEstimate:
    """C = max_k mean(totals[:, k]) / (1 + ||phi||^theta + t_k)."""
    mean, se = _mean_se(totals)
    denominators = 1.0 + phi_theta + horizons
    ratios = mean / denominators
    k = int(np.argmax(ratios))
    return EnvelopeEstimate(float(ratios[k]), float(se[k] / denominators[k]), k)


@dataclass(frozen=True)
class MomentReport:
    """Estimates of both terms of the bound with the implied envelope constant."""
    theta: float
    phi_norm: float
    horizons: tuple[float, ...]
    sup_mean: tuple[float, ...]
    sup_se: tuple[float, ...]
    integral_mean: tuple[float, ...]
    integral_se: tuple[float, ...]
    c_hat: float
    c_hat_se: float
    c_hat_by_horizon: tuple[float, ...]
    envelope_intercept: float
    envelope_slope: float
    c_hat_sup: float
    trajectories: int
    flagged_count: int
    stable_under_t: Optional[bool]
    stable_under_m: Optional[bool]

    @property
    def flagged_fraction(self) -> float:
        total = self.trajectories + self.flagged_count
        return self.flagged_count / total if total else 0.0

    @property
    def reliable(self) -> bool:
        return self.flagged_fraction <= FLAGGED_FRACTION_LIMIT

    @property
    def passed(self) -> bool:
        """Reliable and not shown unstable; checks that could not be run do not fail."""
        return self.reliable and self.stable_under_t is not False and self.stable_under_m is not False

    def rows(self) -> list[dict]:
        return [
            {
                "t": t,
                "sup_term": self.sup_mean[k],
                "sup_se": self.sup_se[k],
                "integral_term": self.integral_mean[k],
                "integral_se": self.integral_se[k],
                "c_hat_t": self.c_hat_by_horizon[k],
            }
            for k, t in enumerate(self.horizons)
        ]

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "phi_norm": self.phi_norm,
            "c_hat": self.c_hat,
            "c_hat_se": self.c_hat_se,
            "envelope_intercept": self.envelope_intercept,
            "envelope_slope": self.envelope_slope,
            "c_hat_sup": self.c_hat_sup,
            "trajectories": self.trajectories,
            "flagged_count": self.flagged_count,
            "flagged_fraction": self.flagged_fraction,
            "reliable": self.reliable,
            "stable_under_t": self.stable_under_t,
            "stable_under_m": self.stable_under_m,
            "passed": self.passed,
            "rows": self.rows(),
        }


def _stable(a: EnvelopeEstimate, b: EnvelopeEstimate, se: float) -> bool:
    return abs(a.value - b.value) <= 2.0 * se


def moment_bound_report(
    ensemble: EnsembleResult,
    theta: float,
    phi: Union[SpectralField, float],
    stable_from: float = 0.0,
) -> MomentReport:
    """Estimate both terms at every horizon and the envelope constant.

    Stability under doubling T compares C over horizons up to T/2 (from
    ``stable_from`` on) with C over all horizons; under doubling M it compares
    the first half of the trajectories with all of them. Either check is None
    when the horizons or trajectory count do not allow it. Flagged trajectories
    are excluded from the estimates and counted; more than 1% flagged marks the
    report unreliable.
    """
    if ensemble.size < MIN_TRAJECTORIES:
        raise ValueError(f"Need at least {MIN_TRAJECTORIES} trajectories, got {ensemble.size}")
    valid = ensemble.valid()
    if not valid:
        raise ValueError("Every trajectory of the ensemble blew up")
    horizons = np.asarray(ensemble.horizons, dtype=float)
    phi_theta = _phi_norm(phi) ** theta

    sup = np.array([s.sup_theta for s in valid])
    integral = np.array([s.weighted_integral for s in valid])
    totals = sup + integral
    sup_mean, sup_se = _mean_se(sup)
    int_mean, int_se = _mean_se(integral)
    full = _envelope(totals, horizons, phi_theta)

    total_mean = totals.mean(axis=0)
    running = np.maximum.accumulate(total_mean / (1.0 + phi_theta + horizons))
    intercept, slope = _affine_fit(horizons, total_mean)

    # sup form: E sup f(u) + theta E int ... - f(phi) against t + sqrt(t)
    f_sup = (sup ** (2.0 / theta) + 1.0) ** (theta / 2.0)
    lhs_sup = (f_sup + theta * integral).mean(axis=0) - (_phi_norm(phi) ** 2 + 1.0) ** (theta / 2.0)
    positive = horizons > 0
    c_hat_sup = float(np.max(lhs_sup[positive] / (horizons[positive] + np.sqrt(horizons[positive])))) if positive.any() else 0.0

    stable_t: Optional[bool] = None
    half_t = horizons[-1] / 2.0
    early = np.nonzero((horizons <= half_t + 1e-12) & (horizons >= stable_from))[0]
    if early.size:
        cut = int(early[-1]) + 1
        shorter = _envelope(totals[:, :cut], horizons[:cut], phi_theta)
        stable_t = _stable(full, shorter, max(full.std_error, shorter.std_error))

    stable_m: Optional[bool] = None
    half = [s for s in ensemble.summaries[: ensemble.size // 2] if not s.flagged]
    if len(half) >= 2:
        half_totals = np.array([s.sup_theta for s in half]) + np.array([s.weighted_integral for s in half])
        half_est = _envelope(half_totals, horizons, phi_theta)
        stable_m = _stable(full, half_est, half_est.std_error)

    report = MomentReport(
        theta=theta,
        phi_norm=_phi_norm(phi),
        horizons=tuple(float(t) for t in horizons),
        sup_mean=tuple(float(v) for v in sup_mean),
        sup_se=tuple(float(v) for v in sup_se),
        integral_mean=tuple(float(v) for v in int_mean),
        integral_se=tuple(float(v) for v in int_se),
        c_hat=full.value,
        c_hat_se=full.std_error,
        c_hat_by_horizon=tuple(float(v) for v in running),
        envelope_intercept=intercept,
        envelope_slope=slope,
        c_hat_sup=c_hat_sup,
        trajectories=len(valid),
        flagged_count=ensemble.flagged_count,
        stable_under_t=stable_t,
        stable_under_m=stable_m,
    )
    if not report.reliable:
        logger.warning(
            f"Moment report unreliable: {100 * report.flagged_fraction:.2f}% flagged trajectories"
        )
    logger.info(f"Moment bound envelope C={report.c_hat:.4g} +/- {report.c_hat_se:.2g}")
    return report


def gradient_constant(c_hat: float, theta: float, lambda_1: float = FOUR_PI_SQ) -> float:
    """C' with E int_0^t ||grad u||^theta <= C'(1 + ||phi||^theta + t).

    Splitting on ||grad u||^2 >= lambda_1 and using Poincare there gives
    ||grad u||^theta <= (2/lambda_1)^(1-theta/2) w + lambda_1^(theta/2), w the
    weighted integrand of the moment bound, hence
    C' = (2/lambda_1)^(1-theta/2) C + lambda_1^(theta/2).
    """
    return (2.0 / lambda_1) ** (1.0 - theta / 2.0) * c_hat + lambda_1 ** (theta / 2.0)


@dataclass(frozen=True)
class GradientMomentReport:
    """E int_0^t ||grad u_s||^theta ds per horizon with its implied bound."""
    theta: float
    phi_norm: float
    horizons: tuple[float, ...]
    mean: tuple[float, ...]
    std_error: tuple[float, ...]
    constant: float
    intercept: float
    slope: float
    affine: Optional[bool]

    @property
    def bounds(self) -> tuple[float, ...]:
        return tuple(self.constant * (1.0 + self.phi_norm ** self.theta + t) for t in self.horizons)

    @property
    def within_bound(self) -> bool:
        return all(m <= b for m, b in zip(self.mean, self.bounds))

    def rows(self) -> list[dict]:
        return [
            {"t": t, "gradient_term": m, "gradient_se": se, "bound": b}
            for t, m, se, b in zip(self.horizons, self.mean, self.std_error, self.bounds)
        ]

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "constant": self.constant,
            "intercept": self.intercept,
            "slope": self.slope,
            "affine": self.affine,
            "within_bound": self.within_bound,
            "rows": self.rows(),
        }


def gradient_moment_report(
    ensemble: EnsembleResult,
    theta: float,
    phi: Union[SpectralField, float] = 0.0,
    c_hat: Optional[float] = None,
    affine_from: float = 0.0,
) -> GradientMomentReport:
    """Gradient-moment corollary of the bound.

    ``affine`` checks that horizons t >= affine_from sit on a line within
    2x their Monte Carlo error (None with fewer than three such horizons).
    """
    valid = ensemble.valid()
    if not valid:
        raise ValueError("Every trajectory of the ensemble blew up")
    horizons = np.asarray(ensemble.horizons, dtype=float)
    values = np.array([s.gradient_integral for s in valid])
    mean, se = _mean_se(values)
    if c_hat is None:
        c_hat = moment_bound_report(ensemble, theta, phi).c_hat
    intercept, slope = _affine_fit(horizons, mean)

    affine: Optional[bool] = None
    late = horizons >= affine_from
    if late.sum() >= 3:
        b0, b1 = _affine_fit(horizons[late], mean[late])
        residual = np.abs(mean[late] - (b0 + b1 * horizons[late]))
        affine = bool(np.all(residual <= 2.0 * se[late]))

    return GradientMomentReport(
        theta=theta,
        phi_norm=_phi_norm(phi),
        horizons=tuple(float(t) for t in horizons),
        mean=tuple(float(v) for v in mean),
        std_error=tuple(float(v) for v in se),
        constant=gradient_constant(c_hat, theta),
        intercept=intercept,
        slope=slope,
        affine=affine,
    )


def closed_form_single_mode_gradient(amplitude: float, eigenvalue: float, theta: float) -> float:
    """int_0^inf ||grad u||^theta for a freely decaying single mode: lambda^(theta/2)|a|^theta/(theta lambda)."""
    return eigenvalue ** (theta / 2.0) * abs(amplitude) ** theta / (theta * eigenvalue)


def horizon_sequence(values: Sequence[float]) -> tuple[float, ...]:
    """Validated strictly increasing positive horizons."""
    out = tuple(float(v) for v in values)
    if not out or any(v < 0 for v in out) or any(b <= a for a, b in zip(out, out[1:])):
        raise ValueError(f"Horizons must be nonnegative and strictly increasing, got {list(values)}")
    return out
