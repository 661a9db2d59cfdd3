"""Statistical checks on sampled Levy increments."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import special, stats

from levyns.core.constants import (
    DEFAULT_SMALL_JUMP_CUTOFF,
    HILL_BIAS_TARGET,
    HILL_MAX_FRACTION,
    HILL_TOLERANCE,
    SIGMA_LEVEL,
    STATIONARITY_LEVEL,
)
from levyns.core.levy.coefficients import CoefficientSequence
from levyns.core.levy.measure import LevyMeasureSpec
from levyns.core.levy.noise import LevyNoiseSpec, NoiseBackend
from levyns.core.levy.sampling import CompoundPoissonSampler, sample_stable, unit_increments
from levyns.core.levy.symbol import levy_symbol

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmpiricalCF:
    """Empirical characteristic function value with its Monte Carlo standard error."""
    xi: float
    value: complex
    std_error: float

    @property
    def modulus(self) -> float:
        return abs(self.value)


def empirical_cf(samples: np.ndarray, xi: float) -> EmpiricalCF:
    """Mean of exp(i xi X); the standard error combines the cos and sin variances."""
    samples = np.asarray(samples, dtype=float)
    phase = xi * samples
    cos, sin = np.cos(phase), np.sin(phase)
    count = samples.size
    value = complex(cos.mean(), sin.mean())
    if count > 1:
        se = float(np.sqrt((cos.var(ddof=1) + sin.var(ddof=1)) / count))
    else:
        se = float("inf")
    return EmpiricalCF(xi=float(xi), value=value, std_error=se)


def z_score(empirical: complex, theoretical: complex, std_error: float) -> float:
    """|empirical - theoretical| in units of the standard error (0 when both agree exactly)."""
    gap = abs(empirical - theoretical)
    if gap == 0.0:
        return 0.0
    if std_error == 0.0:
        return float("inf")
    return gap / std_error


@dataclass(frozen=True)
class CFCheckPoint:
    xi: float
    empirical: complex
    theoretical: complex
    std_error: float
    z: float

    @property
    def passed(self) -> bool:
        return self.z < SIGMA_LEVEL

    def to_dict(self) -> dict:
        return {
            "xi": self.xi,
            "empirical_re": self.empirical.real,
            "empirical_im": self.empirical.imag,
            "theoretical_re": self.theoretical.real,
            "theoretical_im": self.theoretical.imag,
            "std_error": self.std_error,
            "z": self.z,
        }


@dataclass(frozen=True)
class IncrementCFReport:
    """Empirical CF of unit-coefficient increments against exp(dt psi(xi))."""
    dt: float
    n_draws: int
    points: tuple[CFCheckPoint, ...]

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.points)

    def to_dict(self) -> dict:
        return {
            "dt": self.dt,
            "n_draws": self.n_draws,
            "passed": self.passed,
            "points": [p.to_dict() for p in self.points],
        }


def compare_cf(samples: np.ndarray, xi_grid: Sequence[float], theoretical) -> tuple[CFCheckPoint, ...]:
    """Pointwise comparison of an empirical CF with ``theoretical(xi)``."""
    points = []
    for xi in xi_grid:
        emp = empirical_cf(samples, xi)
        theo = complex(theoretical(xi))
        points.append(CFCheckPoint(xi, emp.value, theo, emp.std_error, z_score(emp.value, theo, emp.std_error)))
    return tuple(points)


def increment_cf_check(
    spec: LevyNoiseSpec,
    dt: float,
    xi_grid: Sequence[float],
    n_draws: int,
    rng: np.random.Generator,
) -> IncrementCFReport:
    """Check L^(1)_{dt} against exp(dt psi(xi)) at every xi, 3 sigma per point."""
    if n_draws < 10_000:
        raise ValueError(f"n_draws must be at least 10^4, got {n_draws}")
    samples, _ = unit_increments(spec, dt, n_draws, rng)
    points = compare_cf(
        samples, xi_grid, lambda xi: np.exp(dt * levy_symbol(spec.measure, xi))
    )
    report = IncrementCFReport(dt=dt, n_draws=n_draws, points=points)
    logger.info(f"Increment CF check ({spec.backend.value}, dt={dt:g}): passed={report.passed}")
    return report


@dataclass(frozen=True)
class AgreementPoint:
    """Exact and levy-ito increment CFs at one xi.

    ``bias`` bounds the gap the dropped small jumps open between the two laws.
    """
    xi: float
    exact: complex
    levy_ito: complex
    std_error: float
    bias: float

    @property
    def gap(self) -> float:
        return abs(self.exact - self.levy_ito)

    @property
    def tolerance(self) -> float:
        return SIGMA_LEVEL * self.std_error + self.bias

    @property
    def passed(self) -> bool:
        return self.gap <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "xi": self.xi,
            "exact_re": self.exact.real,
            "exact_im": self.exact.imag,
            "levy_ito_re": self.levy_ito.real,
            "levy_ito_im": self.levy_ito.imag,
            "std_error": self.std_error,
            "bias": self.bias,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class BackendAgreementReport:
    dt: float
    cutoff: float
    n_draws: int
    points: tuple[AgreementPoint, ...]

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.points)


def backend_agreement_check(
    measure: LevyMeasureSpec,
    dt: float,
    xi_grid: Sequence[float],
    n_draws: int,
    rng: np.random.Generator,
    cutoff: float = DEFAULT_SMALL_JUMP_CUTOFF,
) -> BackendAgreementReport:
    """Compare exact and levy-ito increments of one scalar process over dt.

    The levy-ito CF exceeds exp(dt psi(xi)) by at most a factor 1 + cf_bias_factor,
    so each point passes within 3 sigma plus |exp(dt psi(xi))| cf_bias_factor.
    """
    betas = CoefficientSequence.from_values([1.0])
    theta = min(1.0, measure.alpha / 2.0)
    exact_spec = LevyNoiseSpec(measure, betas, theta, backend=NoiseBackend.EXACT)
    ito_spec = LevyNoiseSpec(
        measure, betas, theta, backend=NoiseBackend.LEVY_ITO, small_jump_cutoff=cutoff
    )
    sampler = CompoundPoissonSampler(measure, cutoff)
    exact, _ = unit_increments(exact_spec, dt, n_draws, rng)
    ito, _ = unit_increments(ito_spec, dt, n_draws, rng)
    points = []
    for xi in xi_grid:
        a, b = empirical_cf(exact, xi), empirical_cf(ito, xi)
        target = abs(np.exp(dt * levy_symbol(measure, xi)))
        points.append(
            AgreementPoint(
                xi=float(xi),
                exact=a.value,
                levy_ito=b.value,
                std_error=float(np.hypot(a.std_error, b.std_error)),
                bias=float(target * sampler.cf_bias_factor(dt, xi)),
            )
        )
    report = BackendAgreementReport(dt=dt, cutoff=cutoff, n_draws=n_draws, points=tuple(points))
    logger.info(f"Backend agreement (cutoff={cutoff:g}, dt={dt:g}): passed={report.passed}")
    return report


@dataclass(frozen=True)
class FractionalMomentReport:
    """The chain E||L_t||_0^theta <= E(sum beta_j |L^(j)_t|)^theta <= sum beta_j^theta E|L^(1)_t|^theta."""
    theta: float
    norm_moment: float
    sum_moment: float
    bound: float
    std_error: float

    @property
    def ordered(self) -> bool:
        slack = 3.0 * self.std_error
        return self.norm_moment <= self.sum_moment + slack and self.sum_moment <= self.bound + slack

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "norm_moment": self.norm_moment,
            "sum_moment": self.sum_moment,
            "bound": self.bound,
            "std_error": self.std_error,
            "ordered": self.ordered,
        }


def fractional_moment_check(
    spec: LevyNoiseSpec,
    n: int,
    t: float,
    n_draws: int,
    rng: np.random.Generator,
) -> FractionalMomentReport:
    """Monte Carlo estimate of the cylindrical noise's theta-moment chain."""
    theta = spec.theta
    betas = spec.betas.values(n)
    draws = np.empty((n_draws, n))
    for j in range(n):
        draws[:, j], _ = unit_increments(spec, t, n_draws, rng)
    scaled = np.abs(draws) * betas
    norm_moment = np.sqrt(np.sum(scaled ** 2, axis=1)) ** theta
    sum_moment = np.sum(scaled, axis=1) ** theta
    # unbiased for sum_j beta_j^theta E|L^(1)_t|^theta, and dominates sum_moment pathwise
    termwise = np.sum(scaled ** theta, axis=1)
    se = float(termwise.std(ddof=1) / np.sqrt(n_draws))
    return FractionalMomentReport(
        theta=theta,
        norm_moment=float(norm_moment.mean()),
        sum_moment=float(sum_moment.mean()),
        bound=float(termwise.mean()),
        std_error=se,
    )


def hill_estimator(samples: np.ndarray, k: int) -> float:
    """Hill estimate of the tail index from the k largest |X|."""
    magnitudes = np.sort(np.abs(np.asarray(samples, dtype=float)))
    if not 1 <= k < magnitudes.size:
        raise ValueError(f"k must lie in 1..{magnitudes.size - 1}, got {k}")
    top = magnitudes[-k:]
    threshold = magnitudes[-k - 1]
    return float(1.0 / np.mean(np.log(top / threshold)))


def stable_tail_coefficients(alpha: float) -> tuple[float, float]:
    """(A, B) in P(|X| > x) = A x^-alpha + B x^-2alpha + ... for the CF exp(-|xi|^alpha)."""
    a = 2.0 / np.pi * special.gamma(alpha) * np.sin(np.pi * alpha / 2.0)
    b = -special.gamma(2.0 * alpha) * np.sin(np.pi * alpha) / np.pi
    return float(a), float(b)


def hill_bias_slope(alpha: float) -> float:
    """b with E[hill_estimator(X, k)] ~ alpha (1 + b k/N) on N symmetric stable draws.

    Grows without bound as alpha -> 2, where the second-order tail term takes over.
    """
    a, b = stable_tail_coefficients(alpha)
    return b / (2.0 * a * a)


def hill_tail_count(
    alpha: float,
    n_draws: int,
    max_fraction: float = HILL_MAX_FRACTION,
    bias_target: float = HILL_BIAS_TARGET,
) -> int:
    """Order statistics used by the Hill check: at most max_fraction of the draws,
    fewer when the first-order bias alpha |b| k/N would exceed bias_target."""
    slope = abs(alpha * hill_bias_slope(alpha))
    fraction = max_fraction
    if slope * max_fraction > bias_target:
        fraction = bias_target / slope
    return int(min(n_draws - 1, max(10, fraction * n_draws)))


def moment_growth(samples: np.ndarray, theta: float, sizes: Sequence[int]) -> np.ndarray:
    """Empirical E|X|^theta over growing prefixes; stabilises iff theta < alpha."""
    powered = np.abs(np.asarray(samples, dtype=float)) ** theta
    return np.array([powered[:size].mean() for size in sizes])


@dataclass(frozen=True)
class KSResult:
    statistic: float
    p_value: float

    def passed(self, level: float) -> bool:
        return self.p_value >= level


def two_sample_ks(a: np.ndarray, b: np.ndarray) -> KSResult:
    result = stats.ks_2samp(np.asarray(a), np.asarray(b))
    return KSResult(statistic=float(result.statistic), p_value=float(result.pvalue))


@dataclass(frozen=True)
class SamplerCheck:
    check: str
    value: float
    expected: float
    std_error: Optional[float]
    passed: bool
    tolerance: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "value": self.value,
            "expected": self.expected,
            "std_error": self.std_error,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class SamplerTestReport:
    alpha: float
    n_draws: int
    checks: tuple[SamplerCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> SamplerCheck:
        for c in self.checks:
            if c.check == name:
                return c
        raise KeyError(name)

    def rows(self) -> list[dict]:
        return [c.to_dict() for c in self.checks]


def hill_check(draws: np.ndarray, alpha: float) -> SamplerCheck:
    """Hill tail index of unit stable draws against alpha.

    The band is max(HILL_TOLERANCE, 3 sigma) widened by the predicted first-order
    bias; near alpha = 2 the few usable order statistics make 3 sigma dominate.
    """
    n_draws = draws.size
    k = hill_tail_count(alpha, n_draws)
    hill = hill_estimator(draws, k)
    se = alpha / np.sqrt(k)
    bias = abs(alpha * hill_bias_slope(alpha)) * k / n_draws
    tolerance = max(HILL_TOLERANCE, SIGMA_LEVEL * se) + bias
    logger.debug(f"Hill check alpha={alpha:g}: k={k}, tolerance={tolerance:.4g}")
    return SamplerCheck("hill_alpha", hill, alpha, float(se), abs(hill - alpha) <= tolerance, float(tolerance))


def sampler_test(
    alpha: float,
    n_draws: int,
    rng: np.random.Generator,
    intensity: float = 1.0,
    ks_draws: int = 100_000,
    xi_grid: Sequence[float] = (0.5, 1.0, 2.0, 4.0),
    dt: float = 0.1,
    backend_draws: int = 0,
    small_jump_cutoff: float = DEFAULT_SMALL_JUMP_CUTOFF,
) -> SamplerTestReport:
    """Self-test of the stable sampler at unit scale.

    Runs the sign balance, the Hill tail index, the self-similarity KS test
    (a draw at scale m^(1/alpha) against sums of m unit draws) and the
    increment CF; the Cauchy median of |X| = 1 is added at alpha = 1.
    With ``backend_draws`` > 0 the levy-ito backend at ``small_jump_cutoff``
    is compared with the exact one as well.
    """
    draws = np.asarray(sample_stable(alpha, 1.0, rng, size=n_draws))
    checks = []

    if np.isclose(alpha, 1.0):
        # |X| is folded Cauchy; the sample median has sd 1/(2 f(1) sqrt(N)) with f(1) = 1/pi
        median = float(np.median(np.abs(draws)))
        se = np.pi / (2.0 * np.sqrt(n_draws))
        checks.append(SamplerCheck("cauchy_median_abs", median, 1.0, se, abs(median - 1.0) <= 0.01, 0.01))

    positive = float(np.mean(draws > 0.0))
    se = 0.5 / np.sqrt(n_draws)
    checks.append(SamplerCheck("positive_fraction", positive, 0.5, se, abs(positive - 0.5) <= 0.002, 0.002))

    checks.append(hill_check(draws, alpha))

    m = 4
    scaled = np.asarray(sample_stable(alpha, m ** (1.0 / alpha), rng, size=ks_draws))
    summed = np.asarray(sample_stable(alpha, 1.0, rng, size=(m, ks_draws))).sum(axis=0)
    ks = two_sample_ks(scaled, summed)
    checks.append(SamplerCheck("self_similarity_ks_p", ks.p_value, STATIONARITY_LEVEL, None, ks.passed(STATIONARITY_LEVEL)))

    measure = LevyMeasureSpec(alpha=alpha, intensity=intensity)
    spec = LevyNoiseSpec(
        measure=measure,
        betas=CoefficientSequence.from_values([1.0]),
        theta=min(1.0, alpha / 2.0),
    )
    cf = increment_cf_check(spec, dt, xi_grid, max(10_000, min(n_draws, 1_000_000)), rng)
    for point in cf.points:
        checks.append(
            SamplerCheck(
                f"increment_cf_re[xi={point.xi:g}]",
                point.empirical.real,
                point.theoretical.real,
                point.std_error,
                point.passed,
                SIGMA_LEVEL * point.std_error,
            )
        )

    if backend_draws > 0:
        agreement = backend_agreement_check(measure, dt, xi_grid, backend_draws, rng, cutoff=small_jump_cutoff)
        for p in agreement.points:
            checks.append(
                SamplerCheck(f"backend_gap[xi={p.xi:g}]", p.gap, 0.0, p.std_error, p.passed, p.tolerance)
            )

    report = SamplerTestReport(alpha, n_draws, tuple(checks))
    logger.info(f"Sampler test alpha={alpha:g}, {n_draws} draws: passed={report.passed}")
    return report
