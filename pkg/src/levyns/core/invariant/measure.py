"""Krylov-Bogoliubov empirical measures over observable marginals.

Samples are taken from every trajectory at t = burn_in + i * stride and pooled
over trajectories; the time-and-ensemble average of delta_{Phi(u_s)} is then
summarised per observable by a fixed-edge histogram.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from levyns.core.constants import (
    AUTOCORRELATION_TARGET,
    HISTOGRAM_BINS,
    HISTOGRAM_UPPER_QUANTILE,
    MIN_EFFECTIVE_SAMPLES,
    MIN_STRIDE_STEPS,
)
from levyns.core.errors import BlowUpError
from levyns.core.invariant.observables import BaseObservable, L2NormObservable
from levyns.core.solver.config import SolverConfig
from levyns.core.solver.ensemble import TrajectoryTask, run_ensemble
from levyns.core.solver.simulate import check_hypothesis, run_trajectory
from levyns.core.spectral.basis import Basis

logger = logging.getLogger(__name__)


class SamplingObserver:
    """Evaluates each observable at the chosen steps of one trajectory."""

    def __init__(
        self, observables: Sequence[BaseObservable], basis: Basis, theta: float, steps: Sequence[int]
    ) -> None:
        self.observables = list(observables)
        self.basis = basis
        self.theta = theta
        self._slot = {k: i for i, k in enumerate(steps)}
        self.values = np.full((len(self.observables), len(steps)), np.nan)

    def observe(self, step, time, coefficients, nonlinear, jumps) -> None:
        slot = self._slot.get(step)
        if slot is None:
            return
        for i, observable in enumerate(self.observables):
            self.values[i, slot] = observable.evaluate(coefficients, self.basis, self.theta)


class SamplingTask(TrajectoryTask[Optional[np.ndarray]]):
    """Observable samples (observables, steps) of one trajectory; None on blow-up."""

    def __init__(
        self, config: SolverConfig, observables: Sequence[BaseObservable], steps: Sequence[int]
    ) -> None:
        super().__init__(replace(config, snapshot_stride=max(1, config.n_steps)))
        self.observables = tuple(observables)
        self.steps = tuple(steps)

    def run(self, trajectory: int) -> Optional[np.ndarray]:
        observer = SamplingObserver(self.observables, self.config.basis, self.config.theta, self.steps)
        run_trajectory(self.config, trajectory, observers=(observer,))
        return observer.values

    def flagged(self, trajectory: int, error: BlowUpError) -> Optional[np.ndarray]:
        return None


@dataclass(frozen=True)
class HistogramEdges:
    """Fixed bin edges; signed observables also get an underflow bin."""
    edges: np.ndarray
    signed: bool = False

    @classmethod
    def from_samples(cls, samples: np.ndarray, signed: bool = False, bins: int = HISTOGRAM_BINS) -> "HistogramEdges":
        samples = np.asarray(samples, dtype=float)
        samples = samples[np.isfinite(samples)]
        if samples.size == 0:
            return cls(np.linspace(0.0, 1.0, bins + 1), signed)
        upper = float(np.quantile(samples, HISTOGRAM_UPPER_QUANTILE))
        lower = float(np.quantile(samples, 1.0 - HISTOGRAM_UPPER_QUANTILE)) if signed else 0.0
        if upper <= lower:
            # point mass: a narrow window around it keeps all mass in range
            upper = lower + max(1.0, abs(lower)) * 1e-9
            if signed:
                lower -= max(1.0, abs(lower)) * 1e-9
        return cls(np.linspace(lower, upper, bins + 1), signed)


@dataclass(frozen=True)
class Histogram:
    """Normalized masses: bins plus underflow and overflow sum to one."""
    observable: str
    edges: np.ndarray
    mass: np.ndarray
    underflow: float
    overflow: float
    count: int

    @classmethod
    def build(cls, observable: str, samples: np.ndarray, edges: HistogramEdges) -> "Histogram":
        samples = np.asarray(samples, dtype=float)
        e = edges.edges
        counts, _ = np.histogram(samples, bins=e)
        below = int(np.count_nonzero(samples < e[0]))
        above = int(np.count_nonzero(samples > e[-1]))
        total = samples.size
        if total == 0:
            return cls(observable, e, np.zeros(e.size - 1), 0.0, 0.0, 0)
        return cls(observable, e, counts / total, below / total, above / total, total)

    @property
    def total(self) -> float:
        return float(self.mass.sum() + self.underflow + self.overflow)

    def rows(self, window: str = "") -> list[dict]:
        rows = []
        if self.underflow > 0.0:
            rows.append(
                {"observable": self.observable, "bin_lo": -math.inf, "bin_hi": float(self.edges[0]),
                 "mass": self.underflow, "window": window}
            )
        for lo, hi, m in zip(self.edges[:-1], self.edges[1:], self.mass):
            rows.append(
                {"observable": self.observable, "bin_lo": float(lo), "bin_hi": float(hi),
                 "mass": float(m), "window": window}
            )
        rows.append(
            {"observable": self.observable, "bin_lo": float(self.edges[-1]), "bin_hi": math.inf,
             "mass": self.overflow, "window": window}
        )
        return rows


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Observable samples shaped (trajectories, observables, sampling times)."""
    observables: tuple[str, ...]
    values: np.ndarray
    times: np.ndarray
    burn_in: float
    stride_steps: int
    dt: float
    flagged_count: int
    edges: dict[str, HistogramEdges] = field(default_factory=dict)
    adaptive_stride: bool = False
    label: str = ""

    @property
    def trajectories(self) -> int:
        return int(self.values.shape[0])

    @property
    def sample_count(self) -> int:
        return int(self.values.shape[0] * self.values.shape[2])

    @property
    def underpowered(self) -> bool:
        return self.sample_count < MIN_EFFECTIVE_SAMPLES

    @property
    def window_label(self) -> str:
        if self.label:
            return self.label
        if self.times.size == 0:
            return ""
        return f"{self.times[0]:g}:{self.times[-1]:g}"

    def _index(self, observable: str) -> int:
        try:
            return self.observables.index(observable)
        except ValueError:
            raise KeyError(f"Observable {observable!r} not sampled") from None

    def samples(self, observable: str) -> np.ndarray:
        """Pooled samples, trajectory-major."""
        return self.values[:, self._index(observable), :].ravel()

    def per_trajectory(self, observable: str) -> np.ndarray:
        return self.values[:, self._index(observable), :]

    def mean(self, observable: str) -> float:
        return float(self.samples(observable).mean()) if self.sample_count else math.nan

    def std_error(self, observable: str) -> float:
        """MC error of the mean from the spread of per-trajectory time averages."""
        averages = self.per_trajectory(observable).mean(axis=1)
        if averages.size < 2:
            return math.inf
        return float(averages.std(ddof=1) / math.sqrt(averages.size))

    def histogram(self, observable: str) -> Histogram:
        edges = self.edges.get(observable)
        if edges is None:
            edges = HistogramEdges.from_samples(self.samples(observable))
        return Histogram.build(observable, self.samples(observable), edges)

    def histograms(self) -> list[Histogram]:
        return [self.histogram(name) for name in self.observables]

    def window(self, start: float, end: float) -> "EmpiricalMeasure":
        """Samples with start <= t < end, keeping the bin edges."""
        if not start < end:
            raise ValueError(f"Window needs start < end, got [{start}, {end})")
        tol = 1e-9 * self.dt
        keep = (self.times >= start - tol) & (self.times < end - tol)
        return replace(
            self, values=self.values[:, :, keep], times=self.times[keep], label=f"{start:g}:{end:g}"
        )

    def rows(self) -> list[dict]:
        label = self.window_label
        return [row for h in self.histograms() for row in h.rows(label)]

    def to_dict(self) -> dict:
        return {
            "observables": list(self.observables),
            "burn_in": self.burn_in,
            "stride_steps": self.stride_steps,
            "adaptive_stride": self.adaptive_stride,
            "trajectories": self.trajectories,
            "sample_count": self.sample_count,
            "flagged_count": self.flagged_count,
            "underpowered": self.underpowered,
            "means": {name: self.mean(name) for name in self.observables},
        }


def lag_autocorrelation(series: np.ndarray, lag: int) -> float:
    x = np.asarray(series, dtype=float)
    x = x - x.mean()
    denom = float(np.dot(x, x))
    if lag >= x.size or denom == 0.0:
        return 0.0
    return float(np.dot(x[:-lag], x[lag:]) / denom)


def adaptive_stride(series: np.ndarray, target: float = AUTOCORRELATION_TARGET, floor: int = MIN_STRIDE_STEPS) -> int:
    """Smallest lag >= floor at which the autocorrelation drops below ``target``.

    A heuristic: no mixing rate is known, so the lag is read off one pilot path.
    Searches up to a tenth of the series, which still leaves ten samples per path.
    """
    series = np.asarray(series, dtype=float)
    limit = max(floor, series.size // 10)
    for lag in range(floor, limit + 1):
        if lag_autocorrelation(series, lag) < target:
            return lag
    logger.warning(f"Autocorrelation stays above {target:g} up to lag {limit}; using stride {limit}")
    return limit


def burn_in_step(config: SolverConfig, burn_in: float) -> int:
    if not 0.0 <= burn_in < config.horizon:
        raise ValueError(f"burn_in must lie in [0, T={config.horizon}), got {burn_in}")
    return int(math.ceil(burn_in / config.dt - 1e-9))


def pilot_path(
    config: SolverConfig, observables: Sequence[BaseObservable], trajectories: int = 1
) -> tuple[Optional[np.ndarray], int]:
    """Every observable at every step of the first trajectory that stays finite.

    Returns the (observables, K + 1) path and its trajectory index, or None
    and ``trajectories`` when every candidate blew up.
    """
    task = SamplingTask(config, observables, range(config.n_steps + 1))
    for trajectory in range(trajectories):
        path = task(trajectory)
        if path is not None:
            return path, trajectory
        logger.warning(f"Pilot trajectory {trajectory} blew up; trying the next one")
    return None, trajectories


def kb_estimate(
    config: SolverConfig,
    observables: Sequence[BaseObservable],
    trajectories: int,
    burn_in: Optional[float] = None,
    stride: Optional[int] = None,
    workers: Optional[int] = 1,
) -> EmpiricalMeasure:
    """Time-and-ensemble averaged empirical measure of each observable.

    ``burn_in`` defaults to T/2 and ``stride`` (in steps) to the adaptive
    choice on the l2 norm of a pilot path. Bin edges come from that pilot,
    which covers the whole horizon.
    """
    check_hypothesis(config)
    if not observables:
        raise ValueError("No observables given")
    for observable in observables:
        observable.check(config.basis)
    burn_in = config.horizon / 2.0 if burn_in is None else float(burn_in)
    first = burn_in_step(config, burn_in)
    if stride is not None and stride < 1:
        raise ValueError(f"stride must be at least 1 step, got {stride}")

    names = [o.name for o in observables]
    tracked = list(observables) if "l2" in names else [*observables, L2NormObservable()]
    pilot, _ = pilot_path(config, tracked, trajectories)
    adaptive = stride is None
    if pilot is None:
        # the pilot tried every index, so the whole ensemble blew up
        stride = MIN_STRIDE_STEPS if adaptive else stride
        steps = list(range(first, config.n_steps + 1, stride))
        logger.error(f"All {trajectories} trajectories blew up; the empirical measure is empty")
        return EmpiricalMeasure(
            observables=tuple(o.name for o in observables),
            values=np.zeros((0, len(observables), len(steps))),
            times=np.array(steps, dtype=float) * config.dt,
            burn_in=burn_in,
            stride_steps=int(stride),
            dt=config.dt,
            flagged_count=trajectories,
            edges={o.name: HistogramEdges.from_samples(np.empty(0), o.signed) for o in observables},
            adaptive_stride=adaptive,
        )
    if adaptive:
        stride = adaptive_stride(pilot[[o.name for o in tracked].index("l2")][first:])
    edges = {o.name: HistogramEdges.from_samples(pilot[i], o.signed) for i, o in enumerate(observables)}

    steps = list(range(first, config.n_steps + 1, stride))
    logger.info(
        f"Sampling {len(observables)} observables at {len(steps)} times per trajectory "
        f"(burn-in {burn_in:g}, stride {stride} steps{', adaptive' if adaptive else ''})"
    )
    results = run_ensemble(SamplingTask(config, observables, steps), trajectories, workers)
    kept = [r for r in results if r is not None]
    flagged = len(results) - len(kept)
    if flagged:
        logger.warning(f"{flagged} of {len(results)} trajectories blew up and were excluded")
    values = np.array(kept) if kept else np.zeros((0, len(observables), len(steps)))
    measure = EmpiricalMeasure(
        observables=tuple(o.name for o in observables),
        values=values,
        times=np.array(steps, dtype=float) * config.dt,
        burn_in=burn_in,
        stride_steps=int(stride),
        dt=config.dt,
        flagged_count=flagged,
        edges=edges,
        adaptive_stride=adaptive,
    )
    if measure.underpowered:
        logger.warning(f"Only {measure.sample_count} samples (< {MIN_EFFECTIVE_SAMPLES}); estimate underpowered")
    return measure


def kb_windows(
    config: SolverConfig,
    observables: Sequence[BaseObservable],
    windows: Sequence[tuple[float, float]],
    trajectories: int,
    stride: Optional[int] = None,
    workers: Optional[int] = 1,
) -> list[EmpiricalMeasure]:
    """Empirical measures over several time windows of one ensemble."""
    if not windows:
        raise ValueError("No windows given")
    start = min(w[0] for w in windows)
    measure = kb_estimate(config, observables, trajectories, burn_in=start, stride=stride, workers=workers)
    return [measure.window(a, b) for a, b in windows]
