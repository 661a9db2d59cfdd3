"""Monte Carlo ensembles over independent trajectories.

Tasks are picklable callables ``task(trajectory) -> result`` so they can be
shipped to worker processes; results always come back in trajectory order.
"""
from __future__ import annotations

import logging
import os
from abc import ABC, abstractmethod
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Generic, Optional, Sequence, TypeVar

import numpy as np

from levyns.core.constants import FLAGGED_FRACTION_LIMIT
from levyns.core.errors import BlowUpError
from levyns.core.solver.config import SolverConfig
from levyns.core.solver.simulate import check_hypothesis, run_trajectory

logger = logging.getLogger(__name__)

R = TypeVar("R")


class TrajectoryTask(ABC, Generic[R]):
    """Work done for one trajectory index inside an ensemble."""

    def __init__(self, config: SolverConfig) -> None:
        self.config = config

    @abstractmethod
    def run(self, trajectory: int) -> R:
        """Simulate and reduce one trajectory; may raise BlowUpError."""

    @abstractmethod
    def flagged(self, trajectory: int, error: BlowUpError) -> R:
        """Result standing in for a blown-up trajectory."""

    def __call__(self, trajectory: int) -> R:
        try:
            return self.run(trajectory)
        except BlowUpError as e:
            return self.flagged(trajectory, e)


def default_workers() -> int:
    return os.cpu_count() or 1


def run_ensemble(task: TrajectoryTask[R], trajectories: int, workers: Optional[int] = 1) -> list[R]:
    """Map ``task`` over trajectory indices 0..M-1, ordered by index.

    ``workers=1`` runs in-process; ``None`` uses every available CPU.
    """
    if trajectories < 1:
        raise ValueError(f"Need at least one trajectory, got {trajectories}")
    workers = default_workers() if workers is None else max(1, int(workers))
    indices = range(trajectories)
    if workers == 1 or trajectories == 1:
        return [task(i) for i in indices]
    chunksize = max(1, trajectories // (4 * workers))
    logger.info(f"Running {trajectories} trajectories on {workers} worker processes")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(task, indices, chunksize=chunksize))


class SummaryObserver:
    """Folds the per-step scalars of one trajectory into horizon statistics.

    For every horizon t_k it keeps sup_{s<=t} ||u_s||^theta and the trapezoidal
    integrals of ||grad u||^2/(||u||^2+1)^(1-theta/2) and of ||grad u||^theta.
    """

    def __init__(
        self, eigenvalues: np.ndarray, theta: float, dt: float, horizon_steps: Sequence[int]
    ) -> None:
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        self.theta = theta
        self.dt = dt
        self.horizon_steps = list(horizon_steps)
        self._slot = {k: i for i, k in enumerate(self.horizon_steps)}
        size = len(self.horizon_steps)
        self.sup_theta = np.full(size, np.nan)
        self.weighted_integral = np.full(size, np.nan)
        self.gradient_integral = np.full(size, np.nan)
        self._sup = 0.0
        self._weighted = 0.0
        self._gradient = 0.0
        self._last: Optional[tuple[float, float]] = None

    def observe(self, step, time, coefficients, nonlinear, jumps) -> None:
        l2_sq = float(np.dot(coefficients, coefficients))
        h1_sq = float(np.dot(self.eigenvalues * coefficients, coefficients))
        weighted = h1_sq / (l2_sq + 1.0) ** (1.0 - self.theta / 2.0)
        gradient = h1_sq ** (self.theta / 2.0)
        self._sup = max(self._sup, l2_sq ** (self.theta / 2.0))
        if self._last is not None:
            self._weighted += 0.5 * self.dt * (self._last[0] + weighted)
            self._gradient += 0.5 * self.dt * (self._last[1] + gradient)
        self._last = (weighted, gradient)
        slot = self._slot.get(step)
        if slot is not None:
            self.sup_theta[slot] = self._sup
            self.weighted_integral[slot] = self._weighted
            self.gradient_integral[slot] = self._gradient


@dataclass(frozen=True)
class TrajectorySummary:
    """Per-trajectory statistics at each horizon t_k."""
    trajectory: int
    horizons: tuple[float, ...]
    sup_theta: tuple[float, ...]
    weighted_integral: tuple[float, ...]
    gradient_integral: tuple[float, ...]
    big_jump_count: Optional[int] = None
    blowup_step: Optional[int] = None

    @property
    def flagged(self) -> bool:
        return self.blowup_step is not None

    def to_dict(self) -> dict:
        return {
            "trajectory": self.trajectory,
            "horizons": list(self.horizons),
            "sup_theta": list(self.sup_theta),
            "weighted_integral": list(self.weighted_integral),
            "gradient_integral": list(self.gradient_integral),
            "big_jump_count": self.big_jump_count,
            "flagged": self.flagged,
            "blowup_step": self.blowup_step,
        }


def horizon_steps(config: SolverConfig, horizons: Optional[Sequence[float]]) -> list[int]:
    if horizons is None:
        return [config.n_steps]
    steps = [config.step_of(t) for t in horizons]
    if steps != sorted(steps) or len(set(steps)) != len(steps):
        raise ValueError(f"Horizons must be strictly increasing, got {list(horizons)}")
    return steps


class SummaryTask(TrajectoryTask[TrajectorySummary]):
    """Simulates one trajectory keeping only the horizon summary."""

    def __init__(self, config: SolverConfig, horizons: Optional[Sequence[float]] = None) -> None:
        super().__init__(config)
        # only the horizon statistics are kept, so skip intermediate snapshots
        self.config = replace(config, snapshot_stride=max(1, config.n_steps))
        self.steps = horizon_steps(config, horizons)
        self.horizons = tuple(k * config.dt for k in self.steps)

    def _observer(self) -> SummaryObserver:
        config = self.config
        return SummaryObserver(config.basis.eigenvalues, config.theta, config.dt, self.steps)

    def run(self, trajectory: int) -> TrajectorySummary:
        observer = self._observer()
        record = run_trajectory(self.config, trajectory, observers=(observer,))
        return TrajectorySummary(
            trajectory=trajectory,
            horizons=self.horizons,
            sup_theta=tuple(float(v) for v in observer.sup_theta),
            weighted_integral=tuple(float(v) for v in observer.weighted_integral),
            gradient_integral=tuple(float(v) for v in observer.gradient_integral),
            big_jump_count=record.big_jump_count,
        )

    def flagged(self, trajectory: int, error: BlowUpError) -> TrajectorySummary:
        nan = tuple(float("nan") for _ in self.horizons)
        return TrajectorySummary(
            trajectory=trajectory,
            horizons=self.horizons,
            sup_theta=nan,
            weighted_integral=nan,
            gradient_integral=nan,
            big_jump_count=None,
            blowup_step=error.step,
        )


@dataclass(frozen=True)
class EnsembleResult:
    """Ordered trajectory summaries of one ensemble run."""
    summaries: tuple[TrajectorySummary, ...]
    horizons: tuple[float, ...]
    theta: float
    seed: int = 0

    @property
    def size(self) -> int:
        return len(self.summaries)

    @property
    def flagged_count(self) -> int:
        return sum(1 for s in self.summaries if s.flagged)

    @property
    def flagged_fraction(self) -> float:
        return self.flagged_count / self.size if self.summaries else 0.0

    @property
    def blowup_dominated(self) -> bool:
        return self.flagged_fraction > FLAGGED_FRACTION_LIMIT

    def valid(self) -> list[TrajectorySummary]:
        return [s for s in self.summaries if not s.flagged]

    def head(self, count: int) -> "EnsembleResult":
        """The first ``count`` trajectories (used for doubling-M comparisons)."""
        return EnsembleResult(self.summaries[:count], self.horizons, self.theta, self.seed)

    def up_to(self, horizon_count: int) -> "EnsembleResult":
        """The same trajectories restricted to the first ``horizon_count`` horizons."""
        cut = [
            TrajectorySummary(
                trajectory=s.trajectory,
                horizons=s.horizons[:horizon_count],
                sup_theta=s.sup_theta[:horizon_count],
                weighted_integral=s.weighted_integral[:horizon_count],
                gradient_integral=s.gradient_integral[:horizon_count],
                big_jump_count=s.big_jump_count,
                blowup_step=s.blowup_step,
            )
            for s in self.summaries
        ]
        return EnsembleResult(tuple(cut), self.horizons[:horizon_count], self.theta, self.seed)


def simulate_ensemble(
    config: SolverConfig,
    trajectories: int,
    workers: Optional[int] = 1,
    horizons: Optional[Sequence[float]] = None,
) -> EnsembleResult:
    """M independent trajectories on disjoint streams, summarised per horizon.

    Blown-up trajectories stay in the result as flagged summaries.
    """
    check_hypothesis(config)
    task = SummaryTask(config, horizons)
    summaries = run_ensemble(task, trajectories, workers)
    result = EnsembleResult(tuple(summaries), task.horizons, config.theta, config.seed)
    if result.flagged_count:
        logger.warning(
            f"{result.flagged_count} of {result.size} trajectories blew up "
            f"({100 * result.flagged_fraction:.2f}%)"
        )
    logger.info(f"Ensemble of {result.size} trajectories finished")
    return result
