"""Window stationarity of empirical measures.

Two time windows of the same ensemble are compared per observable with the
two-sample Kolmogorov-Smirnov distance. Samples inside one trajectory are
dependent, so the p-value comes from permutations that swap the two windows
of whole trajectories rather than from the KS asymptotics.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats

from levyns.core.constants import DEFAULT_PERMUTATIONS, STATIONARITY_LEVEL
from levyns.core.invariant.measure import EmpiricalMeasure
from levyns.core.levy.streams import StreamPurpose, make_stream

logger = logging.getLogger(__name__)

# below this many trajectories block swaps give too few distinct relabelings
MIN_BLOCK_TRAJECTORIES = 8


def ks_distance(a: np.ndarray, b: np.ndarray) -> float:
    if a.size == 0 or b.size == 0:
        return float("nan")
    return float(stats.ks_2samp(a, b, method="asymp").statistic)


@dataclass(frozen=True)
class WindowComparison:
    observable: str
    distance: float
    p_value: float
    permutations: int
    block_swaps: bool
    underpowered: bool

    @property
    def stationary(self) -> bool:
        return self.p_value >= STATIONARITY_LEVEL

    def to_dict(self) -> dict:
        return {
            "observable": self.observable,
            "distance": self.distance,
            "p_value": self.p_value,
            "permutations": self.permutations,
            "block_swaps": self.block_swaps,
            "underpowered": self.underpowered,
            "stationary": self.stationary,
        }


@dataclass(frozen=True)
class StationarityReport:
    first: str
    second: str
    comparisons: tuple[WindowComparison, ...]

    @property
    def stationary(self) -> bool:
        return all(c.stationary for c in self.comparisons)

    @property
    def underpowered(self) -> bool:
        return any(c.underpowered for c in self.comparisons)

    def rows(self) -> list[dict]:
        return [{"first": self.first, "second": self.second, **c.to_dict()} for c in self.comparisons]

    def to_dict(self) -> dict:
        return {
            "first": self.first,
            "second": self.second,
            "stationary": self.stationary,
            "underpowered": self.underpowered,
            "comparisons": [c.to_dict() for c in self.comparisons],
        }


def _permutation_p(
    a: np.ndarray,
    b: np.ndarray,
    observed: float,
    permutations: int,
    rng: np.random.Generator,
    blocks: bool,
) -> float:
    """a and b are (trajectories, samples) arrays of the two windows."""
    exceed = 0
    if blocks:
        for _ in range(permutations):
            swap = rng.random(a.shape[0]) < 0.5
            left = np.concatenate([b[swap].ravel(), a[~swap].ravel()])
            right = np.concatenate([a[swap].ravel(), b[~swap].ravel()])
            exceed += ks_distance(left, right) >= observed
    else:
        pooled = np.concatenate([a.ravel(), b.ravel()])
        split = a.size
        for _ in range(permutations):
            shuffled = rng.permutation(pooled)
            exceed += ks_distance(shuffled[:split], shuffled[split:]) >= observed
    return (1.0 + exceed) / (1.0 + permutations)


def _overlap(first: EmpiricalMeasure, second: EmpiricalMeasure) -> bool:
    if first.times.size == 0 or second.times.size == 0:
        return False
    return not (first.times[-1] < second.times[0] or second.times[-1] < first.times[0])


def window_stationarity_test(
    first: EmpiricalMeasure,
    second: EmpiricalMeasure,
    permutations: int = DEFAULT_PERMUTATIONS,
    seed: int = 0,
    observables: Optional[list[str]] = None,
) -> StationarityReport:
    """Per-observable KS distance with a permutation p-value; stationary at the 1% level."""
    identical = np.array_equal(first.times, second.times) and np.array_equal(first.values, second.values)
    if not identical and _overlap(first, second):
        raise ValueError(f"Windows {first.window_label} and {second.window_label} overlap")
    if first.trajectories != second.trajectories:
        raise ValueError("Windows must come from the same ensemble")
    names = observables if observables is not None else [o for o in first.observables if o in second.observables]
    blocks = first.trajectories >= MIN_BLOCK_TRAJECTORIES
    rng = make_stream(seed, StreamPurpose.PERMUTATION)

    comparisons = []
    for name in names:
        a, b = first.per_trajectory(name), second.per_trajectory(name)
        underpowered = first.underpowered or second.underpowered
        if identical:
            comparisons.append(WindowComparison(name, 0.0, 1.0, 0, blocks, underpowered))
            continue
        observed = ks_distance(a.ravel(), b.ravel())
        if np.isnan(observed):
            comparisons.append(WindowComparison(name, observed, float("nan"), 0, blocks, True))
            continue
        p = _permutation_p(a, b, observed, permutations, rng, blocks)
        comparisons.append(WindowComparison(name, observed, float(p), permutations, blocks, underpowered))

    report = StationarityReport(first.window_label, second.window_label, tuple(comparisons))
    if report.underpowered:
        logger.warning(f"Windows {report.first} / {report.second} are underpowered")
    logger.info(f"Window stationarity {report.first} vs {report.second}: stationary={report.stationary}")
    return report
