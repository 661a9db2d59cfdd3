"""Dependence of long-window empirical measures on the initial condition.

Uniqueness of the invariant measure is not known, so this only reports KS
distances between runs started from different phi, next to a baseline band:
the same phi rerun on the next master seed.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from levyns.core.invariant.measure import EmpiricalMeasure, kb_estimate
from levyns.core.invariant.observables import BaseObservable
from levyns.core.invariant.stationarity import ks_distance
from levyns.core.solver.config import SolverConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SensitivityEntry:
    first: int
    second: int
    observable: str
    distance: float
    baseline: bool = False

    def to_dict(self) -> dict:
        return {
            "first": self.first,
            "second": self.second,
            "observable": self.observable,
            "distance": self.distance,
            "baseline": self.baseline,
        }


@dataclass(frozen=True)
class SensitivityReport:
    """Pairwise distances between initial conditions; no verdict is attached."""
    window: tuple[float, float]
    initial: tuple[dict, ...]
    entries: tuple[SensitivityEntry, ...]

    def distances(self, observable: str, baseline: bool = False) -> list[float]:
        return [e.distance for e in self.entries if e.observable == observable and e.baseline == baseline]

    def baseline_band(self, observable: str) -> Optional[float]:
        values = self.distances(observable, baseline=True)
        return max(values) if values else None

    def rows(self) -> list[dict]:
        return [e.to_dict() for e in self.entries]

    def to_dict(self) -> dict:
        return {
            "window": list(self.window),
            "initial": list(self.initial),
            "entries": [e.to_dict() for e in self.entries],
        }


def _same_noise_policy(configs: Sequence[SolverConfig]) -> None:
    first = configs[0]
    for config in configs[1:]:
        if config.noise != first.noise or config.seed != first.seed:
            raise ValueError("Configs must share the noise spec and the master seed")
        if (config.n, config.dt, config.horizon, config.scheme) != (first.n, first.dt, first.horizon, first.scheme):
            raise ValueError("Configs may differ only in the initial condition")


def _window_measure(
    config: SolverConfig,
    observables: Sequence[BaseObservable],
    window: tuple[float, float],
    trajectories: int,
    stride: Optional[int],
    workers: Optional[int],
) -> EmpiricalMeasure:
    measure = kb_estimate(config, observables, trajectories, burn_in=window[0], stride=stride, workers=workers)
    return measure.window(*window)


def initial_condition_sensitivity(
    configs: Sequence[SolverConfig],
    observables: Sequence[BaseObservable],
    window: tuple[float, float],
    trajectories: int,
    stride: Optional[int] = None,
    workers: Optional[int] = 1,
    baseline: bool = True,
) -> SensitivityReport:
    """KS distances between the window measures of every pair of configs.

    With ``baseline`` the first config is rerun on seed + 1, which sets the
    Monte Carlo band the other distances should be read against.
    """
    if len(configs) < 1:
        raise ValueError("Need at least one config")
    _same_noise_policy(configs)
    names = [o.name for o in observables]
    measures = [_window_measure(c, observables, window, trajectories, stride, workers) for c in configs]

    entries = []
    for i in range(len(measures)):
        for k in range(i + 1, len(measures)):
            for name in names:
                entries.append(
                    SensitivityEntry(i, k, name, ks_distance(measures[i].samples(name), measures[k].samples(name)))
                )
    if baseline:
        reseeded = replace(configs[0], seed=configs[0].seed + 1)
        rerun = _window_measure(reseeded, observables, window, trajectories, stride, workers)
        for name in names:
            entries.append(
                SensitivityEntry(0, 0, name, ks_distance(measures[0].samples(name), rerun.samples(name)), baseline=True)
            )
    report = SensitivityReport(
        window=(float(window[0]), float(window[1])),
        initial=tuple(c.to_dict()["initial"] for c in configs),
        entries=tuple(entries),
    )
    logger.info(f"Initial-condition sensitivity over {len(configs)} configs, window {window[0]:g}:{window[1]:g}")
    return report
