"""Trajectory records produced by the solver."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from levyns.core.spectral.basis import Basis, build_basis
from levyns.core.spectral.field import SpectralField


@dataclass
class TrajectoryRecord:
    """Discrete path of u^n_t: per-step scalars plus snapshots every stride steps.

    Step k sits at ``times[k] = k dt``; ``big_jumps[k]`` counts logged jumps with
    |y| > 1 that landed at that time (always 0 at k = 0). A blown-up trajectory
    keeps the steps reached before the nonfinite state.
    """
    n: int
    dt: float
    theta: float
    times: np.ndarray
    l2_norm: np.ndarray
    h1_norm: np.ndarray
    f_theta: np.ndarray
    big_jumps: np.ndarray
    snapshot_steps: np.ndarray
    snapshots: np.ndarray
    big_jump_log: list[tuple[int, int, float]] = field(default_factory=list)
    tracks_big_jumps: bool = False
    trajectory: int = 0
    blowup_step: Optional[int] = None

    @property
    def basis(self) -> Basis:
        return build_basis(self.n)

    @property
    def n_steps(self) -> int:
        return int(self.times.shape[0]) - 1

    @property
    def flagged(self) -> bool:
        return self.blowup_step is not None

    @property
    def snapshot_times(self) -> np.ndarray:
        return self.times[self.snapshot_steps]

    def field_at(self, i: int) -> SpectralField:
        """i-th recorded snapshot as a field."""
        return SpectralField(self.basis, self.snapshots[i])

    @property
    def fields(self) -> list[SpectralField]:
        return [self.field_at(i) for i in range(len(self.snapshot_steps))]

    def iter_snapshots(self) -> Iterator[tuple[int, float, SpectralField]]:
        for i, k in enumerate(self.snapshot_steps):
            yield int(k), float(self.times[k]), self.field_at(i)

    @property
    def big_jump_count(self) -> Optional[int]:
        """Total logged big jumps; None when the backend cannot see individual jumps."""
        if not self.tracks_big_jumps:
            return None
        return int(self.big_jumps.sum())

    def rows(self) -> Iterator[dict]:
        """Rows of trajectory.csv: t, l2_norm, h1_norm, f_theta, big_jumps."""
        for k in range(self.times.shape[0]):
            yield {
                "t": float(self.times[k]),
                "l2_norm": float(self.l2_norm[k]),
                "h1_norm": float(self.h1_norm[k]),
                "f_theta": float(self.f_theta[k]),
                "big_jumps": int(self.big_jumps[k]) if self.tracks_big_jumps else "",
            }
