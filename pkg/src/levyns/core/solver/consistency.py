"""Galerkin consistency: sizes n and 2n driven by the same noise."""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from levyns.core.solver.config import SolverConfig
from levyns.core.solver.records import TrajectoryRecord
from levyns.core.solver.simulate import check_hypothesis, noise_path_for, run_trajectory
from levyns.core.spectral.basis import build_basis
from levyns.core.spectral.field import embed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GalerkinConsistencyReport:
    """Gap between the size-n and size-2n solutions on the first m modes."""
    n: int
    m: int
    max_gap: float
    final_gap: float
    skorohod_bound: float
    coarse: TrajectoryRecord
    fine: TrajectoryRecord

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "fine_n": 2 * self.n,
            "m": self.m,
            "max_gap": self.max_gap,
            "final_gap": self.final_gap,
            "skorohod_bound": self.skorohod_bound,
        }


def galerkin_consistency(
    config: SolverConfig, m: Optional[int] = None, trajectory: int = 0
) -> GalerkinConsistencyReport:
    """Run n and 2n on one noise realization and compare the first m coefficients.

    Mode j draws from the same stream at both sizes, and phi is realised at
    size n and zero-padded, so the two runs differ only through the truncation.
    Reported, not asserted: no convergence rate is implied.
    """
    from levyns.core.diagnostics.paths import skorohod_upper_bound

    check_hypothesis(config)
    m = config.n if m is None else m
    if not 1 <= m <= config.n:
        raise ValueError(f"m must lie in 1..{config.n}, got {m}")

    coarse_cfg = replace(config, snapshot_stride=1)
    phi = coarse_cfg.initial_field()
    fine_cfg = replace(coarse_cfg, n=2 * config.n, initial=embed(phi, build_basis(2 * config.n)))

    coarse = run_trajectory(coarse_cfg, trajectory, noise=noise_path_for(coarse_cfg, trajectory))
    fine = run_trajectory(fine_cfg, trajectory, noise=noise_path_for(fine_cfg, trajectory))

    gaps = np.abs(coarse.snapshots[:, :m] - fine.snapshots[:, :m]).max(axis=1)
    report = GalerkinConsistencyReport(
        n=config.n,
        m=m,
        max_gap=float(gaps.max()),
        final_gap=float(gaps[-1]),
        skorohod_bound=skorohod_upper_bound(coarse, fine),
        coarse=coarse,
        fine=fine,
    )
    logger.info(
        f"Galerkin consistency n={config.n} vs {2 * config.n}: max gap on first {m} modes "
        f"{report.max_gap:.3e}, Skorohod bound {report.skorohod_bound:.3e}"
    )
    return report
