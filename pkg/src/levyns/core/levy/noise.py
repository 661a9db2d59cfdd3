"""Cylindrical noise specification and the summability functional H_theta."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

from levyns.core.constants import DEFAULT_SMALL_JUMP_CUTOFF
from levyns.core.levy.coefficients import CoefficientSequence
from levyns.core.levy.measure import LevyMeasureSpec

logger = logging.getLogger(__name__)


class NoiseBackend(Enum):
    """How per-mode increments are drawn."""
    EXACT = "exact"
    LEVY_ITO = "levy-ito"

    @property
    def description(self) -> str:
        descriptions = {
            NoiseBackend.EXACT: "direct stable draw scaled by dt^(1/alpha)",
            NoiseBackend.LEVY_ITO: "compensated small jumps plus compound-Poisson jumps",
        }
        return descriptions[self]


@dataclass(frozen=True)
class LevyNoiseSpec:
    """L_t = sum_j beta_j L^(j)_t e_j together with the moment index theta."""
    measure: LevyMeasureSpec
    betas: CoefficientSequence
    theta: float
    backend: NoiseBackend = NoiseBackend.EXACT
    small_jump_cutoff: float = DEFAULT_SMALL_JUMP_CUTOFF
    enabled: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.theta <= 1.0:
            raise ValueError(f"theta must lie in (0, 1], got {self.theta}")
        if not 0.0 < self.small_jump_cutoff <= 1.0:
            raise ValueError(
                f"small_jump_cutoff must lie in (0, 1], got {self.small_jump_cutoff}"
            )
        if self.backend is NoiseBackend.EXACT and self.measure.is_truncated:
            raise ValueError("The exact backend samples untruncated stable laws only")


@dataclass(frozen=True)
class HThetaResult:
    """Value of H_theta = int_{|x|>1}|x|^theta nu(dx) + sum_j beta_j^theta."""
    value: float
    big_jump_term: float
    series_term: float
    diverges: bool
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "big_jump_term": self.big_jump_term,
            "series_term": self.series_term,
            "diverges": self.diverges,
            "reason": self.reason,
        }


def h_theta(spec: LevyNoiseSpec) -> HThetaResult:
    """Closed-form H_theta; divergence is flagged, never truncated away.

    H_theta scales linearly in the intensity c through its first term.
    """
    theta = spec.theta
    big = spec.measure.big_jump_theta_moment(theta)
    series = spec.betas.theta_sum(theta)
    reasons = []
    if math.isinf(big):
        reasons.append(
            f"big-jump integral diverges: theta={theta:g} >= alpha={spec.measure.alpha:g}"
        )
    if math.isinf(series):
        reasons.append(f"coefficient series sum beta_j^theta diverges ({spec.betas.describe()})")
    diverges = bool(reasons)
    value = math.inf if diverges else big + series
    if diverges:
        logger.warning(f"H_theta diverges: {'; '.join(reasons)}")
    return HThetaResult(
        value=value,
        big_jump_term=big,
        series_term=series,
        diverges=diverges,
        reason="; ".join(reasons),
    )
