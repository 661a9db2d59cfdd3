"""Levy measures of the symmetric alpha-stable family.

nu(dy) = c |y|^(-1-alpha) dy on R \\ {0}, optionally restricted to |y| <= R.
All moment and mass integrals below are closed forms of that density.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from scipy.special import gamma as gamma_fn


class LevyFamily(Enum):
    """Supported Levy measure families."""
    SYMMETRIC_STABLE = "symmetric-stable"
    TRUNCATED_STABLE = "truncated-stable"

    @property
    def display_name(self) -> str:
        names = {
            LevyFamily.SYMMETRIC_STABLE: "symmetric alpha-stable",
            LevyFamily.TRUNCATED_STABLE: "truncated alpha-stable",
        }
        return names[self]


@dataclass(frozen=True)
class LevyMeasureSpec:
    """Symmetric (possibly truncated) alpha-stable Levy measure."""
    alpha: float
    intensity: float = 1.0
    truncation: Optional[float] = None

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")
        if self.intensity <= 0.0:
            raise ValueError(f"intensity must be positive, got {self.intensity}")
        if self.truncation is not None and self.truncation <= 0.0:
            raise ValueError(f"truncation radius must be positive, got {self.truncation}")

    @property
    def family(self) -> LevyFamily:
        if self.truncation is None:
            return LevyFamily.SYMMETRIC_STABLE
        return LevyFamily.TRUNCATED_STABLE

    @property
    def is_truncated(self) -> bool:
        return self.truncation is not None

    @property
    def radius(self) -> float:
        """Support radius R (infinite for the untruncated family)."""
        return math.inf if self.truncation is None else float(self.truncation)

    def _radius_pow(self, exponent: float) -> float:
        """R^exponent with R = inf mapped to 0 for negative exponents."""
        if self.truncation is None:
            if exponent < 0:
                return 0.0
            return math.inf
        return self.truncation ** exponent

    def tail_mass(self, delta: float) -> float:
        """nu(delta < |y| <= R) = 2c (delta^-alpha - R^-alpha) / alpha."""
        if delta <= 0:
            return math.inf
        if delta >= self.radius:
            return 0.0
        a = self.alpha
        return 2.0 * self.intensity * (delta ** (-a) - self._radius_pow(-a)) / a

    def big_jump_mass(self) -> float:
        """nu(|y| > 1), the rate of the compound-Poisson part of the Levy-Ito split."""
        return self.tail_mass(1.0)

    def big_jump_theta_moment(self, theta: float) -> float:
        """int_{|y|>1} |y|^theta nu(dy); infinite when theta >= alpha and untruncated."""
        r = self.radius
        if r <= 1.0:
            return 0.0
        a, c = self.alpha, self.intensity
        if self.truncation is None:
            if theta >= a:
                return math.inf
            return 2.0 * c / (a - theta)
        if theta == a:
            return 2.0 * c * math.log(r)
        return 2.0 * c * (r ** (theta - a) - 1.0) / (theta - a)

    def small_jump_second_moment(self, delta: float) -> float:
        """int_{|y|<=delta} y^2 nu(dy) = 2c min(delta, R)^(2-alpha) / (2-alpha)."""
        edge = min(delta, self.radius)
        return 2.0 * self.intensity * edge ** (2.0 - self.alpha) / (2.0 - self.alpha)

    def truncated_second_moment(self) -> float:
        """int 1 ^ |y|^2 nu(dy); finite for every alpha in (0, 2)."""
        return self.small_jump_second_moment(1.0) + self.big_jump_mass()

    def stable_constant(self) -> float:
        """K with -Re psi(xi) = K |xi|^alpha for the untruncated family.

        K = 2c int_0^inf (1 - cos y) y^(-1-alpha) dy
          = 2c Gamma(1-alpha) cos(pi alpha/2) / alpha   (alpha != 1),  pi c at alpha = 1.
        """
        a, c = self.alpha, self.intensity
        if math.isclose(a, 1.0, rel_tol=0.0, abs_tol=1e-12):
            return math.pi * c
        return 2.0 * c * float(gamma_fn(1.0 - a)) * math.cos(math.pi * a / 2.0) / a

    def stable_scale(self, dt: float = 1.0) -> float:
        """Scale sigma of the symmetric stable increment over time dt.

        The increment has characteristic function exp(-sigma^alpha |xi|^alpha).
        """
        if self.is_truncated:
            raise ValueError("Truncated measures have no stable increment law")
        return (dt * self.stable_constant()) ** (1.0 / self.alpha)

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "alpha": self.alpha,
            "intensity": self.intensity,
            "truncation": self.truncation,
        }
