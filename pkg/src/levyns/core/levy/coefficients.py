"""Coefficient sequences beta_j of the cylindrical noise."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.special import zeta


class CoefficientRule(Enum):
    POWER = "power"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class CoefficientSequence:
    """beta_j = j^-r under the power rule, or an explicit finite list.

    Explicit lists may contain zeros, which switch a mode's noise off.
    """
    rule: CoefficientRule
    exponent: Optional[float] = None
    explicit: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.rule is CoefficientRule.POWER:
            if self.exponent is None:
                raise ValueError("power rule needs an exponent")
        else:
            if not self.explicit:
                raise ValueError("explicit coefficient list is empty")
            if any(b < 0 or not math.isfinite(b) for b in self.explicit):
                raise ValueError("explicit coefficients must be finite and nonnegative")

    @classmethod
    def power(cls, exponent: float) -> "CoefficientSequence":
        return cls(CoefficientRule.POWER, exponent=float(exponent))

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "CoefficientSequence":
        return cls(CoefficientRule.EXPLICIT, explicit=tuple(float(v) for v in values))

    @classmethod
    def parse(cls, rule: "str | Sequence[float]") -> "CoefficientSequence":
        """Parse the ``beta_rule`` config value: ``power:<r>`` or a list of numbers."""
        if isinstance(rule, str):
            name, _, arg = rule.partition(":")
            if name.strip() != "power" or not arg:
                raise ValueError(f"beta_rule must be 'power:<r>' or a list, got {rule!r}")
            return cls.power(float(arg))
        return cls.from_values(rule)

    @property
    def length(self) -> Optional[int]:
        """Number of available coefficients (None for infinite rules)."""
        return None if self.rule is CoefficientRule.POWER else len(self.explicit)

    def values(self, n: int) -> np.ndarray:
        """beta_1..beta_n."""
        if self.rule is CoefficientRule.POWER:
            return np.arange(1, n + 1, dtype=float) ** (-self.exponent)
        if n > len(self.explicit):
            raise ValueError(f"Only {len(self.explicit)} explicit coefficients for n={n}")
        return np.array(self.explicit[:n], dtype=float)

    def theta_sum(self, theta: float) -> float:
        """sum_j beta_j^theta over the whole sequence; inf when it diverges.

        The power rule uses the zeta function, so the untruncated series is exact.
        """
        if self.rule is CoefficientRule.POWER:
            s = self.exponent * theta
            if s <= 1.0:
                return math.inf
            return float(zeta(s, 1))
        values = np.array(self.explicit)
        return float(np.sum(values[values > 0] ** theta))

    def describe(self) -> str:
        if self.rule is CoefficientRule.POWER:
            return f"power:{self.exponent:g}"
        return "[" + ", ".join(f"{v:g}" for v in self.explicit) + "]"
