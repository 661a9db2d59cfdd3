"""Exception hierarchy for levy-ns."""
from __future__ import annotations

from typing import Any, Optional


class LevyNSError(Exception):
    """Base class for all levy-ns errors."""


class ConfigError(LevyNSError):
    """Run configuration failed validation.

    Carries every violation found, not only the first one.
    """

    def __init__(self, errors: list[str]) -> None:
        self.errors = list(errors)
        super().__init__("; ".join(self.errors) if self.errors else "invalid configuration")


class HThetaDivergenceError(LevyNSError):
    """Assumption (H_theta) fails: the noise has no finite theta-moment."""


class AliasingError(LevyNSError):
    """Real-space grid too coarse for the band limit of a field."""

    def __init__(self, resolution: int, required: int) -> None:
        self.resolution = resolution
        self.required = required
        super().__init__(
            f"Grid resolution {resolution} aliases the field; need at least {required}"
        )


class QuadratureError(LevyNSError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, what: str, achieved: float, requested: float) -> None:
        self.achieved = achieved
        self.requested = requested
        super().__init__(
            f"Quadrature for {what} did not converge: achieved {achieved:.3e}, requested {requested:.3e}"
        )


class BlowUpError(LevyNSError):
    """Nonfinite state reached during time stepping."""

    def __init__(self, step: int, trajectory: Optional[int] = None, record: Any = None) -> None:
        self.step = step
        self.trajectory = trajectory
        # partial TrajectoryRecord up to the last finite state, when available
        self.record = record
        where = f" (trajectory {trajectory})" if trajectory is not None else ""
        super().__init__(f"Nonfinite coefficients at step {step}{where}")


class ReportSchemaError(LevyNSError):
    """A report file does not match any known schema."""

    def __init__(self, path: str, line: int, reason: str) -> None:
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {reason}")
