"""Pydantic models for the sections of a run config."""
from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from levyns.core.constants import (
    DEFAULT_BACKEND,
    DEFAULT_PERMUTATIONS,
    DEFAULT_SCHEME,
    DEFAULT_SMALL_JUMP_CUTOFF,
)


class Section(BaseModel):
    """Unknown keys are rejected in every section."""
    model_config = ConfigDict(extra="forbid", frozen=True)


class SpectralSection(Section):
    """Arguments for the Galerkin space."""
    n: int = Field(gt=0, description="Galerkin size: number of real basis modes")
    nonlinear_backend: Literal["convolution", "collocation"] = Field(
        default="convolution", description="Algorithm used for the advection term"
    )


class NoiseSection(Section):
    """Arguments for the Levy noise L_t = sum_j beta_j L^(j)_t e_j."""
    alpha: float = Field(gt=0.0, lt=2.0, description="Stability index of the Levy measure")
    intensity: float = Field(default=1.0, gt=0.0, description="c in nu(dy) = c |y|^(-1-alpha) dy")
    truncation: Optional[float] = Field(
        default=None, gt=0.0, description="Support radius of the truncated family; absent for untruncated"
    )
    beta_rule: Union[str, list[float]] = Field(
        description="'power:<r>' for beta_j = j^-r, or an explicit list of coefficients"
    )
    theta: float = Field(gt=0.0, le=1.0, description="Moment index of assumption H_theta")
    backend: Literal["exact", "levy-ito"] = Field(
        default=DEFAULT_BACKEND, description="How per-mode increments are drawn"
    )
    small_jump_cutoff: float = Field(
        default=DEFAULT_SMALL_JUMP_CUTOFF, gt=0.0, le=1.0,
        description="Jumps below this size are dropped by the levy-ito backend",
    )
    enabled: bool = Field(default=True, description="If false the run is the deterministic limit")

    @field_validator("beta_rule")
    @classmethod
    def _check_beta_rule(cls, value: Union[str, list[float]]) -> Union[str, list[float]]:
        if isinstance(value, str):
            name, _, arg = value.partition(":")
            if name.strip() != "power" or not arg.strip():
                raise ValueError("must be 'power:<r>' or a list of numbers")
            float(arg)
        elif any(v < 0 for v in value):
            raise ValueError("coefficients must be nonnegative")
        return value


class InitialSection(Section):
    """Arguments for the initial condition phi."""
    preset: Literal["zero", "single-mode", "random-sobolev", "snapshot"] = Field(
        default="zero", description="Named initial condition"
    )
    wave: tuple[int, int] = Field(default=(1, 0), description="Wave vector (kx, ky) of the single-mode preset")
    phase: Literal["cosine", "sine"] = Field(default="cosine", description="Phase of the single-mode preset")
    amplitude: float = Field(default=1.0, description="Coefficient of the single-mode preset")
    gamma: float = Field(default=1.0, description="Sobolev decay of the random-sobolev preset")
    norm: float = Field(default=1.0, ge=0.0, description="L2 norm of the random-sobolev preset")
    path: Optional[str] = Field(default=None, description="Snapshot file of the snapshot preset")


class SolverSection(Section):
    """Arguments for time stepping."""
    dt: float = Field(gt=0.0, description="Time step")
    T: float = Field(ge=0.0, description="Horizon")
    scheme: Literal["exponential-euler", "semi-implicit-euler"] = Field(
        default=DEFAULT_SCHEME, description="Drift integrator"
    )
    seed: int = Field(default=0, ge=0, description="Master seed; every random stream derives from it")
    snapshot_stride: int = Field(default=1, ge=1, description="Record the field every this many steps")
    initial: InitialSection = Field(default_factory=InitialSection, description="Initial condition")


class DiagnosticsSection(Section):
    """Arguments for the moment and martingale diagnostics."""
    trajectories: int = Field(default=256, ge=1, description="Ensemble size M")
    horizons: list[float] = Field(default=[1.0, 2.0, 4.0, 8.0], description="Horizons t_k of the moment report")
    mode: int = Field(default=1, ge=1, description="Mode j of the martingale CF test")
    xi: list[float] = Field(default=[0.5, 1.0, 2.0], description="xi grid of the CF test")
    pairs: list[tuple[float, float]] = Field(default=[(0.0, 0.5)], description="(s, t) pairs of the CF test")
    independence_pairs: list[tuple[int, int]] = Field(
        default=[(1, 2)], description="(j, k) mode pairs of the independence test"
    )
    dt_halving: bool = Field(default=True, description="Repeat the CF test at dt/2")


class InvariantSection(Section):
    """Arguments for the empirical invariant-measure estimator."""
    trajectories: int = Field(default=128, ge=1, description="Ensemble size M")
    burn_in: Optional[float] = Field(default=None, ge=0.0, description="Defaults to T/2")
    stride: Optional[int] = Field(default=None, ge=1, description="Sampling stride in steps; adaptive if absent")
    windows: list[tuple[float, float]] = Field(default=[], description="Time windows to compare")
    observables: list[str] = Field(default=["l2", "h1theta", "mode:1"], description="Observable tokens")
    permutations: int = Field(default=DEFAULT_PERMUTATIONS, ge=1, description="Permutations per KS p-value")


class RunConfig(Section):
    """A whole run config; ``spectral``, ``noise`` and ``solver`` are required."""
    spectral: SpectralSection
    noise: NoiseSection
    solver: SolverSection
    diagnostics: DiagnosticsSection = Field(default_factory=DiagnosticsSection)
    invariant: InvariantSection = Field(default_factory=InvariantSection)
