"""Solver configuration and initial-condition presets."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Union

import numpy as np

from levyns.core.levy.noise import LevyNoiseSpec
from levyns.core.levy.streams import StreamPurpose, make_stream
from levyns.core.solver.schemes import Scheme
from levyns.core.spectral.basis import Basis, Phase, WaveVector, build_basis
from levyns.core.spectral.field import SpectralField, embed, project
from levyns.core.spectral.nonlinear import NonlinearBackend
from levyns.core.spectral.snapshot import read_snapshot

logger = logging.getLogger(__name__)


class InitialPreset(Enum):
    """Named initial conditions phi."""
    ZERO = "zero"
    SINGLE_MODE = "single-mode"
    RANDOM_SOBOLEV = "random-sobolev"
    SNAPSHOT = "snapshot"

    @property
    def description(self) -> str:
        descriptions = {
            InitialPreset.ZERO: "phi = 0",
            InitialPreset.SINGLE_MODE: "amplitude times one basis mode (wave, phase)",
            InitialPreset.RANDOM_SOBOLEV: "gaussian coefficients scaled by lambda_j^(-gamma/2), rescaled to a given L2 norm",
            InitialPreset.SNAPSHOT: "field read back from a snapshot file",
        }
        return descriptions[self]


@dataclass(frozen=True)
class InitialCondition:
    """A preset and its parameters; ``build`` realises phi on a basis."""
    preset: InitialPreset = InitialPreset.ZERO
    wave: tuple[int, int] = (1, 0)
    phase: Phase = Phase.COSINE
    amplitude: float = 1.0
    gamma: float = 1.0
    norm: float = 1.0
    path: Optional[str] = None

    @classmethod
    def zero(cls) -> "InitialCondition":
        return cls(InitialPreset.ZERO)

    @classmethod
    def single_mode(
        cls, wave: tuple[int, int] = (1, 0), phase: Phase = Phase.COSINE, amplitude: float = 1.0
    ) -> "InitialCondition":
        return cls(InitialPreset.SINGLE_MODE, wave=tuple(wave), phase=Phase(phase), amplitude=amplitude)

    @classmethod
    def random_sobolev(cls, gamma: float = 1.0, norm: float = 1.0) -> "InitialCondition":
        return cls(InitialPreset.RANDOM_SOBOLEV, gamma=gamma, norm=norm)

    @classmethod
    def snapshot(cls, path: Union[str, Path]) -> "InitialCondition":
        return cls(InitialPreset.SNAPSHOT, path=str(path))

    def build(self, basis: Basis, seed: int = 0) -> SpectralField:
        """phi on ``basis``; a snapshot larger than the basis is projected and truncated."""
        if self.preset is InitialPreset.ZERO:
            return SpectralField.zeros(basis)

        if self.preset is InitialPreset.SINGLE_MODE:
            wave = WaveVector.canonical(*self.wave)
            try:
                j = basis.index_of(wave, self.phase)
            except KeyError:
                raise ValueError(
                    f"Wave {self.wave} ({self.phase.value}) is not among the first {basis.n} modes"
                ) from None
            return SpectralField.single_mode(basis, j, self.amplitude)

        if self.preset is InitialPreset.RANDOM_SOBOLEV:
            rng = make_stream(seed, StreamPurpose.INITIAL_CONDITION)
            coeffs = rng.standard_normal(basis.n) * basis.eigenvalues ** (-self.gamma / 2.0)
            size = float(np.linalg.norm(coeffs))
            if size == 0.0 or self.norm == 0.0:
                return SpectralField.zeros(basis)
            return SpectralField(basis, coeffs * (self.norm / size))

        if self.path is None:
            raise ValueError("snapshot preset needs a path")
        field, _, _ = read_snapshot(Path(self.path))
        if field.n < basis.n:
            logger.warning(
                f"Snapshot {self.path} has n={field.n} < {basis.n}; missing modes start at zero"
            )
        return embed(field, basis)

    def to_dict(self) -> dict:
        return {
            "preset": self.preset.value,
            "wave": list(self.wave),
            "phase": self.phase.symbol,
            "amplitude": self.amplitude,
            "gamma": self.gamma,
            "norm": self.norm,
            "path": self.path,
        }


@dataclass(frozen=True)
class SolverConfig:
    """Everything needed to reproduce one Galerkin trajectory (or an ensemble)."""
    n: int
    dt: float
    horizon: float
    noise: LevyNoiseSpec
    initial: Union[InitialCondition, SpectralField] = InitialCondition()
    scheme: Scheme = Scheme.EXPONENTIAL_EULER
    seed: int = 0
    snapshot_stride: int = 1
    nonlinear_backend: NonlinearBackend = NonlinearBackend.CONVOLUTION

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.horizon < 0:
            raise ValueError(f"T must be nonnegative, got {self.horizon}")
        if 0 < self.horizon < self.dt:
            raise ValueError(f"T={self.horizon} is shorter than one step dt={self.dt}")
        if self.snapshot_stride < 1:
            raise ValueError(f"snapshot_stride must be at least 1, got {self.snapshot_stride}")
        if isinstance(self.initial, SpectralField) and self.initial.n < self.n:
            raise ValueError(
                f"Initial field lives on {self.initial.n} modes, need at least n={self.n}"
            )
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "nonlinear_backend", NonlinearBackend(self.nonlinear_backend))

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    @property
    def theta(self) -> float:
        return self.noise.theta

    @property
    def basis(self) -> Basis:
        return build_basis(self.n)

    def step_of(self, time: float) -> int:
        """Grid index of ``time``; rejects times off the step grid or beyond T."""
        k = int(round(time / self.dt))
        if not math.isclose(k * self.dt, time, rel_tol=1e-9, abs_tol=1e-12):
            raise ValueError(f"t={time} is not a multiple of dt={self.dt}")
        if not 0 <= k <= self.n_steps:
            raise ValueError(f"t={time} lies outside [0, T={self.horizon}]")
        return k

    def initial_field(self) -> SpectralField:
        """u^n_0 = Pi_n phi."""
        if isinstance(self.initial, SpectralField):
            phi = self.initial
            if phi.n == self.n:
                return phi
            return embed(project(phi, self.n), self.basis)
        return self.initial.build(self.basis, self.seed)

    def to_dict(self) -> dict:
        initial = (
            {"preset": "field", "n": self.initial.n}
            if isinstance(self.initial, SpectralField)
            else self.initial.to_dict()
        )
        return {
            "n": self.n,
            "dt": self.dt,
            "T": self.horizon,
            "scheme": self.scheme.value,
            "seed": self.seed,
            "snapshot_stride": self.snapshot_stride,
            "nonlinear_backend": self.nonlinear_backend.value,
            "initial": initial,
            "noise": {
                "measure": self.noise.measure.to_dict(),
                "betas": self.noise.betas.describe(),
                "theta": self.noise.theta,
                "backend": self.noise.backend.value,
                "small_jump_cutoff": self.noise.small_jump_cutoff,
                "enabled": self.noise.enabled,
            },
        }
