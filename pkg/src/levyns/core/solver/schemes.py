"""Time-stepping schemes for du = [Delta u - Pi_n((u.grad)u)] dt + dL."""
from __future__ import annotations

import logging
from enum import Enum
from typing import Optional, Union

import numpy as np

from levyns.core.errors import BlowUpError
from levyns.core.levy.sampling import NoiseIncrement
from levyns.core.spectral.field import SpectralField
from levyns.core.spectral.nonlinear import NonlinearBackend, get_operator

logger = logging.getLogger(__name__)


class Scheme(Enum):
    """Drift integrators. Jump increments are added at step end in both."""
    EXPONENTIAL_EULER = "exponential-euler"
    SEMI_IMPLICIT_EULER = "semi-implicit-euler"

    @property
    def description(self) -> str:
        descriptions = {
            Scheme.EXPONENTIAL_EULER: "exact linear flow, explicit nonlinearity (phi_1 weighted)",
            Scheme.SEMI_IMPLICIT_EULER: "backward Euler for the Stokes part, forward for advection",
        }
        return descriptions[self]


def phi1(z: np.ndarray) -> np.ndarray:
    """phi_1(z) = (e^z - 1)/z with phi_1(0) = 1."""
    z = np.asarray(z, dtype=float)
    safe = np.where(z == 0.0, 1.0, z)
    return np.where(z == 0.0, 1.0, np.expm1(safe) / safe)


class LinearPropagator:
    """Per-mode factors of one scheme for fixed eigenvalues and dt.

    ``advance`` maps (a, B(a), dL) to the next coefficient vector.
    """

    def __init__(self, eigenvalues: np.ndarray, dt: float, scheme: Scheme) -> None:
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")
        self.scheme = Scheme(scheme)
        self.dt = float(dt)
        lam = np.asarray(eigenvalues, dtype=float)
        if self.scheme is Scheme.EXPONENTIAL_EULER:
            self._decay = np.exp(-lam * dt)
            self._drift = dt * phi1(-lam * dt)
            self._post = np.ones_like(lam)
        else:
            self._decay = np.ones_like(lam)
            self._drift = np.full_like(lam, dt)
            self._post = 1.0 / (1.0 + lam * dt)

    def advance(self, coeffs: np.ndarray, nonlinear: np.ndarray, jumps: np.ndarray) -> np.ndarray:
        if self.scheme is Scheme.EXPONENTIAL_EULER:
            return self._decay * coeffs - self._drift * nonlinear + jumps
        return self._post * (coeffs - self._drift * nonlinear + jumps)


def step(
    u: SpectralField,
    dt: float,
    noise: Optional[Union[NoiseIncrement, np.ndarray]] = None,
    scheme: Scheme = Scheme.EXPONENTIAL_EULER,
    backend: NonlinearBackend = NonlinearBackend.CONVOLUTION,
    step_index: int = 0,
) -> SpectralField:
    """One step of the Galerkin SDE.

    Raises BlowUpError (carrying ``step_index``) when the new state is not finite.
    """
    if noise is None:
        jumps = np.zeros(u.n)
    elif isinstance(noise, NoiseIncrement):
        jumps = noise.jumps
    else:
        jumps = np.asarray(noise, dtype=float)
    if jumps.shape != (u.n,):
        raise ValueError(f"Noise increment has shape {jumps.shape}, field has n={u.n}")

    operator = get_operator(u.basis, NonlinearBackend(backend))
    nonlinear = operator.apply(u.coefficients)
    propagator = LinearPropagator(u.basis.eigenvalues, dt, scheme)
    coeffs = propagator.advance(u.coefficients, nonlinear, jumps)
    if not np.all(np.isfinite(coeffs)):
        raise BlowUpError(step_index)
    return SpectralField(u.basis, coeffs)
