"""Real-space rendering of spectral fields."""
from __future__ import annotations

import math

import numpy as np

from levyns.core.errors import AliasingError
from levyns.core.spectral.field import SpectralField

SQRT2 = math.sqrt(2.0)
TWO_PI = 2.0 * math.pi


def uniform_grid(resolution: int) -> np.ndarray:
    """(resolution, resolution, 2) array of points j/resolution on (0,1]^2 (periodic)."""
    x = np.arange(resolution) / resolution
    xx, yy = np.meshgrid(x, x, indexing="ij")
    return np.stack([xx, yy], axis=-1)


def required_resolution(u: SpectralField) -> int:
    """Smallest grid on which products of two modes of u do not alias."""
    return 2 * u.basis.max_wavenumber + 1


def _phases(u: SpectralField, points: np.ndarray) -> np.ndarray:
    k = u.basis.wave_numbers.astype(float)
    return TWO_PI * np.tensordot(points, k, axes=([-1], [1]))


def evaluate_at(u: SpectralField, points: np.ndarray) -> np.ndarray:
    """Velocity sum_j a_j e_j(x) at arbitrary points of shape (..., 2)."""
    points = np.asarray(points, dtype=float)
    phase = _phases(u, points)
    trig = np.where(u.basis.is_sine, np.sin(phase), np.cos(phase))
    weights = SQRT2 * trig * u.coefficients
    return np.tensordot(weights, u.basis.directions, axes=([-1], [0]))


def gradient_at(u: SpectralField, points: np.ndarray) -> np.ndarray:
    """Velocity gradient du_i/dx_l at points, shape (..., 2, 2) indexed [i, l]."""
    points = np.asarray(points, dtype=float)
    phase = _phases(u, points)
    # d/dx_l cos = -2 pi k_l sin, d/dx_l sin = 2 pi k_l cos
    dtrig = np.where(u.basis.is_sine, np.cos(phase), -np.sin(phase))
    weights = SQRT2 * TWO_PI * dtrig * u.coefficients
    k = u.basis.wave_numbers.astype(float)
    dirs = u.basis.directions
    return np.einsum("...j,ji,jl->...il", weights, dirs, k)


def evaluate(u: SpectralField, resolution: int) -> np.ndarray:
    """Velocity samples on the uniform grid of the given resolution.

    Raises AliasingError when resolution < 2 max|k| + 1, below which the grid
    average of |u|^2 no longer equals ||u||_0^2.
    """
    required = required_resolution(u)
    if resolution < required:
        raise AliasingError(resolution, required)
    return evaluate_at(u, uniform_grid(resolution))
