"""Projected advection term Pi_m((u.grad)u) on the Stokes basis.

Two backends compute the same quantity:

- ``convolution``: exact sum over interacting triads k + q = p of the
  band-limited field. Default, and the reference for the other backend.
- ``collocation``: pseudo-spectral products on a padded FFT grid large enough
  (N >= 3K + 1 per axis) that no aliased wave lands on a retained mode.
"""
from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np

from levyns.core.spectral.basis import Basis
from levyns.core.spectral.field import SpectralField

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
TWO_PI = 2.0 * math.pi


class NonlinearBackend(Enum):
    """Algorithm used for the advection term."""
    CONVOLUTION = "convolution"
    COLLOCATION = "collocation"


class _WaveLayout:
    """Maps mode coefficients to complex amplitudes per distinct wave.

    For a wave k with cosine/sine coefficients (a_c, a_s) the Fourier
    amplitude of u at +k is d_k * (a_c - i a_s)/sqrt(2), and its conjugate at -k.
    """

    def __init__(self, basis: Basis) -> None:
        self.basis = basis
        waves = basis.waves()
        self.waves = waves
        wave_index = {w: i for i, w in enumerate(waves)}
        self.mode_wave = np.array([wave_index[m.wave] for m in basis.modes], dtype=np.int64)
        self.cos_slot = np.full(len(waves), -1, dtype=np.int64)
        self.sin_slot = np.full(len(waves), -1, dtype=np.int64)
        for j, m in enumerate(basis.modes):
            if basis.is_sine[j]:
                self.sin_slot[self.mode_wave[j]] = j
            else:
                self.cos_slot[self.mode_wave[j]] = j
        self.wave_k = np.array([(w.kx, w.ky) for w in waves], dtype=np.int64)
        self.wave_dir = np.array([w.direction for w in waves], dtype=float)
        # waves of the first m modes form a prefix of ``waves``
        self.waves_within = np.zeros(basis.n + 1, dtype=np.int64)
        for m in range(1, basis.n + 1):
            self.waves_within[m] = self.mode_wave[m - 1] + 1

    def amplitudes(self, coeffs: np.ndarray) -> np.ndarray:
        """Complex scalar amplitude c_k = (a_c - i a_s)/sqrt(2) per wave."""
        a_c = np.where(self.cos_slot >= 0, coeffs[self.cos_slot], 0.0)
        a_s = np.where(self.sin_slot >= 0, coeffs[self.sin_slot], 0.0)
        return (a_c - 1j * a_s) / SQRT2

    def to_modes(self, projected: np.ndarray, m: int) -> np.ndarray:
        """Mode coefficients from d_p . f_hat(p) for each wave p.

        <f, e_cos> = sqrt(2) Re(d.f_hat), <f, e_sin> = -sqrt(2) Im(d.f_hat).
        """
        out = np.zeros(self.basis.n)
        per_mode = projected[self.mode_wave[:m]]
        sine = self.basis.is_sine[:m]
        out[:m] = np.where(sine, -SQRT2 * per_mode.imag, SQRT2 * per_mode.real)
        return out


class NonlinearOperator(ABC):
    """Evaluates Pi_m((u.grad)u) for coefficient vectors on a fixed basis."""

    backend: NonlinearBackend

    def __init__(self, basis: Basis) -> None:
        self.basis = basis
        self.layout = _WaveLayout(basis)

    @abstractmethod
    def _projected_hat(self, coeffs: np.ndarray, n_waves: int) -> np.ndarray:
        """d_p . FourierCoeff_p((u.grad)u) for the first n_waves waves."""

    def apply(self, coeffs: np.ndarray, m: Optional[int] = None) -> np.ndarray:
        """Coefficients of Pi_m((u.grad)u); entries beyond m are zero."""
        m = self.basis.n if m is None else m
        if not 1 <= m <= self.basis.n:
            raise ValueError(f"Projection size {m} outside 1..{self.basis.n}")
        coeffs = np.asarray(coeffs, dtype=float)
        n_waves = int(self.layout.waves_within[m])
        projected = self._projected_hat(coeffs, n_waves)
        return self.layout.to_modes(projected, m)


class ConvolutionOperator(NonlinearOperator):
    """Exact triad sum.

    For a pair of full-lattice entries (a, b) with K_a + K_b = p the contribution
    to d_p . f_hat(p) is 2 pi i (d_a . K_b)(d_b . d_p) c_a c_b; the real weights
    are tabulated once per basis and pairs are kept sorted by target wave.
    """

    backend = NonlinearBackend.CONVOLUTION

    def __init__(self, basis: Basis) -> None:
        super().__init__(basis)
        layout = self.layout
        n_waves = len(layout.waves)
        # full lattice: entry 2w is +k_w, entry 2w+1 is -k_w
        full_k = np.empty((2 * n_waves, 2), dtype=np.int64)
        full_k[0::2] = layout.wave_k
        full_k[1::2] = -layout.wave_k
        full_dir = np.repeat(layout.wave_dir, 2, axis=0)
        target_of = {(int(k[0]), int(k[1])): i for i, k in enumerate(layout.wave_k)}

        a_idx, b_idx = np.meshgrid(np.arange(2 * n_waves), np.arange(2 * n_waves), indexing="ij")
        a_idx = a_idx.ravel()
        b_idx = b_idx.ravel()
        p = full_k[a_idx] + full_k[b_idx]
        targets = np.array([target_of.get((int(px), int(py)), -1) for px, py in p], dtype=np.int64)
        keep = targets >= 0
        a_idx, b_idx, targets = a_idx[keep], b_idx[keep], targets[keep]

        d_a_dot_k_b = np.einsum("ij,ij->i", full_dir[a_idx], full_k[b_idx].astype(float))
        d_b_dot_d_p = np.einsum("ij,ij->i", full_dir[b_idx], layout.wave_dir[targets])
        weights = TWO_PI * d_a_dot_k_b * d_b_dot_d_p
        nonzero = weights != 0.0
        a_idx, b_idx, targets, weights = (
            a_idx[nonzero], b_idx[nonzero], targets[nonzero], weights[nonzero]
        )

        order = np.argsort(targets, kind="stable")
        self._a = a_idx[order]
        self._b = b_idx[order]
        self._target = targets[order]
        self._weight = weights[order]
        self._n_waves = n_waves
        logger.debug(f"Convolution table for n={basis.n}: {self._weight.size} active triads")

    def _projected_hat(self, coeffs: np.ndarray, n_waves: int) -> np.ndarray:
        amp = self.layout.amplitudes(coeffs)
        full = np.empty(2 * amp.size, dtype=complex)
        full[0::2] = amp
        full[1::2] = np.conj(amp)
        stop = int(np.searchsorted(self._target, n_waves, side="left"))
        prod = self._weight[:stop] * full[self._a[:stop]] * full[self._b[:stop]]
        targets = self._target[:stop]
        summed = (
            np.bincount(targets, weights=prod.real, minlength=n_waves)
            + 1j * np.bincount(targets, weights=prod.imag, minlength=n_waves)
        )
        return 1j * summed[:n_waves]


class CollocationOperator(NonlinearOperator):
    """Pseudo-spectral products on an (N x N) grid with N >= 3K + 1."""

    backend = NonlinearBackend.COLLOCATION

    def __init__(self, basis: Basis) -> None:
        super().__init__(basis)
        k_max = basis.max_wavenumber
        self.grid_size = 3 * k_max + 1
        freqs = np.fft.fftfreq(self.grid_size, d=1.0 / self.grid_size)
        self._kx, self._ky = np.meshgrid(freqs, freqs, indexing="ij")
        wk = self.layout.wave_k
        self._plus = (wk[:, 0] % self.grid_size, wk[:, 1] % self.grid_size)
        self._minus = ((-wk[:, 0]) % self.grid_size, (-wk[:, 1]) % self.grid_size)

    def _projected_hat(self, coeffs: np.ndarray, n_waves: int) -> np.ndarray:
        size = self.grid_size
        amp = self.layout.amplitudes(coeffs)
        dirs = self.layout.wave_dir
        u_hat = np.zeros((2, size, size), dtype=complex)
        for comp in range(2):
            u_hat[comp][self._plus] = dirs[:, comp] * amp
            u_hat[comp][self._minus] = dirs[:, comp] * np.conj(amp)
        scale = size * size
        u = np.fft.ifft2(u_hat, axes=(1, 2)).real * scale
        du_dx = np.fft.ifft2(1j * TWO_PI * self._kx * u_hat, axes=(1, 2)).real * scale
        du_dy = np.fft.ifft2(1j * TWO_PI * self._ky * u_hat, axes=(1, 2)).real * scale
        advection = u[0] * du_dx + u[1] * du_dy
        f_hat = np.fft.fft2(advection, axes=(1, 2)) / scale
        plus = (self._plus[0][:n_waves], self._plus[1][:n_waves])
        at_p = np.stack([f_hat[0][plus], f_hat[1][plus]], axis=1)
        return np.einsum("ij,ij->i", dirs[:n_waves], at_p)


_OPERATORS: dict[NonlinearBackend, type[NonlinearOperator]] = {
    NonlinearBackend.CONVOLUTION: ConvolutionOperator,
    NonlinearBackend.COLLOCATION: CollocationOperator,
}


@lru_cache(maxsize=32)
def get_operator(basis: Basis, backend: NonlinearBackend = NonlinearBackend.CONVOLUTION) -> NonlinearOperator:
    """Cached operator for (basis, backend)."""
    return _OPERATORS[NonlinearBackend(backend)](basis)


def nonlinear_term(
    u: SpectralField,
    m: Optional[int] = None,
    backend: NonlinearBackend = NonlinearBackend.CONVOLUTION,
) -> SpectralField:
    """Pi_m((u.grad)u), exact for band-limited u, divergence-free by construction."""
    operator = get_operator(u.basis, NonlinearBackend(backend))
    return SpectralField(u.basis, operator.apply(u.coefficients, m))


def weak_advection(u: SpectralField, j: int) -> float:
    """<u (x) u, grad e_j>_0, the weak form of the advection term.

    Integration by parts with div u = 0 gives -<(u.grad)u, e_j>_0.
    """
    operator = get_operator(u.basis, NonlinearBackend.CONVOLUTION)
    return -float(operator.apply(u.coefficients, j)[j - 1])
