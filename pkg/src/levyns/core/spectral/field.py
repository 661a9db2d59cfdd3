"""Spectral fields: coefficient vectors on the Stokes eigenbasis."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from levyns.core.spectral.basis import Basis


@dataclass(frozen=True, eq=False)
class SpectralField:
    """u = sum_j a_j e_j, divergence-free and mean-zero by construction.

    Coefficients are stored as a read-only float array of length ``basis.n``.
    """
    basis: Basis
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.array(self.coefficients, dtype=float, copy=True).reshape(-1)
        if coeffs.shape[0] != self.basis.n:
            raise ValueError(
                f"Expected {self.basis.n} coefficients, got {coeffs.shape[0]}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def zeros(cls, basis: Basis) -> "SpectralField":
        return cls(basis, np.zeros(basis.n))

    @classmethod
    def single_mode(cls, basis: Basis, j: int, amplitude: float = 1.0) -> "SpectralField":
        coeffs = np.zeros(basis.n)
        coeffs[j - 1] = amplitude
        return cls(basis, coeffs)

    @property
    def n(self) -> int:
        return self.basis.n

    def norm(self, gamma: float = 0.0) -> float:
        return norm(self, gamma)

    def project(self, m: int) -> "SpectralField":
        return project(self, m)

    def inner(self, other: "SpectralField", gamma: float = 0.0) -> float:
        """H^gamma inner product."""
        self._check_same_basis(other)
        weights = self.basis.eigenvalues ** gamma
        return float(np.sum(weights * self.coefficients * other.coefficients))

    def with_coefficients(self, coefficients: np.ndarray) -> "SpectralField":
        return SpectralField(self.basis, coefficients)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_same_basis(other)
        return SpectralField(self.basis, self.coefficients + other.coefficients)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_same_basis(other)
        return SpectralField(self.basis, self.coefficients - other.coefficients)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.basis, self.coefficients * float(scalar))

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpectralField):
            return NotImplemented
        return self.basis == other.basis and np.array_equal(self.coefficients, other.coefficients)

    def _check_same_basis(self, other: "SpectralField") -> None:
        if self.basis.n != other.basis.n:
            raise ValueError(
                f"Fields live on different bases (n={self.basis.n} vs n={other.basis.n})"
            )


def norm(u: SpectralField, gamma: float = 0.0) -> float:
    """H^gamma norm (sum_j lambda_j^gamma a_j^2)^(1/2).

    gamma=0 is the L2 norm, gamma=1 equals the L2 norm of the gradient,
    gamma=-1 is the H^-1 norm.
    """
    weights = u.basis.eigenvalues ** gamma
    return float(np.sqrt(np.sum(weights * u.coefficients ** 2)))


def project(u: SpectralField, m: int) -> SpectralField:
    """Galerkin projection onto the first m modes, kept on the ambient basis."""
    if not 1 <= m <= u.n:
        raise ValueError(f"Projection size {m} outside 1..{u.n}")
    coeffs = np.array(u.coefficients)
    coeffs[m:] = 0.0
    return SpectralField(u.basis, coeffs)


def embed(u: SpectralField, basis: Basis) -> SpectralField:
    """Carry u onto another basis, truncating or zero-padding in mode order."""
    coeffs = np.zeros(basis.n)
    m = min(basis.n, u.n)
    coeffs[:m] = u.coefficients[:m]
    return SpectralField(basis, coeffs)
