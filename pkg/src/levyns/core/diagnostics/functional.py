"""The functional f(u) = (||u||_0^2 + 1)^(theta/2) and its calculus."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from levyns.core.spectral.basis import build_basis
from levyns.core.spectral.field import SpectralField

logger = logging.getLogger(__name__)


def _check_theta(theta: float) -> None:
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")


def f_theta(u: SpectralField, theta: float) -> float:
    _check_theta(theta)
    return float((u.norm() ** 2 + 1.0) ** (theta / 2.0))


def grad_f_theta(u: SpectralField, theta: float) -> SpectralField:
    """theta u / (||u||^2 + 1)^(1 - theta/2)."""
    _check_theta(theta)
    s = u.norm() ** 2 + 1.0
    return u * (theta / s ** (1.0 - theta / 2.0))


def hessian_f_theta(u: SpectralField, theta: float) -> np.ndarray:
    """theta s^(theta/2-1) I + theta (theta-2) s^(theta/2-2) u u^T, s = ||u||^2 + 1."""
    _check_theta(theta)
    a = u.coefficients
    s = float(np.dot(a, a)) + 1.0
    return (
        theta * s ** (theta / 2.0 - 1.0) * np.eye(u.n)
        + theta * (theta - 2.0) * s ** (theta / 2.0 - 2.0) * np.outer(a, a)
    )


def hessian_trace_bound(u: SpectralField, theta: float) -> float:
    """n theta / (||u||^2 + 1)^(1 - theta/2), an upper bound for tr D^2 f."""
    s = u.norm() ** 2 + 1.0
    return u.n * theta / s ** (1.0 - theta / 2.0)


@dataclass(frozen=True)
class LipschitzCheck:
    """|f(u) - f(v)| <= ||u - v||^theta with its slack; the pair is kept as witness."""
    holds: bool
    slack: float
    difference: float
    bound: float
    u: Optional[SpectralField] = None
    v: Optional[SpectralField] = None

    def to_dict(self) -> dict:
        out = {
            "holds": self.holds,
            "slack": self.slack,
            "difference": self.difference,
            "bound": self.bound,
        }
        if not self.holds and self.u is not None and self.v is not None:
            out["witness_u"] = self.u.coefficients.tolist()
            out["witness_v"] = self.v.coefficients.tolist()
        return out


def f_lipschitz_check(u: SpectralField, v: SpectralField, theta: float) -> LipschitzCheck:
    """Holds up to floating-point rounding 1e-12 (1 + f(u) + f(v))."""
    fu, fv = f_theta(u, theta), f_theta(v, theta)
    difference = abs(fu - fv)
    bound = (u - v).norm() ** theta
    slack = bound - difference
    holds = slack >= -1e-12 * (1.0 + fu + fv)
    if not holds:
        logger.warning(f"Lipschitz bound violated: |f(u)-f(v)|={difference:.17g} > {bound:.17g}")
    return LipschitzCheck(holds, slack, difference, bound, u, v)


@dataclass(frozen=True)
class LipschitzSweep:
    pairs: int
    violations: int
    min_slack: float
    thetas: tuple[float, ...]
    witness: Optional[LipschitzCheck] = None

    @property
    def holds(self) -> bool:
        return self.violations == 0


def lipschitz_sweep(
    n: int,
    thetas: Sequence[float],
    pairs: int,
    rng: np.random.Generator,
) -> LipschitzSweep:
    """Random pairs at log-uniform scales in [1e-3, 1e3], split evenly over thetas."""
    basis = build_basis(n)
    violations = 0
    min_slack = np.inf
    witness = None
    per_theta = max(1, pairs // len(thetas))
    for theta in thetas:
        for _ in range(per_theta):
            scale_u, scale_v = 10.0 ** rng.uniform(-3.0, 3.0, size=2)
            u = SpectralField(basis, scale_u * rng.standard_normal(n))
            # near pairs cover the small-distance regime where theta < 1 matters most
            if rng.random() < 0.5:
                v = SpectralField(basis, u.coefficients + scale_v * 1e-3 * rng.standard_normal(n))
            else:
                v = SpectralField(basis, scale_v * rng.standard_normal(n))
            check = f_lipschitz_check(u, v, theta)
            min_slack = min(min_slack, check.slack)
            if not check.holds:
                violations += 1
                witness = witness or check
    return LipschitzSweep(per_theta * len(thetas), violations, float(min_slack), tuple(thetas), witness)


def gradient_fd_error(u: SpectralField, theta: float, h: float = 1e-6) -> float:
    """max_j |grad_j f - central difference_j f|."""
    grad = grad_f_theta(u, theta).coefficients
    base = u.coefficients
    errors = np.empty(u.n)
    for j in range(u.n):
        shift = np.zeros(u.n)
        shift[j] = h
        plus = f_theta(u.with_coefficients(base + shift), theta)
        minus = f_theta(u.with_coefficients(base - shift), theta)
        errors[j] = abs((plus - minus) / (2.0 * h) - grad[j])
    return float(errors.max())
