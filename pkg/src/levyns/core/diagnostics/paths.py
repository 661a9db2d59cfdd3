"""Pathwise diagnostics on trajectory records."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from levyns.core.levy.noise import LevyNoiseSpec
from levyns.core.solver.records import TrajectoryRecord
from levyns.core.spectral.basis import build_basis
from levyns.core.spectral.nonlinear import get_operator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TailEnergy:
    """sup_s sum_{j>=m} a_j^2/lambda_j^2 against lambda_m^-2 sup_s ||u_s||^2."""
    m: int
    value: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.value <= self.bound * (1.0 + 1e-12)

    def to_dict(self) -> dict:
        return {"m": self.m, "value": self.value, "bound": self.bound, "holds": self.holds}


def tail_energy(record: TrajectoryRecord, m: int) -> TailEnergy:
    """Spectral tail over the recorded snapshots; both sups run over the same times."""
    if not 1 <= m <= record.n:
        raise ValueError(f"m must lie in 1..{record.n}, got {m}")
    lam = record.basis.eigenvalues
    coeffs = record.snapshots
    tail = np.sum(coeffs[:, m - 1:] ** 2 / lam[m - 1:] ** 2, axis=1)
    l2_sq = np.sum(coeffs ** 2, axis=1)
    return TailEnergy(m=m, value=float(tail.max()), bound=float(l2_sq.max() / lam[m - 1] ** 2))


def skorohod_upper_bound(a: TrajectoryRecord, b: TrajectoryRecord) -> float:
    """int_0^inf sup_{t<=r} (||a_t - b_t||_{-1} ^ 1) e^{-r} dr with the identity time change.

    The running sup is piecewise constant between snapshot times, so the integral
    is sum_k G_k (e^{-t_k} - e^{-t_{k+1}}) + G_K e^{-t_K}. Records on different
    Galerkin sizes are compared on the larger basis.
    """
    ta, tb = a.snapshot_times, b.snapshot_times
    if ta.shape != tb.shape or not np.allclose(ta, tb, rtol=0.0, atol=1e-12):
        raise ValueError("Records do not share a snapshot time grid")
    n = max(a.n, b.n)
    lam = build_basis(n).eigenvalues
    ca = np.zeros((ta.shape[0], n))
    cb = np.zeros((tb.shape[0], n))
    ca[:, : a.n] = a.snapshots
    cb[:, : b.n] = b.snapshots
    distance = np.sqrt(np.sum((ca - cb) ** 2 / lam, axis=1))
    running = np.maximum.accumulate(np.minimum(distance, 1.0))
    weights = np.exp(-ta)
    body = np.sum(running[:-1] * (weights[:-1] - weights[1:]))
    return float(body + running[-1] * weights[-1])


@dataclass(frozen=True)
class DissipationBalance:
    """f(u_T) - f(u_0) against -theta int_0^T ||grad u||^2/(||u||^2+1)^(1-theta/2) ds."""
    change: float
    dissipation: float

    @property
    def discrepancy(self) -> float:
        return self.change + self.dissipation

    def to_dict(self) -> dict:
        return {"change": self.change, "dissipation": self.dissipation, "discrepancy": self.discrepancy}


def dissipation_balance(record: TrajectoryRecord, theta: float) -> DissipationBalance:
    """Noise-off energy identity for f; trapezoidal in time."""
    integrand = record.h1_norm ** 2 / (record.l2_norm ** 2 + 1.0) ** (1.0 - theta / 2.0)
    f = (record.l2_norm ** 2 + 1.0) ** (theta / 2.0)
    return DissipationBalance(
        change=float(f[-1] - f[0]),
        dissipation=float(theta * trapezoid(integrand, dx=record.dt)),
    )


@dataclass(frozen=True)
class CadlagReport:
    """Where the field jumps against where big jumps were logged."""
    jump_steps: tuple[int, ...]
    logged_steps: tuple[int, ...]
    spurious: tuple[int, ...]
    missed: tuple[int, ...]
    max_excess: float
    checked_steps: int = 0

    @property
    def holds(self) -> bool:
        return not self.spurious and not self.missed and self.max_excess <= 0.0

    def to_dict(self) -> dict:
        return {
            "jump_steps": list(self.jump_steps),
            "logged_steps": list(self.logged_steps),
            "spurious": list(self.spurious),
            "missed": list(self.missed),
            "max_excess": self.max_excess,
            "holds": self.holds,
        }


def cadlag_check(record: TrajectoryRecord, noise: LevyNoiseSpec, tolerance: float = 1e-12) -> CadlagReport:
    """Jumps of the recorded path sit exactly at steps with logged big jumps.

    Needs every step as a snapshot and a backend that logs every nonzero jump
    (levy-ito with small_jump_cutoff = 1). The drift of one step moves the field
    by at most ||(1 - e^{-lambda dt}) a|| + dt ||B(a)||, so a step is a jump when
    ||a_{k+1} - a_k|| exceeds that. Logged steps must show a jump whenever the
    logged increment is larger than twice the drift, and the change of ||u||
    may not exceed sum beta_j |y_j| plus the drift.
    """
    if not np.array_equal(record.snapshot_steps, np.arange(record.n_steps + 1)):
        raise ValueError("cadlag_check needs a record with snapshot_stride = 1")
    if not record.tracks_big_jumps:
        raise ValueError("cadlag_check needs a backend that logs individual jumps")
    basis = record.basis
    operator = get_operator(basis)
    lam = basis.eigenvalues
    betas = noise.betas.values(record.n)
    dt = record.dt

    logged: dict[int, float] = {}
    largest: dict[int, float] = {}
    for step, j, y in record.big_jump_log:
        size = betas[j - 1] * abs(y)
        logged[step] = logged.get(step, 0.0) + size
        largest[step] = max(largest.get(step, 0.0), size)

    jump_steps, spurious, missed = [], [], []
    max_excess = 0.0 if record.n_steps == 0 else -np.inf
    coeffs = record.snapshots
    for k in range(record.n_steps):
        a, a_next = coeffs[k], coeffs[k + 1]
        drift = float(
            np.linalg.norm(-np.expm1(-lam * dt) * a) + dt * np.linalg.norm(operator.apply(a))
        )
        drift = drift * (1.0 + 1e-9) + tolerance
        moved = float(np.linalg.norm(a_next - a))
        size = logged.get(k + 1, 0.0)
        if moved > drift:
            jump_steps.append(k + 1)
            if size == 0.0:
                spurious.append(k + 1)
        elif largest.get(k + 1, 0.0) > 2.0 * drift:
            missed.append(k + 1)
        excess = abs(record.l2_norm[k + 1] - record.l2_norm[k]) - (size + drift)
        max_excess = max(max_excess, excess)

    report = CadlagReport(
        jump_steps=tuple(jump_steps),
        logged_steps=tuple(sorted(logged)),
        spurious=tuple(spurious),
        missed=tuple(missed),
        max_excess=float(max_excess),
        checked_steps=record.n_steps,
    )
    if not report.holds:
        logger.warning(
            f"Cadlag check failed: {len(spurious)} spurious, {len(missed)} missed jumps"
        )
    return report
