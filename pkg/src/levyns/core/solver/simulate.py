"""Single-trajectory simulation of the Galerkin SDE."""
from __future__ import annotations

import logging
from typing import Optional, Protocol, Sequence

import numpy as np

from levyns.core.errors import BlowUpError, HThetaDivergenceError
from levyns.core.levy.noise import h_theta
from levyns.core.levy.sampling import NoisePath, sample_path
from levyns.core.levy.streams import noise_streams
from levyns.core.solver.config import SolverConfig
from levyns.core.solver.records import TrajectoryRecord
from levyns.core.solver.schemes import LinearPropagator
from levyns.core.spectral.nonlinear import get_operator

logger = logging.getLogger(__name__)


class StepObserver(Protocol):
    """Per-step callback.

    Called once per grid time k = 0..K with the state a_k, the projected
    advection B(a_k) and the noise increment that landed at t_k (zeros at k = 0).
    Arrays are only valid for the duration of the call.
    """

    def observe(
        self, step: int, time: float, coefficients: np.ndarray, nonlinear: np.ndarray, jumps: np.ndarray
    ) -> None: ...


def check_hypothesis(config: SolverConfig) -> None:
    """Reject noise for which assumption (H_theta) fails."""
    if not config.noise.enabled:
        return
    result = h_theta(config.noise)
    if result.diverges:
        raise HThetaDivergenceError(f"H_theta diverges: {result.reason}")


def noise_path_for(config: SolverConfig, trajectory: int, n: Optional[int] = None) -> NoisePath:
    """Noise of one trajectory; modes draw from disjoint (trajectory, mode) streams."""
    n = config.n if n is None else n
    streams = noise_streams(config.seed, trajectory, n)
    return sample_path(config.noise, n, config.dt, config.n_steps, streams)


def run_trajectory(
    config: SolverConfig,
    trajectory: int = 0,
    observers: Sequence[StepObserver] = (),
    noise: Optional[NoisePath] = None,
) -> TrajectoryRecord:
    """Integrate one trajectory over [0, T].

    Per-step scalars are always recorded; fields every ``snapshot_stride`` steps
    and at the final step. Raises BlowUpError on a nonfinite state; the error
    carries the partial record.
    """
    basis = config.basis
    n, dt, theta = config.n, config.dt, config.theta
    n_steps = config.n_steps
    path = noise if noise is not None else noise_path_for(config, trajectory)
    if path.increments.shape != (n_steps, n):
        raise ValueError(
            f"Noise path has shape {path.increments.shape}, expected {(n_steps, n)}"
        )

    operator = get_operator(basis, config.nonlinear_backend)
    propagator = LinearPropagator(basis.eigenvalues, dt, config.scheme)
    lam = basis.eigenvalues

    times = np.arange(n_steps + 1) * dt
    l2 = np.zeros(n_steps + 1)
    h1 = np.zeros(n_steps + 1)
    snapshot_steps = sorted(set(range(0, n_steps + 1, config.snapshot_stride)) | {n_steps})
    snapshot_slot = {k: i for i, k in enumerate(snapshot_steps)}
    snapshots = np.zeros((len(snapshot_steps), n))

    a = np.array(config.initial_field().coefficients)
    jumps = np.zeros(n)
    reached = n_steps
    blowup: Optional[int] = None
    for k in range(n_steps + 1):
        nonlinear = operator.apply(a)
        l2[k] = np.sqrt(np.dot(a, a))
        h1[k] = np.sqrt(np.dot(lam * a, a))
        if k in snapshot_slot:
            snapshots[snapshot_slot[k]] = a
        for observer in observers:
            observer.observe(k, float(times[k]), a, nonlinear, jumps)
        if k == n_steps:
            break
        jumps = path.increments[k]
        a = propagator.advance(a, nonlinear, jumps)
        if not np.all(np.isfinite(a)):
            blowup = k + 1
            reached = k
            break

    big_jumps = np.zeros(n_steps + 1, dtype=np.int64)
    log = [(step + 1, j, y) for step, j, y in path.big_jumps if step < reached]
    for step, _, _ in log:
        big_jumps[step] += 1

    keep = [i for i, k in enumerate(snapshot_steps) if k <= reached]
    record = TrajectoryRecord(
        n=n,
        dt=dt,
        theta=theta,
        times=times[: reached + 1],
        l2_norm=l2[: reached + 1],
        h1_norm=h1[: reached + 1],
        f_theta=(l2[: reached + 1] ** 2 + 1.0) ** (theta / 2.0),
        big_jumps=big_jumps[: reached + 1],
        snapshot_steps=np.array([snapshot_steps[i] for i in keep], dtype=np.int64),
        snapshots=snapshots[keep],
        big_jump_log=log,
        tracks_big_jumps=path.tracks_big_jumps,
        trajectory=trajectory,
        blowup_step=blowup,
    )
    if blowup is not None:
        logger.error(f"Trajectory {trajectory} blew up at step {blowup}")
        raise BlowUpError(blowup, trajectory, record)
    return record


def simulate(config: SolverConfig, observers: Sequence[StepObserver] = ()) -> TrajectoryRecord:
    """One trajectory (index 0) of the configured run; deterministic given the seed."""
    check_hypothesis(config)
    logger.info(
        f"Simulating n={config.n}, dt={config.dt:g}, T={config.horizon:g}, "
        f"scheme={config.scheme.value}, seed={config.seed}"
    )
    return run_trajectory(config, 0, observers)
