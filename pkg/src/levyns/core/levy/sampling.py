"""Increment generation for the scalar Levy processes L^(j) and the cylindrical L^n."""
from __future__ import annotations

import logging
import math
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.stats import levy_stable

from levyns.core.levy.measure import LevyMeasureSpec
from levyns.core.levy.noise import LevyNoiseSpec, NoiseBackend

logger = logging.getLogger(__name__)

# cap on the number of compound-Poisson jumps held in memory at once
_JUMP_CHUNK = 4_000_000


def sample_stable(
    alpha: float,
    scale: float,
    rng: np.random.Generator,
    size: Optional[Union[int, tuple[int, ...]]] = None,
) -> Union[float, np.ndarray]:
    """Symmetric alpha-stable draw(s) with CF exp(-scale^alpha |xi|^alpha).

    Chambers-Mallows-Stuck via scipy; deterministic given the generator state.
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")
    draws = levy_stable.rvs(alpha, 0.0, loc=0.0, scale=scale, size=size, random_state=rng)
    if size is None:
        return float(draws)
    return np.asarray(draws, dtype=float)


class CompoundPoissonSampler:
    """Levy-Ito sampler: jumps with |y| <= delta are replaced by their compensator.

    For the symmetric families the compensator is zero, so an increment over dt
    is a compound-Poisson sum of jumps with delta < |y| <= R, drawn by inverting
    the truncated Pareto tail of nu.
    """

    def __init__(self, measure: LevyMeasureSpec, cutoff: float) -> None:
        self.measure = measure
        self.cutoff = cutoff
        self.jump_rate = measure.tail_mass(cutoff)
        a = measure.alpha
        self._lo = cutoff ** (-a)
        self._hi = 0.0 if math.isinf(measure.radius) else measure.radius ** (-a)

    def bias_bound(self, dt: float) -> float:
        """(dt int_{|y|<=delta} y^2 nu(dy))^(1/2), the L2 size of the dropped small jumps."""
        return math.sqrt(dt * self.measure.small_jump_second_moment(self.cutoff))

    def cf_bias_factor(self, dt: float, xi: float) -> float:
        """Relative CF bias bound expm1(dt xi^2/2 int_{|y|<=delta} y^2 nu(dy)).

        The increment CF is exp(dt psi(xi)) times exp(dt int_{|y|<=delta} (1 - cos xi y) nu(dy)),
        and 1 - cos(xi y) <= (xi y)^2 / 2.
        """
        return math.expm1(0.5 * dt * xi * xi * self.measure.small_jump_second_moment(self.cutoff))

    def draw(
        self, dt: float, size: int, rng: np.random.Generator, track_big: bool = False
    ) -> tuple[np.ndarray, list[tuple[int, float]]]:
        """``size`` independent increments over dt, plus (index, y) for every |y| > 1."""
        out = np.zeros(size)
        big: list[tuple[int, float]] = []
        rate = self.jump_rate * dt
        if rate <= 0.0 or size == 0:
            return out, big
        chunk = max(1, int(_JUMP_CHUNK / max(rate, 1.0)))
        a = self.measure.alpha
        for start in range(0, size, chunk):
            stop = min(size, start + chunk)
            counts = rng.poisson(rate, size=stop - start)
            total = int(counts.sum())
            if total == 0:
                continue
            u = rng.random(total)
            signs = np.where(rng.random(total) < 0.5, -1.0, 1.0)
            jumps = signs * (self._lo - u * (self._lo - self._hi)) ** (-1.0 / a)
            owner = np.repeat(np.arange(stop - start), counts)
            out[start:stop] = np.bincount(owner, weights=jumps, minlength=stop - start)
            if track_big:
                mask = np.abs(jumps) > 1.0
                big.extend(
                    (int(start + i), float(y)) for i, y in zip(owner[mask], jumps[mask])
                )
        return out, big


def unit_increments(
    spec: LevyNoiseSpec,
    dt: float,
    size: int,
    rng: np.random.Generator,
    track_big: bool = False,
) -> tuple[np.ndarray, list[tuple[int, float]]]:
    """Increments of one scalar process L^(j) (beta = 1) over dt."""
    if not spec.enabled:
        return np.zeros(size), []
    if spec.backend is NoiseBackend.EXACT:
        scale = spec.measure.stable_scale(dt)
        return np.atleast_1d(sample_stable(spec.measure.alpha, scale, rng, size=size)), []
    sampler = CompoundPoissonSampler(spec.measure, spec.small_jump_cutoff)
    return sampler.draw(dt, size, rng, track_big=track_big)


def bias_bound(spec: LevyNoiseSpec, dt: float) -> Optional[float]:
    """Small-jump truncation bias per mode; None for the exact backend."""
    if spec.backend is NoiseBackend.EXACT or not spec.enabled:
        return None
    return CompoundPoissonSampler(spec.measure, spec.small_jump_cutoff).bias_bound(dt)


@dataclass(frozen=True)
class NoiseIncrement:
    """Per-mode jumps beta_j (L^(j)_{t+dt} - L^(j)_t) over one step."""
    jumps: np.ndarray
    dt: float
    big_jumps: tuple[tuple[int, float], ...] = ()
    bias_bound: Optional[float] = None

    @property
    def n(self) -> int:
        return int(self.jumps.shape[0])

    def to_dict(self) -> dict:
        return {
            "jumps": self.jumps.tolist(),
            "dt": self.dt,
            "big_jumps": [list(j) for j in self.big_jumps],
            "bias_bound": self.bias_bound,
        }


def increment(
    spec: LevyNoiseSpec, n: int, dt: float, rng: np.random.Generator
) -> NoiseIncrement:
    """n independent per-mode increments drawn from a single generator.

    Big jumps are logged as (mode j, y) with |y| > 1 when the backend can see them.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    betas = spec.betas.values(n)
    raw, big = unit_increments(spec, dt, n, rng, track_big=True)
    return NoiseIncrement(
        jumps=betas * raw,
        dt=dt,
        big_jumps=tuple((i + 1, y) for i, y in big),
        bias_bound=bias_bound(spec, dt),
    )


@dataclass
class NoisePath:
    """Increments for every step of one trajectory, drawn stream-per-mode."""
    increments: np.ndarray
    dt: float
    big_jumps: list[tuple[int, int, float]] = field(default_factory=list)
    bias_bound: Optional[float] = None
    tracks_big_jumps: bool = False

    @property
    def n_steps(self) -> int:
        return int(self.increments.shape[0])

    def at(self, step: int) -> NoiseIncrement:
        lo = bisect_left(self.big_jumps, (step,))
        hi = bisect_left(self.big_jumps, (step + 1,))
        jumps = tuple((j, y) for _, j, y in self.big_jumps[lo:hi])
        return NoiseIncrement(self.increments[step], self.dt, jumps, self.bias_bound)

    def big_jump_counts(self) -> np.ndarray:
        """Number of logged big jumps per step."""
        counts = np.zeros(self.n_steps, dtype=np.int64)
        for step, _, _ in self.big_jumps:
            counts[step] += 1
        return counts


def sample_path(
    spec: LevyNoiseSpec,
    n: int,
    dt: float,
    n_steps: int,
    streams: Sequence[np.random.Generator],
) -> NoisePath:
    """Noise for n_steps steps; mode j draws only from ``streams[j - 1]``."""
    if len(streams) < n:
        raise ValueError(f"Need {n} mode streams, got {len(streams)}")
    betas = spec.betas.values(n)
    increments = np.zeros((n_steps, n))
    big_jumps: list[tuple[int, int, float]] = []
    if spec.enabled and n_steps > 0:
        for j in range(n):
            if betas[j] == 0.0:
                continue
            raw, big = unit_increments(spec, dt, n_steps, streams[j], track_big=True)
            increments[:, j] = betas[j] * raw
            big_jumps.extend((step, j + 1, y) for step, y in big)
    big_jumps.sort()
    return NoisePath(
        increments=increments,
        dt=dt,
        big_jumps=big_jumps,
        bias_bound=bias_bound(spec, dt),
        tracks_big_jumps=spec.enabled and spec.backend is NoiseBackend.LEVY_ITO,
    )
