"""Counter-based random streams derived from one master seed.

Every stream is a Philox generator keyed by
``SeedSequence(master_seed, spawn_key=(purpose, trajectory, mode))``.
Within a (trajectory, mode) noise stream the step index is the position in
the stream, so mode j sees the same noise whatever the Galerkin size.
"""
from __future__ import annotations

from enum import Enum

import numpy as np


class StreamPurpose(Enum):
    """Disjoint stream families."""
    NOISE = 0
    INITIAL_CONDITION = 1
    PERMUTATION = 2
    SAMPLER_TEST = 3
    PROPERTY_SWEEP = 4


def make_stream(
    seed: int,
    purpose: StreamPurpose = StreamPurpose.NOISE,
    trajectory: int = 0,
    mode: int = 0,
) -> np.random.Generator:
    sequence = np.random.SeedSequence(
        entropy=int(seed), spawn_key=(purpose.value, int(trajectory), int(mode))
    )
    return np.random.Generator(np.random.Philox(sequence))


def noise_streams(seed: int, trajectory: int, n: int) -> list[np.random.Generator]:
    """One stream per mode j = 1..n of a trajectory."""
    return [make_stream(seed, StreamPurpose.NOISE, trajectory, j) for j in range(1, n + 1)]
