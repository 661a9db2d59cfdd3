"""Shared fixtures for the levy-ns test suite."""
from __future__ import annotations

import textwrap
from pathlib import Path

import pytest

from levyns.core.levy import CoefficientSequence, LevyMeasureSpec, LevyNoiseSpec, NoiseBackend
from levyns.core.solver import InitialCondition, SolverConfig
from levyns.core.spectral import build_basis

BASE_CONFIG = """
[spectral]
n = 8

[noise]
alpha = 1.5
beta_rule = "power:2"
theta = 1.0

[solver]
dt = 0.001
T = 0.0
seed = 7

[solver.initial]
preset = "single-mode"
wave = [1, 0]
amplitude = 1.0
"""


@pytest.fixture
def basis16():
    return build_basis(16)


@pytest.fixture
def stable_noise():
    """alpha = 1.5, beta_j = j^-2, theta = 1: H_theta = 4 + pi^2/6."""
    return LevyNoiseSpec(
        measure=LevyMeasureSpec(alpha=1.5),
        betas=CoefficientSequence.power(2.0),
        theta=1.0,
    )


@pytest.fixture
def noise_off(stable_noise):
    return LevyNoiseSpec(
        measure=stable_noise.measure,
        betas=stable_noise.betas,
        theta=stable_noise.theta,
        enabled=False,
    )


@pytest.fixture
def levy_ito_noise():
    """Every nonzero increment is a logged jump with |y| > 1."""
    return LevyNoiseSpec(
        measure=LevyMeasureSpec(alpha=1.5),
        betas=CoefficientSequence.power(2.0),
        theta=1.0,
        backend=NoiseBackend.LEVY_ITO,
        small_jump_cutoff=1.0,
    )


@pytest.fixture
def make_config(stable_noise):
    """Factory for small solver configs; keyword arguments override the defaults."""

    def make(**overrides) -> SolverConfig:
        values = dict(
            n=4,
            dt=1e-3,
            horizon=0.1,
            noise=stable_noise,
            initial=InitialCondition.single_mode((1, 0)),
            seed=11,
        )
        values.update(overrides)
        return SolverConfig(**values)

    return make


@pytest.fixture
def write_config(tmp_path):
    """Write TOML text (default BASE_CONFIG) under tmp_path and return the path."""

    def write(text: str = BASE_CONFIG, name: str = "run.toml") -> Path:
        path = tmp_path / name
        path.write_text(textwrap.dedent(text), encoding="utf-8")
        return path

    return write


@pytest.fixture
def base_config_text() -> str:
    return BASE_CONFIG
