"""Reading, hashing and validating run configs."""
from __future__ import annotations

import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from pydantic import ValidationError

from levyns.core.config.models import RunConfig
from levyns.core.constants import SEMI_IMPLICIT_DT_FACTOR
from levyns.core.errors import ConfigError
from levyns.core.levy.coefficients import CoefficientSequence
from levyns.core.levy.measure import LevyMeasureSpec
from levyns.core.levy.noise import HThetaResult, LevyNoiseSpec, NoiseBackend, h_theta
from levyns.core.solver.config import InitialCondition, InitialPreset, SolverConfig
from levyns.core.solver.schemes import Scheme
from levyns.core.spectral.basis import Phase, WaveVector, build_basis
from levyns.core.spectral.nonlinear import NonlinearBackend

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)


def config_hash(text: str) -> str:
    """SHA-256 of the raw config text."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _format_errors(error: ValidationError) -> list[str]:
    messages = []
    for item in error.errors():
        where = ".".join(str(part) for part in item["loc"]) or "config"
        messages.append(f"{where}: {item['msg']}")
    return messages


@dataclass(frozen=True)
class LoadedConfig:
    """A parsed config with the text it came from."""
    config: RunConfig
    text: str
    source: Optional[str] = None

    @property
    def hash(self) -> str:
        return config_hash(self.text)


def parse_config(text: str, source: Optional[str] = None) -> LoadedConfig:
    """Parse TOML text into a RunConfig; every field error is reported at once."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError([f"{source or 'config'}: not valid TOML: {e}"]) from e
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(_format_errors(e)) from e
    return LoadedConfig(config, text, source)


def load_config(path: Union[str, Path]) -> LoadedConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError([f"{path}: cannot read config: {e}"]) from e
    logger.info(f"Loaded config {path}")
    return parse_config(text, str(path))


def config_from_dict(data: dict) -> LoadedConfig:
    """Programmatic configs are hashed through their canonical JSON form."""
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(_format_errors(e)) from e
    text = json.dumps(config.model_dump(mode="json"), sort_keys=True)
    return LoadedConfig(config, text)


def to_noise_spec(config: RunConfig) -> LevyNoiseSpec:
    noise = config.noise
    return LevyNoiseSpec(
        measure=LevyMeasureSpec(alpha=noise.alpha, intensity=noise.intensity, truncation=noise.truncation),
        betas=CoefficientSequence.parse(noise.beta_rule),
        theta=noise.theta,
        backend=NoiseBackend(noise.backend),
        small_jump_cutoff=noise.small_jump_cutoff,
        enabled=noise.enabled,
    )


def to_initial_condition(config: RunConfig) -> InitialCondition:
    initial = config.solver.initial
    return InitialCondition(
        preset=InitialPreset(initial.preset),
        wave=tuple(initial.wave),
        phase=Phase(initial.phase),
        amplitude=initial.amplitude,
        gamma=initial.gamma,
        norm=initial.norm,
        path=initial.path,
    )


def to_solver_config(
    config: RunConfig, seed: Optional[int] = None, noise: Optional[LevyNoiseSpec] = None
) -> SolverConfig:
    solver = config.solver
    return SolverConfig(
        n=config.spectral.n,
        dt=solver.dt,
        horizon=solver.T,
        noise=to_noise_spec(config) if noise is None else noise,
        initial=to_initial_condition(config),
        scheme=Scheme(solver.scheme),
        seed=solver.seed if seed is None else seed,
        snapshot_stride=solver.snapshot_stride,
        nonlinear_backend=NonlinearBackend(config.spectral.nonlinear_backend),
    )


@dataclass(frozen=True)
class ValidatedConfig:
    """A config that passed every rule, ready to run."""
    loaded: LoadedConfig
    solver: SolverConfig
    h_theta: HThetaResult
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def config(self) -> RunConfig:
        return self.loaded.config

    @property
    def hash(self) -> str:
        return self.loaded.hash


def _initial_errors(config: RunConfig) -> list[str]:
    initial = config.solver.initial
    errors = []
    if initial.preset == "single-mode":
        try:
            wave = WaveVector.canonical(*initial.wave)
            build_basis(config.spectral.n).index_of(wave, Phase(initial.phase))
        except (KeyError, ValueError):
            errors.append(
                f"solver.initial.wave: {tuple(initial.wave)} ({initial.phase}) is not among the first "
                f"{config.spectral.n} modes"
            )
    if initial.preset == "snapshot":
        if initial.path is None:
            errors.append("solver.initial.path: required by the snapshot preset")
        elif not Path(initial.path).is_file():
            errors.append(f"solver.initial.path: no such file {initial.path}")
    return errors


def _placeholder_noise(config: RunConfig) -> LevyNoiseSpec:
    """Noise-off stand-in so the solver fields are still checked when the noise section is invalid."""
    return LevyNoiseSpec(
        measure=LevyMeasureSpec(alpha=config.noise.alpha),
        betas=CoefficientSequence.from_values([0.0]),
        theta=config.noise.theta,
        enabled=False,
    )


def validate(loaded: LoadedConfig, seed: Optional[int] = None) -> ValidatedConfig:
    """Cross-field rules on top of the field validation done at parse time.

    Raises ConfigError with every violation; H_theta is evaluated and kept.
    """
    config = loaded.config
    errors: list[str] = []
    warnings: list[str] = []

    noise: Optional[LevyNoiseSpec] = None
    result: Optional[HThetaResult] = None
    try:
        noise = to_noise_spec(config)
    except ValueError as e:
        errors.append(f"noise: {e}")

    if noise is not None:
        result = h_theta(noise)
        if result.diverges:
            errors.append(f"noise: H_theta diverges ({result.reason})")
        betas = noise.betas
        if betas.length is not None and betas.length < config.spectral.n:
            errors.append(
                f"noise.beta_rule: {betas.length} explicit coefficients for n={config.spectral.n} modes"
            )
    errors.extend(_initial_errors(config))

    solver_cfg: Optional[SolverConfig] = None
    try:
        solver_cfg = to_solver_config(config, seed, noise=noise or _placeholder_noise(config))
    except ValueError as e:
        errors.append(f"solver: {e}")

    if config.solver.scheme == Scheme.SEMI_IMPLICIT_EULER.value:
        lam_n = float(build_basis(config.spectral.n).eigenvalues[-1])
        limit = SEMI_IMPLICIT_DT_FACTOR / lam_n
        if config.solver.dt > limit:
            warnings.append(
                f"solver.dt: {config.solver.dt:g} exceeds {SEMI_IMPLICIT_DT_FACTOR:g}/lambda_n = {limit:.3g}; "
                "the semi-implicit scheme will damp high modes inaccurately"
            )

    if errors:
        raise ConfigError(errors)
    for warning in warnings:
        logger.warning(warning)
    logger.info(f"Config valid, H_theta = {result.value:.6g}")
    return ValidatedConfig(loaded, solver_cfg, result, tuple(warnings))
