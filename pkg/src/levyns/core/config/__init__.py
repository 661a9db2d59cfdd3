# Run configuration module for levy-ns
from levyns.core.config.loader import (
    LoadedConfig,
    ValidatedConfig,
    config_from_dict,
    config_hash,
    load_config,
    parse_config,
    to_initial_condition,
    to_noise_spec,
    to_solver_config,
    validate,
)
from levyns.core.config.models import (
    DiagnosticsSection,
    InitialSection,
    InvariantSection,
    NoiseSection,
    RunConfig,
    SolverSection,
    SpectralSection,
)

__all__ = [
    # Models
    "DiagnosticsSection",
    "InitialSection",
    "InvariantSection",
    "NoiseSection",
    "RunConfig",
    "SolverSection",
    "SpectralSection",
    # Loading and validation
    "LoadedConfig",
    "ValidatedConfig",
    "config_from_dict",
    "config_hash",
    "load_config",
    "parse_config",
    "to_initial_condition",
    "to_noise_spec",
    "to_solver_config",
    "validate",
]
