# Core modules for levy-ns
from levyns.core.errors import (
    AliasingError,
    BlowUpError,
    ConfigError,
    HThetaDivergenceError,
    LevyNSError,
    QuadratureError,
    ReportSchemaError,
)

# Spectral Galerkin basis
from levyns.core.spectral import Basis, SpectralField, build_basis

# Levy noise
from levyns.core.levy import LevyMeasureSpec, LevyNoiseSpec, h_theta

# Solver
from levyns.core.solver import SolverConfig, simulate, simulate_ensemble

# Run configuration
from levyns.core.config import RunConfig, load_config, validate

__all__ = [
    # Errors
    "LevyNSError",
    "ConfigError",
    "HThetaDivergenceError",
    "AliasingError",
    "QuadratureError",
    "BlowUpError",
    "ReportSchemaError",
    # Spectral
    "Basis",
    "SpectralField",
    "build_basis",
    # Levy
    "LevyMeasureSpec",
    "LevyNoiseSpec",
    "h_theta",
    # Solver
    "SolverConfig",
    "simulate",
    "simulate_ensemble",
    # Config
    "RunConfig",
    "load_config",
    "validate",
]
