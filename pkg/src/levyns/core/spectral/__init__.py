# Spectral module for levy-ns
from levyns.core.spectral.basis import (
    Basis,
    BasisMode,
    Phase,
    WaveVector,
    build_basis,
)
from levyns.core.spectral.field import SpectralField, embed, norm, project
from levyns.core.spectral.nonlinear import (
    NonlinearBackend,
    NonlinearOperator,
    get_operator,
    nonlinear_term,
    weak_advection,
)
from levyns.core.spectral.realspace import evaluate, evaluate_at, gradient_at, uniform_grid
from levyns.core.spectral.snapshot import read_snapshot, write_snapshot

__all__ = [
    # Basis
    "Basis",
    "BasisMode",
    "Phase",
    "WaveVector",
    "build_basis",
    # Fields
    "SpectralField",
    "embed",
    "norm",
    "project",
    # Nonlinearity
    "NonlinearBackend",
    "NonlinearOperator",
    "get_operator",
    "nonlinear_term",
    "weak_advection",
    # Real space
    "evaluate",
    "evaluate_at",
    "gradient_at",
    "uniform_grid",
    # Files
    "read_snapshot",
    "write_snapshot",
]
