# Solver module for levy-ns
from levyns.core.solver.config import InitialCondition, InitialPreset, SolverConfig
from levyns.core.solver.consistency import GalerkinConsistencyReport, galerkin_consistency
from levyns.core.solver.ensemble import (
    EnsembleResult,
    SummaryObserver,
    SummaryTask,
    TrajectorySummary,
    TrajectoryTask,
    run_ensemble,
    simulate_ensemble,
)
from levyns.core.solver.records import TrajectoryRecord
from levyns.core.solver.schemes import LinearPropagator, Scheme, phi1, step
from levyns.core.solver.simulate import (
    StepObserver,
    check_hypothesis,
    noise_path_for,
    run_trajectory,
    simulate,
)

__all__ = [
    # Configuration
    "InitialCondition",
    "InitialPreset",
    "SolverConfig",
    # Schemes
    "LinearPropagator",
    "Scheme",
    "phi1",
    "step",
    # Trajectories
    "StepObserver",
    "TrajectoryRecord",
    "check_hypothesis",
    "noise_path_for",
    "run_trajectory",
    "simulate",
    # Ensembles
    "EnsembleResult",
    "SummaryObserver",
    "SummaryTask",
    "TrajectorySummary",
    "TrajectoryTask",
    "run_ensemble",
    "simulate_ensemble",
    # Consistency
    "GalerkinConsistencyReport",
    "galerkin_consistency",
]
