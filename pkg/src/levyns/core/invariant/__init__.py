# Invariant measure module for levy-ns
from levyns.core.invariant.measure import (
    EmpiricalMeasure,
    Histogram,
    HistogramEdges,
    SamplingObserver,
    SamplingTask,
    adaptive_stride,
    kb_estimate,
    kb_windows,
    lag_autocorrelation,
)
from levyns.core.invariant.observables import (
    BaseObservable,
    EnergyBandObservable,
    FThetaObservable,
    H1ThetaObservable,
    L2NormObservable,
    ModeCoeffObservable,
    ObservableKind,
    ObservableRegistry,
    ObservableSpec,
    observable_registry,
)
from levyns.core.invariant.sensitivity import (
    SensitivityEntry,
    SensitivityReport,
    initial_condition_sensitivity,
)
from levyns.core.invariant.stationarity import (
    StationarityReport,
    WindowComparison,
    ks_distance,
    window_stationarity_test,
)

__all__ = [
    # Observables
    "BaseObservable",
    "EnergyBandObservable",
    "FThetaObservable",
    "H1ThetaObservable",
    "L2NormObservable",
    "ModeCoeffObservable",
    "ObservableKind",
    "ObservableRegistry",
    "ObservableSpec",
    "observable_registry",
    # Empirical measures
    "EmpiricalMeasure",
    "Histogram",
    "HistogramEdges",
    "SamplingObserver",
    "SamplingTask",
    "adaptive_stride",
    "kb_estimate",
    "kb_windows",
    "lag_autocorrelation",
    # Stationarity
    "StationarityReport",
    "WindowComparison",
    "ks_distance",
    "window_stationarity_test",
    # Sensitivity
    "SensitivityEntry",
    "SensitivityReport",
    "initial_condition_sensitivity",
]
