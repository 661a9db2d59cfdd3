# Levy noise module for levy-ns
from levyns.core.levy.checks import (
    AgreementPoint,
    BackendAgreementReport,
    CFCheckPoint,
    EmpiricalCF,
    FractionalMomentReport,
    IncrementCFReport,
    KSResult,
    SamplerCheck,
    SamplerTestReport,
    backend_agreement_check,
    compare_cf,
    empirical_cf,
    fractional_moment_check,
    hill_bias_slope,
    hill_check,
    hill_estimator,
    hill_tail_count,
    increment_cf_check,
    moment_growth,
    sampler_test,
    stable_tail_coefficients,
    two_sample_ks,
    z_score,
)
from levyns.core.levy.coefficients import CoefficientRule, CoefficientSequence
from levyns.core.levy.measure import LevyFamily, LevyMeasureSpec
from levyns.core.levy.noise import HThetaResult, LevyNoiseSpec, NoiseBackend, h_theta
from levyns.core.levy.sampling import (
    CompoundPoissonSampler,
    NoiseIncrement,
    NoisePath,
    bias_bound,
    increment,
    sample_path,
    sample_stable,
    unit_increments,
)
from levyns.core.levy.streams import StreamPurpose, make_stream, noise_streams
from levyns.core.levy.symbol import increment_cf, levy_symbol, stable_char_exponent

__all__ = [
    # Measures and coefficients
    "LevyFamily",
    "LevyMeasureSpec",
    "CoefficientRule",
    "CoefficientSequence",
    # Noise specification
    "LevyNoiseSpec",
    "NoiseBackend",
    "HThetaResult",
    "h_theta",
    # Symbol
    "levy_symbol",
    "stable_char_exponent",
    "increment_cf",
    # Sampling
    "CompoundPoissonSampler",
    "NoiseIncrement",
    "NoisePath",
    "bias_bound",
    "increment",
    "sample_path",
    "sample_stable",
    "unit_increments",
    # Streams
    "StreamPurpose",
    "make_stream",
    "noise_streams",
    # Checks
    "AgreementPoint",
    "BackendAgreementReport",
    "CFCheckPoint",
    "EmpiricalCF",
    "FractionalMomentReport",
    "IncrementCFReport",
    "KSResult",
    "SamplerCheck",
    "SamplerTestReport",
    "backend_agreement_check",
    "compare_cf",
    "empirical_cf",
    "fractional_moment_check",
    "hill_bias_slope",
    "hill_check",
    "hill_estimator",
    "hill_tail_count",
    "increment_cf_check",
    "moment_growth",
    "sampler_test",
    "stable_tail_coefficients",
    "two_sample_ks",
    "z_score",
]
