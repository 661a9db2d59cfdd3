# Diagnostics module for levy-ns
from levyns.core.diagnostics.functional import (
    LipschitzCheck,
    LipschitzSweep,
    f_lipschitz_check,
    f_theta,
    grad_f_theta,
    gradient_fd_error,
    hessian_f_theta,
    hessian_trace_bound,
    lipschitz_sweep,
)
from levyns.core.diagnostics.martingale import (
    CFGridPoint,
    CFVerdict,
    CharFunReport,
    IndependenceReport,
    JointCFPoint,
    MartingaleObserver,
    MartingaleSamples,
    MartingaleTask,
    independence_test,
    joint_cf_points,
    martingale_cf_test,
    martingale_samples,
)
from levyns.core.diagnostics.moments import (
    GradientMomentReport,
    MomentReport,
    closed_form_single_mode_gradient,
    gradient_constant,
    gradient_moment_report,
    horizon_sequence,
    moment_bound_report,
)
from levyns.core.diagnostics.paths import (
    CadlagReport,
    DissipationBalance,
    TailEnergy,
    cadlag_check,
    dissipation_balance,
    skorohod_upper_bound,
    tail_energy,
)

__all__ = [
    # Functional
    "LipschitzCheck",
    "LipschitzSweep",
    "f_lipschitz_check",
    "f_theta",
    "grad_f_theta",
    "gradient_fd_error",
    "hessian_f_theta",
    "hessian_trace_bound",
    "lipschitz_sweep",
    # Moment bounds
    "GradientMomentReport",
    "MomentReport",
    "closed_form_single_mode_gradient",
    "gradient_constant",
    "gradient_moment_report",
    "horizon_sequence",
    "moment_bound_report",
    # Martingale law
    "CFGridPoint",
    "CFVerdict",
    "CharFunReport",
    "IndependenceReport",
    "JointCFPoint",
    "MartingaleObserver",
    "MartingaleSamples",
    "MartingaleTask",
    "independence_test",
    "joint_cf_points",
    "martingale_cf_test",
    "martingale_samples",
    # Pathwise
    "CadlagReport",
    "DissipationBalance",
    "TailEnergy",
    "cadlag_check",
    "dissipation_balance",
    "skorohod_upper_bound",
    "tail_energy",
]
