"""Defaults and fixed formats shared across levy-ns."""
from __future__ import annotations

TOOL_NAME = "levy-ns"
TOOL_VERSION = "0.1.0"

# Snapshot files
SNAPSHOT_HEADER = "# levy-ns field v1, n={n}, theta={theta}, t={time}"
FLOAT_FORMAT = "{:.17g}"

# Noise
DEFAULT_SMALL_JUMP_CUTOFF = 1e-3
DEFAULT_BACKEND = "exact"

# Solver
DEFAULT_SCHEME = "exponential-euler"
SEMI_IMPLICIT_DT_FACTOR = 0.5  # warn when dt > factor / lambda_n

# Statistical checks
SIGMA_LEVEL = 3.0
CF_PASS_FRACTION = 0.95
FLAGGED_FRACTION_LIMIT = 0.01
STATIONARITY_LEVEL = 0.01
MIN_EFFECTIVE_SAMPLES = 100
DEFAULT_PERMUTATIONS = 999

# Sampler self-test
HILL_TOLERANCE = 0.05
HILL_MAX_FRACTION = 0.01
HILL_BIAS_TARGET = 0.01  # largest first-order relative bias of the Hill estimate

# Invariant-measure estimator
HISTOGRAM_BINS = 64
HISTOGRAM_UPPER_QUANTILE = 0.995
AUTOCORRELATION_TARGET = 0.2
MIN_STRIDE_STEPS = 10

# Exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID_CONFIG = 2
EXIT_BLOWUP_DOMINATED = 3

# Environment
LOG_ENV_VAR = "LEVY_NS_LOG"
DEFAULT_LOG_LEVEL = "WARNING"
