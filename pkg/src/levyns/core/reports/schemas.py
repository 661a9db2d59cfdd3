"""Column layouts of every CSV report, one header row each."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

HASH_COLUMN = "config_hash"


class ReportKind(Enum):
    TRAJECTORY = "trajectory"
    ENSEMBLE = "ensemble"
    MOMENTS = "moments"
    GRADIENT_MOMENTS = "gradient-moments"
    CHARFUN = "cf"
    INDEPENDENCE = "independence"
    MEASURE = "measure"
    STATIONARITY = "stationarity"
    SENSITIVITY = "sensitivity"
    SAMPLER = "sampler"
    PLOT = "plot"

    @property
    def description(self) -> str:
        descriptions = {
            ReportKind.TRAJECTORY: "per-step scalars of one trajectory",
            ReportKind.ENSEMBLE: "per-trajectory horizon statistics",
            ReportKind.MOMENTS: "both terms of the moment bound per horizon",
            ReportKind.GRADIENT_MOMENTS: "gradient moment per horizon with its bound",
            ReportKind.CHARFUN: "martingale increment CF against the Levy CF",
            ReportKind.INDEPENDENCE: "joint CF against the product of marginals",
            ReportKind.MEASURE: "histograms of the empirical invariant measure",
            ReportKind.STATIONARITY: "KS distances between time windows",
            ReportKind.SENSITIVITY: "KS distances between initial conditions",
            ReportKind.SAMPLER: "noise sampler checks",
            ReportKind.PLOT: "long-format series for plotting",
        }
        return descriptions[self]


@dataclass(frozen=True)
class ReportSchema:
    kind: ReportKind
    columns: tuple[str, ...]
    hashed: bool = True

    @property
    def header(self) -> tuple[str, ...]:
        return (*self.columns, HASH_COLUMN) if self.hashed else self.columns


SCHEMAS: dict[ReportKind, ReportSchema] = {
    schema.kind: schema
    for schema in (
        ReportSchema(ReportKind.TRAJECTORY, ("t", "l2_norm", "h1_norm", "f_theta", "big_jumps")),
        ReportSchema(
            ReportKind.ENSEMBLE,
            ("trajectory", "t", "sup_theta", "weighted_integral", "gradient_integral",
             "big_jump_count", "flagged"),
        ),
        ReportSchema(
            ReportKind.MOMENTS,
            ("t", "sup_term", "sup_se", "integral_term", "integral_se", "c_hat_t"),
        ),
        ReportSchema(ReportKind.GRADIENT_MOMENTS, ("t", "gradient_term", "gradient_se", "bound")),
        ReportSchema(
            ReportKind.CHARFUN,
            ("mode", "dt", "s", "t", "xi", "empirical_re", "empirical_im",
             "theoretical_re", "theoretical_im", "std_error", "z"),
        ),
        ReportSchema(
            ReportKind.INDEPENDENCE,
            ("j", "k", "s", "t", "xi", "eta", "joint_re", "joint_im",
             "product_re", "product_im", "std_error", "z"),
        ),
        ReportSchema(ReportKind.MEASURE, ("observable", "bin_lo", "bin_hi", "mass", "window")),
        ReportSchema(
            ReportKind.STATIONARITY,
            ("first", "second", "observable", "distance", "p_value", "permutations",
             "block_swaps", "underpowered", "stationary"),
        ),
        ReportSchema(ReportKind.SENSITIVITY, ("first", "second", "observable", "distance", "baseline")),
        ReportSchema(ReportKind.SAMPLER, ("check", "value", "expected", "std_error", "tolerance", "passed")),
        ReportSchema(ReportKind.PLOT, ("series", "x", "y", "yerr"), hashed=False),
    )
}


def schema_for(kind: ReportKind) -> ReportSchema:
    return SCHEMAS[kind]


def match_header(header: Sequence[str]) -> Optional[ReportSchema]:
    """The schema whose header is exactly ``header``, if any."""
    header = tuple(h.strip() for h in header)
    for schema in SCHEMAS.values():
        if schema.header == header:
            return schema
    return None
