"""Command-line front door: argument parsing, run orchestration and provenance."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence

from levyns.core.config import ValidatedConfig, load_config, validate
from levyns.core.config.loader import config_hash
from levyns.core.constants import (
    DEFAULT_LOG_LEVEL,
    EXIT_BLOWUP_DOMINATED,
    EXIT_FAILURE,
    EXIT_INVALID_CONFIG,
    EXIT_OK,
    FLAGGED_FRACTION_LIMIT,
    LOG_ENV_VAR,
    TOOL_NAME,
    TOOL_VERSION,
)
from levyns.core.diagnostics import (
    gradient_moment_report,
    horizon_sequence,
    independence_test,
    martingale_cf_test,
    moment_bound_report,
)
from levyns.core.diagnostics.moments import MIN_TRAJECTORIES
from levyns.core.errors import BlowUpError, ConfigError, HThetaDivergenceError, LevyNSError
from levyns.core.invariant import (
    initial_condition_sensitivity,
    kb_estimate,
    kb_windows,
    observable_registry,
    window_stationarity_test,
)
from levyns.core.levy import LevyMeasureSpec, StreamPurpose, make_stream, sampler_test
from levyns.core.reports import (
    ReportKind,
    RunManifest,
    charfun_rows,
    emit_plot_data,
    ensemble_rows,
    independence_rows,
    stationarity_rows,
    write_manifest,
    write_rows,
)
from levyns.core.solver import simulate, simulate_ensemble
from levyns.core.spectral.snapshot import snapshot_name, write_snapshot

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class BlowUpDominated(LevyNSError):
    """More than 1% of the trajectories of a run blew up."""


def configure_logging() -> None:
    name = os.environ.get(LOG_ENV_VAR, DEFAULT_LOG_LEVEL).strip().upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        level = logging.getLevelName(DEFAULT_LOG_LEVEL)
    logging.basicConfig(level=level, format=LOG_FORMAT)


def parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def parse_pairs(text: str) -> list[tuple[float, float]]:
    """``0:0.5,0.5:1`` -> [(0, 0.5), (0.5, 1)]."""
    pairs = []
    for item in text.split(","):
        if item.strip():
            a, _, b = item.partition(":")
            pairs.append((float(a), float(b)))
    return pairs


def parse_mode_pairs(text: str) -> list[tuple[int, int]]:
    return [(int(a), int(b)) for a, b in parse_pairs(text)]


@contextmanager
def usage(option: str) -> Iterator[None]:
    """Turn a ValueError raised while reading ``option`` into an invalid-config error."""
    try:
        yield
    except ValueError as e:
        raise ConfigError([f"{option}: {e}"]) from e


class RunContext:
    """Output directory, manifest and config of one subcommand run."""

    def __init__(self, command: str, out_dir: Path, validated: Optional[ValidatedConfig], seed: int, digest: str) -> None:
        self.out_dir = out_dir
        self.validated = validated
        self.manifest = RunManifest(command=command, config_hash=digest, seed=seed)
        if validated is not None:
            self.manifest.h_theta = validated.h_theta.value
            self.manifest.warnings = list(validated.warnings)

    @property
    def hash(self) -> str:
        return self.manifest.config_hash

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def write(self, name: str, kind: ReportKind, rows) -> Path:
        path = write_rows(self.path(name), kind, rows, self.hash)
        self.manifest.add_file(path, self.out_dir)
        return path

    def write_json(self, name: str, payload: dict) -> Path:
        path = self.path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
        self.manifest.add_file(path, self.out_dir)
        return path

    def track(self, path: Path) -> None:
        self.manifest.add_file(path, self.out_dir)

    def flag(self, count: int, total: int) -> None:
        self.manifest.flagged_count += count
        if total and count / total > FLAGGED_FRACTION_LIMIT:
            raise BlowUpDominated(f"{count} of {total} trajectories blew up")


@contextmanager
def run_context(
    command: str, args: argparse.Namespace, validated: Optional[ValidatedConfig], digest: Optional[str] = None
) -> Iterator[RunContext]:
    """Always leaves a manifest behind; ``complete`` only when the body finished."""
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = validated.solver.seed if validated is not None else (args.seed_override or 0)
    ctx = RunContext(command, out_dir, validated, seed, digest or (validated.hash if validated else ""))
    try:
        yield ctx
        ctx.manifest.complete = True
    except BaseException as e:
        ctx.manifest.error = str(e) or type(e).__name__
        raise
    finally:
        write_manifest(ctx.manifest, out_dir)


def _load(args: argparse.Namespace) -> ValidatedConfig:
    if not args.config:
        raise ConfigError(["--config is required for this command"])
    return validate(load_config(args.config), seed=args.seed_override)


def _trajectories(args: argparse.Namespace, default: int) -> int:
    return args.trajectories if args.trajectories is not None else default


def cmd_validate(args: argparse.Namespace) -> int:
    validated = _load(args)
    print(f"config {args.config}: valid")
    print(f"config_hash {validated.hash}")
    print(f"H_theta {validated.h_theta.value:.17g}")
    for warning in validated.warnings:
        print(f"warning: {warning}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    validated = _load(args)
    config = validated.solver
    with run_context("simulate", args, validated) as ctx:
        snapshots_dir = Path(args.snapshots_dir) if args.snapshots_dir else ctx.path("snapshots")
        try:
            record = simulate(config)
        except BlowUpError as e:
            if e.record is not None:
                ctx.write("trajectory.csv", ReportKind.TRAJECTORY, e.record.rows())
            ctx.manifest.flagged_count = 1
            raise
        ctx.write("trajectory.csv", ReportKind.TRAJECTORY, record.rows())
        for step, time, field in record.iter_snapshots():
            ctx.track(write_snapshot(snapshot_name(step, snapshots_dir), field, config.theta, time))
    return EXIT_OK


def _horizons(args: argparse.Namespace, validated: ValidatedConfig) -> tuple[float, ...]:
    with usage("--horizons"):
        values = parse_floats(args.horizons) if args.horizons else validated.config.diagnostics.horizons
        horizons = horizon_sequence(values)
        for t in horizons:
            validated.solver.step_of(t)
    return horizons


def cmd_ensemble(args: argparse.Namespace) -> int:
    validated = _load(args)
    m = _trajectories(args, validated.config.diagnostics.trajectories)
    horizons = _horizons(args, validated)
    with run_context("ensemble", args, validated) as ctx:
        ensemble = simulate_ensemble(validated.solver, m, args.workers, horizons)
        ctx.write("ensemble.csv", ReportKind.ENSEMBLE, ensemble_rows(ensemble))
        ctx.flag(ensemble.flagged_count, ensemble.size)
    return EXIT_OK


def cmd_moments(args: argparse.Namespace) -> int:
    validated = _load(args)
    config = validated.solver
    m = _trajectories(args, validated.config.diagnostics.trajectories)
    if m < MIN_TRAJECTORIES:
        raise ConfigError([f"-M: the moment report needs at least {MIN_TRAJECTORIES} trajectories, got {m}"])
    horizons = _horizons(args, validated)
    with run_context("moments", args, validated) as ctx:
        ensemble = simulate_ensemble(config, m, args.workers, horizons)
        if ensemble.flagged_count == ensemble.size:
            ctx.flag(ensemble.flagged_count, ensemble.size)
        phi = config.initial_field()
        report = moment_bound_report(ensemble, config.theta, phi, stable_from=args.stable_from)
        gradient = gradient_moment_report(
            ensemble, config.theta, phi, c_hat=report.c_hat, affine_from=args.stable_from
        )
        ctx.write("moments.csv", ReportKind.MOMENTS, report.rows())
        ctx.write("gradient_moments.csv", ReportKind.GRADIENT_MOMENTS, gradient.rows())
        ctx.write_json("moments_summary.json", {"moments": report.to_dict(), "gradient": gradient.to_dict()})
        print(f"C_hat {report.c_hat:.6g} +- {report.c_hat_se:.2g}, passed={report.passed}")
        ctx.flag(ensemble.flagged_count, ensemble.size)
    return EXIT_OK


def cmd_cf_test(args: argparse.Namespace) -> int:
    validated = _load(args)
    diagnostics = validated.config.diagnostics
    m = _trajectories(args, diagnostics.trajectories)
    mode = args.mode if args.mode is not None else diagnostics.mode
    n = validated.solver.n
    with usage("--mode"):
        if not 1 <= mode <= n:
            raise ValueError(f"mode {mode} outside 1..{n}")
    with usage("--xi"):
        xi = parse_floats(args.xi) if args.xi else diagnostics.xi
    with usage("--pairs"):
        pairs = parse_pairs(args.pairs) if args.pairs else diagnostics.pairs
        for s, t in pairs:
            if not 0 <= s < t:
                raise ValueError(f"time pair ({s}, {t}) must satisfy 0 <= s < t")
            validated.solver.step_of(s)
            validated.solver.step_of(t)
    with usage("--independence"):
        mode_pairs = parse_mode_pairs(args.independence) if args.independence else diagnostics.independence_pairs
        for j, k in mode_pairs:
            if j == k or not (1 <= j <= n and 1 <= k <= n):
                raise ValueError(f"mode pair ({j}, {k}) needs two distinct modes in 1..{n}")
    with run_context("cf-test", args, validated) as ctx:
        report = martingale_cf_test(
            validated.solver, mode, xi, pairs, m, args.workers,
            dt_halving=diagnostics.dt_halving and not args.no_dt_halving,
        )
        ctx.write("cf.csv", ReportKind.CHARFUN, charfun_rows(report))
        print(f"mode {mode}: {100 * report.pass_fraction:.1f}% within 3 sigma, verdict {report.verdict.value}")
        flagged, total = report.flagged_count, report.flagged_count + report.trajectories
        if mode_pairs:
            reports = independence_test(validated.solver, mode_pairs, m, workers=args.workers)
            ctx.write("independence.csv", ReportKind.INDEPENDENCE, independence_rows(reports))
            for r in reports:
                print(f"independence {r.modes}: passed={r.passed}")
        ctx.flag(flagged, total)
    return EXIT_OK


def cmd_invariant(args: argparse.Namespace) -> int:
    validated = _load(args)
    section = validated.config.invariant
    config = validated.solver
    m = _trajectories(args, section.trajectories)
    with usage("--observables"):
        observables = observable_registry.parse_list(args.observables or ",".join(section.observables))
        for observable in observables:
            observable.check(config.basis)
    with usage("--windows"):
        windows = parse_pairs(args.windows) if args.windows else list(section.windows)
        for a, b in windows:
            if not 0 <= a < b:
                raise ValueError(f"window [{a}, {b}) must satisfy 0 <= start < end")
    burn_in = args.burn_in if args.burn_in is not None else section.burn_in
    with usage("--burn-in"):
        if burn_in is not None and not 0 <= burn_in < config.horizon:
            raise ValueError(f"must lie in [0, T={config.horizon:g}), got {burn_in:g}")
    stride = args.stride if args.stride is not None else section.stride
    with usage("--stride"):
        if stride is not None and stride < 1:
            raise ValueError(f"must be at least 1 step, got {stride}")
    permutations = args.permutations if args.permutations is not None else section.permutations
    with run_context("invariant", args, validated) as ctx:
        if windows:
            measures = kb_windows(config, observables, windows, m, stride=stride, workers=args.workers)
        else:
            measures = [kb_estimate(config, observables, m, burn_in=burn_in, stride=stride, workers=args.workers)]
        if measures[0].trajectories == 0:
            ctx.flag(measures[0].flagged_count, measures[0].flagged_count)
        ctx.write("measure.csv", ReportKind.MEASURE, [row for w in measures for row in w.rows()])
        reports = [
            window_stationarity_test(a, b, permutations=permutations, seed=config.seed)
            for a, b in zip(measures, measures[1:])
        ]
        if reports:
            ctx.write("stationarity.csv", ReportKind.STATIONARITY, stationarity_rows(reports))
        ctx.write_json("measure_summary.json", {"windows": [w.to_dict() for w in measures]})
        for r in reports:
            print(f"windows {r.first} vs {r.second}: stationary={r.stationary}, underpowered={r.underpowered}")
        if args.compare:
            others = [validate(load_config(path), seed=args.seed_override).solver for path in args.compare]
            start = config.horizon / 2.0 if burn_in is None else burn_in
            window = windows[-1] if windows else (start, config.horizon + config.dt / 2.0)
            sensitivity = initial_condition_sensitivity(
                [config, *others], observables, window, m, stride=stride, workers=args.workers
            )
            ctx.write("sensitivity.csv", ReportKind.SENSITIVITY, sensitivity.rows())
        flagged = measures[0].flagged_count
        ctx.flag(flagged, flagged + measures[0].trajectories)
    return EXIT_OK


def cmd_sampler_test(args: argparse.Namespace) -> int:
    with usage("--alpha"):
        LevyMeasureSpec(alpha=args.alpha, intensity=args.intensity)
    seed = args.seed_override or 0
    digest = config_hash(
        f"sampler-test alpha={args.alpha!r} n={args.draws} intensity={args.intensity!r} "
        f"backend_draws={args.backend_draws} seed={seed}"
    )
    with run_context("sampler-test", args, None, digest) as ctx:
        rng = make_stream(seed, StreamPurpose.SAMPLER_TEST)
        report = sampler_test(
            args.alpha, args.draws, rng, intensity=args.intensity, backend_draws=args.backend_draws
        )
        ctx.write("sampler.csv", ReportKind.SAMPLER, report.rows())
        for check in report.checks:
            print(f"{check.check}: {check.value:.6g} (expected {check.expected:.6g}) passed={check.passed}")
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_plot_data(args: argparse.Namespace) -> int:
    digest = config_hash("\n".join(Path(p).read_text(encoding="utf-8") for p in args.reports))
    with run_context("plot-data", args, None, digest) as ctx:
        path = emit_plot_data(args.reports, ctx.path(args.output))
        ctx.track(path)
    return EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "simulate": cmd_simulate,
    "ensemble": cmd_ensemble,
    "moments": cmd_moments,
    "cf-test": cmd_cf_test,
    "invariant": cmd_invariant,
    "sampler-test": cmd_sampler_test,
    "plot-data": cmd_plot_data,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Run config (TOML)")
    common.add_argument("--seed-override", type=int, default=None, help="Replace the master seed of the config")
    common.add_argument("--workers", type=int, default=None, help="Worker processes (default: all CPUs)")
    common.add_argument("-o", "--out-dir", default=".", help="Directory for reports and the manifest")

    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Galerkin simulation and diagnostics for 2D Navier-Stokes driven by alpha-stable noise",
    )
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="One trajectory with snapshots")
    p.add_argument("--snapshots-dir", default=None, help="Where snapshot files go (default OUT/snapshots)")

    for name, text in (("ensemble", "Per-trajectory horizon statistics"), ("moments", "Moment bound report")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("-M", "--trajectories", type=int, default=None, help="Ensemble size")
        p.add_argument("--horizons", default=None, help="Comma-separated horizons, e.g. 1,2,4,8")
        if name == "moments":
            p.add_argument("--stable-from", type=float, default=2.0, help="Horizons used by the doubling-T check")

    p = sub.add_parser("cf-test", parents=[common], help="Martingale characteristic-function test")
    p.add_argument("--mode", type=int, default=None, help="Basis index j")
    p.add_argument("--xi", default=None, help="Comma-separated xi grid")
    p.add_argument("--pairs", default=None, help="Time pairs s:t, comma-separated")
    p.add_argument("-M", "--trajectories", type=int, default=None, help="Ensemble size")
    p.add_argument("--no-dt-halving", action="store_true", help="Skip the dt/2 repeat")
    p.add_argument("--independence", default=None, help="Mode pairs j:k for the independence test")

    p = sub.add_parser("invariant", parents=[common], help="Empirical invariant measure and window tests")
    p.add_argument("-M", "--trajectories", type=int, default=None, help="Ensemble size")
    p.add_argument("--burn-in", type=float, default=None, help="Burn-in time (default T/2)")
    p.add_argument("--windows", default=None, help="Windows a:b, comma-separated")
    p.add_argument("--observables", default=None, help="Observables, e.g. l2,h1theta,mode:1")
    p.add_argument("--stride", type=int, default=None, help="Sampling stride in steps (default adaptive)")
    p.add_argument("--permutations", type=int, default=None, help="Permutations per KS p-value")
    p.add_argument(
        "--compare", nargs="+", default=None,
        help="Configs differing only in the initial condition; writes sensitivity.csv",
    )

    p = sub.add_parser("sampler-test", parents=[common], help="Self-test of the stable sampler")
    p.add_argument("--alpha", type=float, required=True, help="Stability index")
    p.add_argument("-N", "--draws", type=int, default=1_000_000, help="Number of draws")
    p.add_argument("--intensity", type=float, default=1.0, help="Levy measure intensity c")
    p.add_argument(
        "--backend-draws",
        type=int,
        default=0,
        help="Draws per backend for the exact vs levy-ito comparison (0 skips it)",
    )

    p = sub.add_parser("plot-data", parents=[common], help="Long-format series,x,y,yerr from report CSVs")
    p.add_argument("reports", nargs="+", help="Report CSV files")
    p.add_argument("--output", default="plot.csv", help="File name inside the output directory")

    sub.add_parser("validate", parents=[common], help="Check a config and print H_theta")
    return parser


def run(command: str, args: argparse.Namespace) -> int:
    """Dispatch one subcommand and map failures to exit codes."""
    try:
        return COMMANDS[command](args)
    except ConfigError as e:
        for message in e.errors:
            print(f"error: {message}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    except HThetaDivergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    except (BlowUpError, BlowUpDominated) as e:
        logger.error(f"Run failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BLOWUP_DOMINATED
    except (LevyNSError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    return run(args.command, args)
