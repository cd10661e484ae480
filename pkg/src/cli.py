"""
Entry point command line `ftsreg`.

    python -m src.cli simulate --T 512 --seed 1 --out-dir run/
    python -m src.cli estimate --x run/X.csv --y run/Y.csv --lags 3 --out run/bank.json
    python -m src.cli study --config study.json --out-dir results/ --plot
    python -m src.cli check-kernel --name quartic
    python -m src.cli verify

Exit code: 0 sukses, 1 validasi/usage, 2 kegagalan numerik atau verify gagal.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from src.config import resolve_default_m, resolve_threads, setup_logging
from src.errors import DimensionError, NumericFailure, ValidationFailure
from src.experiments import emit, mse_frequency, mse_lag, run_study, study_schema
from src.models import (
    ArtifactManifest, EstimateDiagnostics, EstimateReport, ProcessSpec, StudyConfig, TruthManifest,
)
from src.opcore import GridContext
from src.regression import estimate_filter, parseval_gap, schedule, truncation_rank
from src.simulate import GroundTruth, simulate_pair
from src.spectral import get_kernel, kernel_moment_check
from src.storage import read_model, read_series, sha256_file, write_bytes, write_model, write_series
from src.verify import run_verify

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERIC = 2


class CliParser(argparse.ArgumentParser):
    """Usage error keluar dengan kode 1 (bukan 2 seperti default argparse)"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(args: argparse.Namespace, threads: int) -> int:
    spec = read_model(ProcessSpec, args.spec) if args.spec else ProcessSpec()
    m = resolve_default_m(args.m)
    X, Y, truth = simulate_pair(spec, GridContext(m), args.T, args.seed, args.replicate)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    checksums = {}
    for name, series in (("X.csv", X), ("Y.csv", Y)):
        checksums[name] = sha256_file(write_series(series, out_dir / name))
    manifest = TruthManifest(
        spec=spec,
        m=m,
        T=args.T,
        seed=args.seed,
        replicate=args.replicate,
        checksums=checksums,
        filter=truth.filter_bank().to_payload(),
    )
    write_model(manifest, out_dir / "truth.json")
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace, threads: int) -> int:
    X = read_series(args.x)
    Y = read_series(args.y)
    if X.T != Y.T or X.grid.m != Y.grid.m:
        raise DimensionError(f"X is {X.T}x{X.grid.m} but Y is {Y.T}x{Y.grid.m}")
    sched = schedule(args.alpha, args.beta, args.gamma, X.T)
    W = get_kernel(args.kernel, args.order)
    rank = args.rank
    if args.estimator == "truncation" and rank is None:
        rank = truncation_rank(X.T, 1.0 / (args.alpha + 2 * args.beta), X.grid.m)

    truth = None
    if args.truth:
        manifest = read_model(TruthManifest, args.truth)
        if manifest.m != X.grid.m or manifest.T != X.T:
            raise DimensionError(
                f"truth manifest is for m={manifest.m}, T={manifest.T}; series has m={X.grid.m}, T={X.T}"
            )
        truth = GroundTruth(manifest.spec, X.grid)

    common = dict(
        estimator=args.estimator,
        kernel=W.name,
        kernel_order=W.order,
        T=X.T,
        zeta_T=sched.zeta_T,
        B_T=sched.B_T,
        rate_exponent=sched.rate_exponent,
        rank=rank,
    )
    try:
        bank, qhat = estimate_filter(X, Y, W, sched, args.lags, estimator=args.estimator, rank=rank,
                                     workers=threads)
    except NumericFailure as e:
        logger.error(f"✗ Guard failed: {e}")
        failed = EstimateReport(
            L=args.lags, lags=[], ops=[],
            diagnostics=EstimateDiagnostics(guard="failed", imag_mass=0.0, hs_summability=0.0, **common),
        )
        write_model(failed, args.out)
        return EXIT_NUMERIC

    payload = bank.to_payload()
    diagnostics = EstimateDiagnostics(
        guard="ok",
        imag_mass=payload.imag_mass,
        hs_summability=bank.hs_summability(),
        parseval_relative_error=parseval_gap(qhat),
        mse_freq=mse_frequency(qhat, truth) if truth else None,
        mse_lag=mse_lag(qhat, truth) if truth else None,
        **common,
    )
    write_model(EstimateReport(**payload.model_dump(), diagnostics=diagnostics), args.out)
    if args.curve_out:
        write_model(qhat.to_payload(), args.curve_out)
    logger.info(f"✓ Filter estimated: T={X.T}, L={args.lags}, imag_mass={payload.imag_mass:.2e}")
    return EXIT_OK


def cmd_study(args: argparse.Namespace, threads: int) -> int:
    cfg = read_model(StudyConfig, args.config)
    result = run_study(cfg, threads=threads)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = {
        "study.csv": emit(result, "csv"),
        "study.json": emit(result, "json"),
        "study.schema.json": json.dumps(study_schema(), indent=2).encode(),
    }
    if args.plot:
        artifacts["study.svg"] = emit(result, "svg")
    files = {}
    for name, data in artifacts.items():
        files[name] = sha256_file(write_bytes(data, out_dir / name))
    write_model(ArtifactManifest(command="study", files=files), out_dir / "manifest.json")
    return EXIT_OK


def cmd_check_kernel(args: argparse.Namespace, threads: int) -> int:
    report = kernel_moment_check(get_kernel(args.name, args.order))
    print(f"Kernel: {report.name} (order {report.order})")
    for j, moment in enumerate(report.moments):
        print(f"  moment {j}: {moment!r}")
    print(f"  total variation: {report.total_variation!r}")
    print(f"  min value: {report.min_value!r}")
    status = "✓ PASS" if report.passed else "✗ FAIL"
    print(f"{status} (tolerance {report.tolerance:.0e})")
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_verify(args: argparse.Namespace, threads: int) -> int:
    return EXIT_OK if run_verify(args.seed) else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> CliParser:
    parser = CliParser(prog="ftsreg", description="Frequency-domain functional time series regression")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads (default: FTSREG_THREADS or all cores)")
    parser.add_argument("--log-level", default=None, help="Logging level (default: FTSREG_LOG_LEVEL or INFO)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Simulate (X, Y) and write the ground truth")
    p.add_argument("--spec", default=None, help="ProcessSpec JSON (default spec if omitted)")
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=int, default=None, help="Grid resolution (default: FTSREG_DEFAULT_M or 32)")
    p.add_argument("--replicate", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("estimate", help="Estimate the filter bank from X/Y CSV files")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--gamma", type=float, default=0.25)
    p.add_argument("--lags", type=int, default=3, help="Lag radius L")
    p.add_argument("--kernel", default="epanechnikov")
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--estimator", choices=("tikhonov", "truncation"), default="tikhonov")
    p.add_argument("--rank", type=int, default=None, help="Truncation rank K")
    p.add_argument("--truth", default=None, help="truth.json from simulate (adds MSE diagnostics)")
    p.add_argument("--curve-out", default=None, help="Also write the estimated transfer curve Q^ as JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_estimate)

    p = sub.add_parser("study", help="Run a Monte Carlo rate study")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--plot", action="store_true", help="Also write study.svg")
    p.set_defaults(handler=cmd_study)

    p = sub.add_parser("check-kernel", help="Print kernel moments")
    p.add_argument("--name", default="epanechnikov")
    p.add_argument("--order", type=int, default=None)
    p.set_defaults(handler=cmd_check_kernel)

    p = sub.add_parser("verify", help="Run the fast invariant suite")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_OK

    setup_logging(args.log_level)
    try:
        threads = resolve_threads(args.threads)
        return args.handler(args, threads)
    except (ValidationFailure, ValidationError) as e:
        print(f"ftsreg: error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericFailure as e:
        print(f"ftsreg: numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
