"""
Monte Carlo study untuk laju konvergensi estimator.

Setiap T: simulate_pair -> estimate_filter -> MSE (domain frekuensi dan lag)
per replicate, agregasi mean/SE, lalu fit OLS log(mse) terhadap log(T).
Replicate yang gagal di guard ridge dihitung, bukan fatal.
"""

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.fft
import scipy.stats
from matplotlib.figure import Figure
import matplotlib

from src.errors import ConfigurationError, FormatError, NumericFailure, ParameterError
from src.models import StudyConfig, StudyResult, StudyRow
from src.opcore import GridContext
from src.regression import FilterBank, TuningSchedule, estimate_filter, schedule, truncation_rank
from src.simulate import GroundTruth, simulate_pair
from src.spectral import SmoothingKernel, SpectralCurve, get_kernel
from src.storage import format_float

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("T", "B_T", "zeta_T", "mse_freq_mean", "mse_freq_se", "mse_lag_mean", "guard_failures")
FORMATS = ("csv", "json", "svg")


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def _delta(qhat: SpectralCurve, truth: GroundTruth) -> np.ndarray:
    return qhat.actions - truth.transfer_stack(qhat.T)


def mse_frequency(qhat: SpectralCurve, truth: GroundTruth) -> float:
    """(2 pi / T) sum_s ||Q^_s - Q_s||_2^2"""
    diff = _delta(qhat, truth)
    return float(2 * np.pi / qhat.T * np.sum(np.abs(diff) ** 2))


def mse_lag(qhat: SpectralCurve, truth: GroundTruth) -> float:
    """sum_l ||dB_l||_2^2 atas semua T lag (inverse DFT penuh dari dQ)"""
    lagged = scipy.fft.ifft(_delta(qhat, truth), axis=0)
    return float(np.sum(np.abs(lagged) ** 2))


def mse_window(bank: FilterBank, truth_bank: FilterBank, L_eval: int) -> float:
    """sum_{|l| <= L_eval} ||B^_l - B_l||_2^2"""
    if L_eval > bank.L:
        raise ParameterError(f"L_eval={L_eval} exceeds estimated bank radius L={bank.L}")
    return float(sum(
        np.sum(np.abs(bank.op(lag).action - truth_bank.op(lag).action) ** 2)
        for lag in range(-L_eval, L_eval + 1)
    ))


def fit_loglog_slope(x: Sequence[float], y: Sequence[float]) -> Tuple[float, float]:
    """OLS log(y) ~ log(x); return (slope, standard error)"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ParameterError("slope fit needs at least two paired points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ParameterError("slope fit needs positive values")
    fit = scipy.stats.linregress(np.log(x), np.log(y))
    stderr = 0.0 if x.size == 2 else float(fit.stderr)
    return float(fit.slope), stderr


# ---------------------------------------------------------------------------
# Study
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReplicateOutcome:
    replicate: int
    failed: bool
    mse_freq: float = float("nan")
    mse_lag: float = float("nan")
    mse_window: float = float("nan")


def _run_replicate(cfg: StudyConfig, grid: GridContext, W: SmoothingKernel, sched: TuningSchedule,
                   rank: Optional[int], replicate: int) -> ReplicateOutcome:
    X, Y, truth = simulate_pair(cfg.spec, grid, sched.T, cfg.seed, replicate)
    try:
        bank, qhat = estimate_filter(X, Y, W, sched, cfg.L_eval, estimator=cfg.estimator, rank=rank, workers=1)
    except NumericFailure as e:
        logger.warning(f"✗ Guard failure: T={sched.T}, replicate={replicate}: {e}")
        return ReplicateOutcome(replicate, failed=True)
    return ReplicateOutcome(
        replicate,
        failed=False,
        mse_freq=mse_frequency(qhat, truth),
        mse_lag=mse_lag(qhat, truth),
        mse_window=mse_window(bank, truth.filter_bank(), cfg.L_eval),
    )


def _mean_se(values: np.ndarray) -> Tuple[Optional[float], Optional[float]]:
    if values.size == 0:
        return None, None
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, None
    return mean, float(np.std(values, ddof=1) / np.sqrt(values.size))


def _aggregate(sched: TuningSchedule, outcomes: List[ReplicateOutcome], rank: Optional[int]) -> StudyRow:
    ok = [o for o in outcomes if not o.failed]
    freq = np.array([o.mse_freq for o in ok])
    mean, se = _mean_se(freq)
    lag_mean, _ = _mean_se(np.array([o.mse_lag for o in ok]))
    window_mean, _ = _mean_se(np.array([o.mse_window for o in ok]))
    return StudyRow(
        T=sched.T,
        B_T=sched.B_T,
        zeta_T=sched.zeta_T,
        mse_freq_mean=mean,
        mse_freq_se=se,
        mse_lag_mean=lag_mean,
        guard_failures=len(outcomes) - len(ok),
        replicates=len(outcomes),
        mse_freq_restricted=float(np.sum(freq) / len(outcomes)) if outcomes else None,
        mse_window_mean=window_mean,
        rank=rank,
    )


def run_study(cfg: StudyConfig, threads: int = 1) -> StudyResult:
    """
    Jalankan study. Jadwal tuning divalidasi untuk semua T sebelum simulasi
    apa pun; replicate diparalelkan lewat thread pool dan dilipat sesuai urutan.
    """
    grid = GridContext(cfg.m)
    GroundTruth(cfg.spec, grid)
    W = get_kernel(cfg.kernel, cfg.kernel_order)
    schedules = [schedule(cfg.alpha, cfg.beta, cfg.gamma, T) for T in cfg.T_list]
    if 2 * cfg.L_eval >= cfg.T_list[0]:
        raise ConfigurationError(f"L_eval={cfg.L_eval} must satisfy L_eval < T/2 for every T")
    exponent = cfg.truncation_exponent or 1.0 / (cfg.alpha + 2 * cfg.beta)

    logger.info(
        f"Starting study: T_list={cfg.T_list}, replicates={cfg.replicates}, "
        f"estimator={cfg.estimator}, kernel={W.name}, threads={threads}"
    )
    rows = []
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for sched in schedules:
            rank = truncation_rank(sched.T, exponent, cfg.m) if cfg.estimator == "truncation" else None
            job = partial(_run_replicate, cfg, grid, W, sched, rank)
            outcomes = list(pool.map(job, range(cfg.replicates)))
            row = _aggregate(sched, outcomes, rank)
            rows.append(row)
            logger.info(
                f"✓ T={sched.T}: mse_freq_mean={row.mse_freq_mean}, "
                f"guard_failures={row.guard_failures}/{cfg.replicates}"
            )

    result = StudyResult(rows=rows, predicted_slope=schedules[0].rate_exponent, config=cfg)
    fitted = [r for r in rows if r.mse_freq_mean is not None and r.mse_freq_mean > 0]
    if len(fitted) >= 2:
        result.slope, result.slope_se = fit_loglog_slope(
            [r.T for r in fitted], [r.mse_freq_mean for r in fitted]
        )
        rho = scipy.stats.spearmanr([r.T for r in fitted], [r.mse_freq_mean for r in fitted]).correlation
        result.spearman = None if np.isnan(rho) else float(rho)
    logger.info(f"Study finished: slope={result.slope}, predicted={result.predicted_slope}")
    return result


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return format_float(value)


def _rows_csv(rows: List[StudyRow]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_csv_cell(getattr(row, col)) for col in CSV_COLUMNS])
    return buffer.getvalue().encode()


def parse_csv(data: bytes) -> StudyResult:
    """Kebalikan dari emit(result, 'csv'); hanya kolom CSV yang terisi"""
    reader = csv.reader(io.StringIO(data.decode()))
    header = next(reader, None)
    if header is None or tuple(header) != CSV_COLUMNS:
        raise FormatError(f"study CSV header must be {','.join(CSV_COLUMNS)}")
    rows = []
    for line in reader:
        if not line:
            continue
        if len(line) != len(CSV_COLUMNS):
            raise FormatError(f"study CSV row has {len(line)} cells, expected {len(CSV_COLUMNS)}")
        cells = dict(zip(CSV_COLUMNS, line))
        try:
            rows.append(StudyRow(
                T=int(cells["T"]),
                B_T=float(cells["B_T"]),
                zeta_T=float(cells["zeta_T"]),
                mse_freq_mean=float(cells["mse_freq_mean"]) if cells["mse_freq_mean"] else None,
                mse_freq_se=float(cells["mse_freq_se"]) if cells["mse_freq_se"] else None,
                mse_lag_mean=float(cells["mse_lag_mean"]) if cells["mse_lag_mean"] else None,
                guard_failures=int(cells["guard_failures"]),
            ))
        except ValueError as e:
            raise FormatError(f"study CSV has an invalid cell: {e}")
    return StudyResult(rows=rows)


def _plot_svg(result: StudyResult) -> bytes:
    """Scatter log-log mse vs T, garis fit dan garis referensi slope prediksi"""
    points = [(r.T, r.mse_freq_mean) for r in result.rows if r.mse_freq_mean]
    fig = Figure(figsize=(6, 4.5))
    ax = fig.add_subplot(1, 1, 1)
    ax.set_xscale("log")
    ax.set_yscale("log")
    if points:
        T = np.array([p[0] for p in points], dtype=float)
        mse = np.array([p[1] for p in points])
        ax.plot(T, mse, "o", color="tab:blue", label="mse_freq mean")
        if len(points) >= 2:
            slope, intercept = np.polyfit(np.log(T), np.log(mse), 1)
            ax.plot(T, np.exp(intercept) * T ** slope, "-", color="tab:blue", label=f"fit slope {slope:.3f}")
        if result.predicted_slope is not None:
            ref = mse[0] * (T / T[0]) ** result.predicted_slope
            ax.plot(T, ref, "--", color="tab:gray", label=f"predicted slope {result.predicted_slope:.3f}")
        ax.legend(loc="best")
    ax.set_xlabel("T")
    ax.set_ylabel("MSE (frequency domain)")
    buffer = io.BytesIO()
    with matplotlib.rc_context({"svg.hashsalt": "ftsreg", "svg.fonttype": "path"}):
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue()


def emit(result: StudyResult, fmt: str) -> bytes:
    """Serialisasi StudyResult ke csv, json atau svg"""
    if fmt == "csv":
        return _rows_csv(result.rows)
    if fmt == "json":
        return result.model_dump_json(indent=2).encode()
    if fmt == "svg":
        return _plot_svg(result)
    raise ParameterError(f"unsupported format {fmt!r} ({', '.join(FORMATS)})")


def study_schema() -> dict:
    """JSON schema yang dipublikasikan untuk output json"""
    return StudyResult.model_json_schema()
