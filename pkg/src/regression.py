"""
Estimator Fourier-Tikhonov (smoothed) untuk filter {B_t}.

Q^_w = F^YX_w [F^XX_w + zeta I]^-1 di setiap frekuensi Fourier, lalu
B^_l = (1/T) sum_s Q^_{nu_s} exp(+i nu_s l). Konvensi ini adalah invers
persis dari transfer Q_w = sum_l exp(-i w l) B_l pada grid Fourier.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.fft

from src.errors import AliasingError, DimensionError, ParameterError, RankError, ScheduleError, StructureError
from src.models import FilterBankPayload
from src.opcore import (
    GridContext, LinOp, compose, eigh, eigh_stack, from_eigenpairs, is_hermitian,
    tikhonov_inverse, tikhonov_inverse_stack,
)
from src.spectral import FuncSeries, SmoothingKernel, SpectralCurve, fdft, fourier_frequencies, smooth_spectrum

logger = logging.getLogger(__name__)

ESTIMATORS = ("tikhonov", "truncation")


@dataclass(frozen=True)
class TuningSchedule:
    """zeta_T = T^(-alpha/(alpha+2beta)), B_T = T^-gamma"""
    alpha: float
    beta: float
    gamma: float
    T: int
    zeta_T: float
    B_T: float
    rate_exponent: float

    @property
    def window(self) -> Tuple[float, float]:
        return admissible_window(self.alpha, self.beta)


def admissible_window(alpha: float, beta: float) -> Tuple[float, float]:
    """Interval terbuka ((alpha-1)/(alpha+2beta), (2beta-alpha)/(alpha+2beta)) untuk gamma"""
    denom = alpha + 2 * beta
    return (alpha - 1) / denom, (2 * beta - alpha) / denom


def schedule(alpha: float, beta: float, gamma: float, T: int) -> TuningSchedule:
    """Jadwal tuning dengan validasi asumsi ill-posedness dan window gamma"""
    if not alpha > 1:
        raise ScheduleError(f"violated alpha > 1 (alpha={alpha})")
    if not beta > 0.5:
        raise ScheduleError(f"violated beta > 1/2 (beta={beta})")
    if not alpha < beta + 0.5:
        raise ScheduleError(f"violated alpha < beta + 1/2 (alpha={alpha}, beta={beta})")
    lo, hi = admissible_window(alpha, beta)
    if not lo < gamma:
        raise ScheduleError(f"violated (alpha-1)/(alpha+2beta) < gamma ({lo:.6g} < {gamma})")
    if not gamma < hi:
        raise ScheduleError(f"violated gamma < (2beta-alpha)/(alpha+2beta) ({gamma} < {hi:.6g})")
    if int(T) != T or T < 2:
        raise ScheduleError(f"violated T >= 2 integer (T={T})")
    denom = alpha + 2 * beta
    return TuningSchedule(
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        T=int(T),
        zeta_T=float(T) ** (-alpha / denom),
        B_T=float(T) ** (-gamma),
        rate_exponent=gamma - (2 * beta - 1) / denom,
    )


def truncation_rank(T: int, exponent: float, m: int) -> int:
    """K(T) = round(T^kappa), dibatasi ke [1, m]"""
    return int(min(max(round(T ** exponent), 1), m))


@dataclass(frozen=True, eq=False)
class FilterBank:
    """Filter berhingga lag -> LinOp dengan radius support L"""
    ops: Dict[int, LinOp]
    L: int
    grid: GridContext

    def __post_init__(self):
        for lag, op in self.ops.items():
            if abs(lag) > self.L:
                raise ParameterError(f"lag {lag} outside support radius L={self.L}")
            if op.grid.m != self.grid.m:
                raise DimensionError(f"lag {lag} operator has m={op.grid.m}, bank grid has m={self.grid.m}")

    @property
    def lags(self) -> List[int]:
        return sorted(self.ops)

    def op(self, lag: int) -> LinOp:
        if lag in self.ops:
            return self.ops[lag]
        return LinOp(np.zeros((self.grid.m, self.grid.m)), self.grid)

    def hs_summability(self) -> float:
        """sum_l ||B_l||_2"""
        return float(sum(np.linalg.norm(op.action) for op in self.ops.values()))

    def imag_mass(self) -> float:
        """sum_l ||Im B_l||_2 / sum_l ||B_l||_2 (0 untuk bank nol)"""
        total = self.hs_summability()
        if total == 0:
            return 0.0
        return float(sum(np.linalg.norm(op.action.imag) for op in self.ops.values()) / total)

    def to_payload(self) -> FilterBankPayload:
        return FilterBankPayload(
            L=self.L,
            lags=self.lags,
            ops=[self.ops[lag].to_payload() for lag in self.lags],
            imag_mass=self.imag_mass(),
        )

    @classmethod
    def from_payload(cls, payload: FilterBankPayload, grid: Optional[GridContext] = None) -> "FilterBank":
        ops = {lag: LinOp.from_payload(op) for lag, op in zip(payload.lags, payload.ops)}
        if grid is None:
            if not ops:
                raise DimensionError("empty filter bank payload needs an explicit grid")
            grid = next(iter(ops.values())).grid
        return cls(ops, payload.L, grid)


# ---------------------------------------------------------------------------
# Q per frekuensi
# ---------------------------------------------------------------------------

def estimate_q(fyx: LinOp, fxx: LinOp, zeta: float) -> LinOp:
    """Q^ = F^YX [F^XX + zeta I]^-1"""
    return compose(fyx, tikhonov_inverse(fxx, zeta))


def estimate_q_truncated(fyx: LinOp, fxx: LinOp, K: int) -> LinOp:
    """Q^ = F^YX sum_{n<=K} lambda_n^-1 phi_n ⊗ phi_n"""
    m = fxx.grid.m
    if not 1 <= K <= m:
        raise ParameterError(f"truncation rank must satisfy 1 <= K <= {m}, got {K}")
    values, functions = eigh(fxx)
    if values[K - 1] <= 0:
        raise RankError(f"eigenvalue {K} is {values[K - 1]!r}, not positive")
    return compose(fyx, from_eigenpairs(fxx.grid, 1.0 / values[:K], functions[:K]))


def _q_stack_tikhonov(fyx: np.ndarray, fxx: np.ndarray, zeta: float) -> np.ndarray:
    return fyx @ tikhonov_inverse_stack(fxx, zeta)


def _q_stack_truncated(fyx: np.ndarray, fxx: np.ndarray, K: int) -> np.ndarray:
    m = fxx.shape[-1]
    if not 1 <= K <= m:
        raise ParameterError(f"truncation rank must satisfy 1 <= K <= {m}, got {K}")
    if not is_hermitian(fxx):
        raise StructureError("truncation requires self-adjoint spectral operators")
    w, V = eigh_stack(fxx)
    bad = np.flatnonzero(w[..., K - 1] <= 0)
    if bad.size:
        raise RankError(f"eigenvalue {K} not positive at {bad.size} frequencies (first index {bad[0]})")
    Vk = V[..., :K]
    inverse = (Vk / w[..., None, :K]) @ np.conj(np.swapaxes(Vk, -1, -2))
    return fyx @ inverse


# ---------------------------------------------------------------------------
# Lag <-> frekuensi
# ---------------------------------------------------------------------------

def inverse_transform(actions: np.ndarray, L: int, grid: GridContext,
                      workers: Optional[int] = None) -> FilterBank:
    """B_l = (1/T) sum_s Q_s exp(+i nu_s l) untuk |l| <= L (lag negatif di indeks T+l)"""
    T = actions.shape[0]
    if 2 * L >= T:
        raise AliasingError(f"lag radius L={L} must satisfy L < T/2 (T={T})")
    lagged = scipy.fft.ifft(actions, axis=0, workers=workers)
    return FilterBank({lag: LinOp(lagged[lag % T], grid) for lag in range(-L, L + 1)}, L, grid)


def transfer_function(bank: FilterBank, omega: float) -> LinOp:
    """f^B_w = sum_l exp(-i w l) B_l"""
    action = np.zeros((bank.grid.m, bank.grid.m), dtype=complex)
    for lag in bank.lags:
        action += np.exp(-1j * omega * lag) * bank.ops[lag].action
    return LinOp(action, bank.grid)


def transfer_stack(bank: FilterBank, T: int) -> np.ndarray:
    """Transfer di semua nu_s sebagai array T x m x m"""
    m = bank.grid.m
    if not bank.ops:
        return np.zeros((T, m, m), dtype=complex)
    lags = np.array(bank.lags)
    phases = np.exp(-1j * np.outer(fourier_frequencies(T), lags))
    stacked = np.stack([bank.ops[lag].action for lag in bank.lags])
    return np.tensordot(phases, stacked, axes=(1, 0))


def roundtrip_check(bank: FilterBank, T: int) -> float:
    """max_l ||recovered_l - B_l||_2 setelah transfer -> inverse"""
    if 2 * bank.L >= T:
        raise AliasingError(f"lag radius L={bank.L} must satisfy L < T/2 (T={T})")
    recovered = inverse_transform(transfer_stack(bank, T), bank.L, bank.grid)
    gaps = [
        np.linalg.norm(recovered.op(lag).action - bank.op(lag).action)
        for lag in range(-bank.L, bank.L + 1)
    ]
    return float(max(gaps))


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

def estimate_q_curve(fyx: SpectralCurve, fxx: SpectralCurve, zeta: Optional[float] = None,
                     estimator: str = "tikhonov", rank: Optional[int] = None) -> SpectralCurve:
    """Q^ di semua frekuensi; dihitung untuk s <= T/2 lalu dicerminkan secara konjugat"""
    if fyx.T != fxx.T or fyx.grid.m != fxx.grid.m:
        raise DimensionError("F^YX and F^XX curves must share T and grid")
    T = fxx.T
    half = T // 2 + 1
    if estimator == "tikhonov":
        if zeta is None:
            raise ParameterError("tikhonov estimator needs zeta")
        q_half = _q_stack_tikhonov(fyx.actions[:half], fxx.actions[:half], zeta)
    elif estimator == "truncation":
        if rank is None:
            raise ParameterError("truncation estimator needs rank K")
        q_half = _q_stack_truncated(fyx.actions[:half], fxx.actions[:half], rank)
    else:
        raise ParameterError(f"unknown estimator {estimator!r} ({', '.join(ESTIMATORS)})")
    full = np.empty((T,) + q_half.shape[1:], dtype=complex)
    full[:half] = q_half
    s = np.arange(1, (T + 1) // 2)
    full[T - s] = np.conj(full[s])
    return SpectralCurve(full, fxx.grid, "cross", fxx.bandwidth)


def estimate_filter(X: FuncSeries, Y: FuncSeries, W: SmoothingKernel, sched: TuningSchedule,
                    L: int, estimator: str = "tikhonov", rank: Optional[int] = None,
                    workers: Optional[int] = None) -> Tuple[FilterBank, SpectralCurve]:
    """
    Smoothed Fourier-Tikhonov estimator.
    Return (filter bank |l| <= L, kurva Q^ lengkap di semua nu_s).
    """
    if X.T != Y.T:
        raise DimensionError(f"X and Y lengths differ: T={X.T} vs T={Y.T}")
    if X.grid.m != Y.grid.m:
        raise DimensionError(f"X and Y grids differ: m={X.grid.m} vs m={Y.grid.m}")
    if sched.T != X.T:
        raise ParameterError(f"schedule built for T={sched.T}, series has T={X.T}")
    if L < 0:
        raise ParameterError(f"lag radius must be non-negative, got L={L}")
    if 2 * L >= X.T:
        raise AliasingError(f"lag radius L={L} must satisfy L < T/2 (T={X.T})")

    stackX = fdft(X, workers=workers)
    stackY = fdft(Y, workers=workers)
    fxx = smooth_spectrum(stackX, None, W, sched.B_T, workers=workers)
    fyx = smooth_spectrum(stackY, stackX, W, sched.B_T, workers=workers)
    qhat = estimate_q_curve(fyx, fxx, sched.zeta_T, estimator=estimator, rank=rank)
    bank = inverse_transform(qhat.actions, L, X.grid, workers=workers)
    logger.debug(
        f"Estimated filter: T={X.T}, L={L}, estimator={estimator}, "
        f"zeta={sched.zeta_T:.4g}, B_T={sched.B_T:.4g}, imag_mass={bank.imag_mass():.2e}"
    )
    return bank, qhat


def parseval_gap(curve: SpectralCurve) -> float:
    """Relative gap antara sum_l ||B_l||^2 (full T) dan (1/T) sum_s ||Q_s||^2"""
    lag_mass = float(np.sum(np.abs(scipy.fft.ifft(curve.actions, axis=0)) ** 2))
    freq_mass = float(np.sum(np.abs(curve.actions) ** 2)) / curve.T
    if freq_mass == 0:
        return 0.0 if lag_mass == 0 else float("inf")
    return abs(lag_mass - freq_mass) / freq_mass


# ---------------------------------------------------------------------------
# Fixture skalar jumlah Tikhonov
# ---------------------------------------------------------------------------

def ridge_sums(alpha: float, beta: float, T: int, n_terms: int = 2 ** 20) -> Tuple[float, float, float]:
    """
    Tiga jumlah dengan lambda_j = j^-alpha, b_j = j^-beta, zeta = T^(-alpha/(alpha+2beta)):
      (A) sum zeta^2 b_j^2 / (lambda_j + zeta)^2
      (B) T^-1 sum lambda_j / (lambda_j + zeta)^2
      (C) sum lambda_j^2 / (lambda_j + zeta)^2
    """
    j = np.arange(1, n_terms + 1, dtype=float)
    lam = j ** -alpha
    b = j ** -beta
    zeta = float(T) ** (-alpha / (alpha + 2 * beta))
    denom = (lam + zeta) ** 2
    A = float(np.sum(zeta ** 2 * b ** 2 / denom))
    B = float(np.sum(lam / denom) / T)
    C = float(np.sum(lam ** 2 / denom))
    return A, B, C


def ridge_sum_exponents(alpha: float, beta: float) -> Tuple[float, float, float]:
    """Eksponen skala T untuk (A), (B), (C)"""
    denom = alpha + 2 * beta
    return -(2 * beta - 1) / denom, -(2 * beta - 1) / denom, 1 / denom
