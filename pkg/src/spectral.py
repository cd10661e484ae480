"""
DFT fungsional, periodogram operator dan estimator spektral smoothed.

Konvensi normalisasi: bobot periodized W^(T) dijumlahkan dengan faktor
2*pi/T (jumlah Riemann -> integral W = 1) dan diterapkan ke periodogram
skala spektral P/(2*pi), karena E[P] ~ 2*pi*F. Totalnya (1/T) sum W P.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import scipy.fft
import scipy.integrate
import scipy.linalg

from src.errors import DimensionError, ParameterError
from src.models import KernelMomentReport, SpectralCurvePayload
from src.opcore import GridContext, GridFunc, LinOp, hermitian_part, tensor

logger = logging.getLogger(__name__)

MOMENT_TOLERANCE = 1e-8
MOMENT_POINTS = 10_001


@dataclass(frozen=True, eq=False)
class FuncSeries:
    """Deret fungsi real X_0..X_{T-1} pada grid (baris t = X_t)"""
    data: np.ndarray
    grid: GridContext

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        if data.ndim != 2 or data.shape[1] != self.grid.m:
            raise DimensionError(f"series data must be T x {self.grid.m}, got shape {data.shape}")
        if data.shape[0] < 2:
            raise ParameterError(f"series needs T >= 2, got T={data.shape[0]}")
        if not np.all(np.isfinite(data)):
            raise ParameterError("series contains non-finite values")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def T(self) -> int:
        return self.data.shape[0]

    def row(self, t: int) -> GridFunc:
        return GridFunc(self.data[t], self.grid)


@dataclass(frozen=True, eq=False)
class DftStack:
    """Koefisien DFT: baris s = X~ pada frekuensi nu_s = 2 pi s / T"""
    coeffs: np.ndarray
    grid: GridContext

    @property
    def T(self) -> int:
        return self.coeffs.shape[0]

    @property
    def freqs(self) -> np.ndarray:
        return fourier_frequencies(self.T)

    def row(self, s: int) -> GridFunc:
        return GridFunc(self.coeffs[s], self.grid)


@dataclass(frozen=True)
class SmoothingKernel:
    """Kernel genap W di [-1,1] dengan koefisien polinomial (basis pangkat)"""
    name: str
    order: int
    coefficients: tuple

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        values = np.polynomial.polynomial.polyval(x, np.asarray(self.coefficients))
        out = np.where(np.abs(x) <= 1.0, values, 0.0)
        return float(out) if out.ndim == 0 else out

    __call__ = evaluate


@dataclass(frozen=True, eq=False)
class SpectralCurve:
    """Operator spektral (estimasi atau true) di semua frekuensi Fourier"""
    actions: np.ndarray
    grid: GridContext
    kind: str
    bandwidth: float

    def __post_init__(self):
        actions = np.array(self.actions, dtype=complex)
        m = self.grid.m
        if actions.ndim != 3 or actions.shape[1:] != (m, m):
            raise DimensionError(f"curve actions must be T x {m} x {m}, got {actions.shape}")
        if self.kind not in ("auto", "cross"):
            raise ParameterError(f"curve kind must be auto or cross, got {self.kind!r}")
        actions.flags.writeable = False
        object.__setattr__(self, "actions", actions)

    @property
    def T(self) -> int:
        return self.actions.shape[0]

    @property
    def freqs(self) -> np.ndarray:
        return fourier_frequencies(self.T)

    def op(self, s: int) -> LinOp:
        return LinOp(self.actions[s], self.grid)

    @property
    def ops(self) -> List[LinOp]:
        return [self.op(s) for s in range(self.T)]

    def to_payload(self) -> SpectralCurvePayload:
        return SpectralCurvePayload(
            kind=self.kind,
            bandwidth=self.bandwidth,
            ops=[self.op(s).to_payload() for s in range(self.T)],
        )

    @classmethod
    def from_payload(cls, payload: SpectralCurvePayload) -> "SpectralCurve":
        if not payload.ops:
            raise DimensionError("spectral curve payload has no operators")
        ops = [LinOp.from_payload(op) for op in payload.ops]
        return cls(np.stack([op.action for op in ops]), ops[0].grid, payload.kind, payload.bandwidth)


def fourier_frequencies(T: int) -> np.ndarray:
    return 2 * np.pi * np.arange(T) / T


def _check_stacks(a: DftStack, b: DftStack):
    if a.T != b.T:
        raise DimensionError(f"length mismatch: T={a.T} vs T={b.T}")
    if a.grid.m != b.grid.m:
        raise DimensionError(f"grid mismatch: m={a.grid.m} vs m={b.grid.m}")


def _check_bandwidth(B_T: float):
    if not (0 < B_T <= np.pi):
        raise ParameterError(f"bandwidth must lie in (0, pi], got {B_T!r}")


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------

def polynomial_kernel(order: int, name: Optional[str] = None) -> SmoothingKernel:
    """
    Kernel polinomial genap orde p: W(+-1) = 0, integral W = 1 dan
    momen genap 2..p-2 nol. Koefisien diselesaikan dari sistem momen
    (p/2 + 1 persamaan). Orde 2 menghasilkan Epanechnikov.
    """
    if order < 2 or order % 2:
        raise ParameterError(f"kernel order must be a positive even integer, got {order}")
    n = order // 2 + 1
    system = np.zeros((n, n))
    rhs = np.zeros(n)
    for k in range(n - 1):
        for i in range(n):
            system[k, i] = 2.0 / (2 * i + 2 * k + 1)
    system[n - 1, :] = 1.0
    rhs[0] = 1.0
    even = scipy.linalg.solve(system, rhs)
    coefficients = np.zeros(order + 1)
    coefficients[::2] = even
    return SmoothingKernel(name or f"polynomial-{order}", order, tuple(coefficients.tolist()))


EPANECHNIKOV = SmoothingKernel("epanechnikov", 2, (0.75, 0.0, -0.75))


def get_kernel(name: str, order: Optional[int] = None) -> SmoothingKernel:
    """Registry kernel: epanechnikov (p=2), quartic (p=4), polynomial (p genap)"""
    key = name.lower()
    if key == "epanechnikov":
        if order not in (None, 2):
            raise ParameterError(f"epanechnikov has order 2, got order={order}")
        return EPANECHNIKOV
    if key == "quartic":
        if order not in (None, 4):
            raise ParameterError(f"quartic has order 4, got order={order}")
        return polynomial_kernel(4, "quartic")
    if key == "polynomial":
        return polynomial_kernel(order or 4)
    raise ParameterError(f"unknown kernel {name!r} (epanechnikov, quartic, polynomial)")


def kernel_moment_check(W: SmoothingKernel, p: Optional[int] = None) -> KernelMomentReport:
    """Momen 0..p dengan kuadratur Simpson komposit 10^4 titik"""
    p = W.order if p is None else p
    if p < 1:
        raise ParameterError(f"moment order must be >= 1, got {p}")
    u = np.linspace(-1.0, 1.0, MOMENT_POINTS)
    values = W(u)
    moments = [float(scipy.integrate.simpson(values * u ** j, x=u)) for j in range(p + 1)]
    passed = abs(moments[0] - 1.0) <= MOMENT_TOLERANCE and all(
        abs(moments[j]) <= MOMENT_TOLERANCE for j in range(1, p)
    )
    # loncatan di +-1 ikut dihitung (W = 0 di luar support)
    variation = float(np.sum(np.abs(np.diff(values))) + abs(values[0]) + abs(values[-1]))
    return KernelMomentReport(
        name=W.name,
        order=p,
        moments=moments,
        tolerance=MOMENT_TOLERANCE,
        passed=passed,
        total_variation=variation,
        min_value=float(values.min()),
    )


def periodized_weight(W: SmoothingKernel, B_T: float, x):
    """W^(T)(x) = B_T^-1 sum_k W((x + 2 k pi) / B_T)"""
    _check_bandwidth(B_T)
    r = np.mod(np.asarray(x, dtype=float), 2 * np.pi)
    # untuk B_T <= pi hanya k = 0 dan k = -1 bisa masuk support
    out = (W(r / B_T) + W((r - 2 * np.pi) / B_T)) / B_T
    return float(out) if np.ndim(out) == 0 else out


def kernel_weight_sum(W: SmoothingKernel, B_T: float, T: int, omega: float) -> float:
    """(2 pi / T) sum_s W^(T)(omega - nu_s)"""
    weights = periodized_weight(W, B_T, omega - fourier_frequencies(T))
    return float(2 * np.pi / T * np.sum(weights))


def _lag_weights(W: SmoothingKernel, B_T: float, T: int) -> np.ndarray:
    """w[d] = W^(T)(nu_d), dicerminkan supaya w[T-d] == w[d] persis"""
    d = np.arange(T)
    folded = np.minimum(d, T - d)
    return periodized_weight(W, B_T, fourier_frequencies(T)[folded])


# ---------------------------------------------------------------------------
# DFT dan periodogram
# ---------------------------------------------------------------------------

def fdft(series: FuncSeries, workers: Optional[int] = None) -> DftStack:
    """X~_s = T^-1/2 sum_t X_t exp(-i nu_s t), FFT per kolom grid"""
    coeffs = scipy.fft.fft(series.data, axis=0, workers=workers) / np.sqrt(series.T)
    coeffs.flags.writeable = False
    return DftStack(coeffs, series.grid)


def _check_index(stack: DftStack, s: int):
    if not 0 <= s < stack.T:
        raise ParameterError(f"frequency index {s} out of range [0, {stack.T})")


def periodogram(stack: DftStack, s: int) -> LinOp:
    """P_s = X~_s ⊗ X~_s"""
    _check_index(stack, s)
    row = stack.row(s)
    return tensor(row, row)


def cross_periodogram(stackY: DftStack, stackX: DftStack, s: int) -> LinOp:
    """P^YX_s = Y~_s ⊗ X~_s"""
    _check_stacks(stackY, stackX)
    _check_index(stackY, s)
    return tensor(stackY.row(s), stackX.row(s))


def periodogram_stack(stackA: DftStack, stackB: DftStack) -> np.ndarray:
    """Semua cross-periodogram sebagai array T x m x m"""
    _check_stacks(stackA, stackB)
    return np.einsum("si,sj->sij", stackA.coeffs, np.conj(stackB.coeffs)) / stackA.grid.m


def autocovariance(series: FuncSeries, lag: int) -> LinOp:
    """R^_h = T^-1 sum_t X_{t+h} ⊗ X_t (tanpa centering)"""
    T = series.T
    h = abs(lag)
    if h >= T:
        raise ParameterError(f"lag {lag} must satisfy |lag| < T={T}")
    data = series.data
    action = data[h:].T @ data[:T - h] / (T * series.grid.m)
    op = LinOp(action, series.grid)
    return op if lag >= 0 else op.adjoint()


# ---------------------------------------------------------------------------
# Smoothing
# ---------------------------------------------------------------------------

def smooth_operators(actions: np.ndarray, W: SmoothingKernel, B_T: float,
                     workers: Optional[int] = None) -> np.ndarray:
    """
    out[s'] = (2 pi / T) sum_s W^(T)(nu_s' - nu_s) actions[s].

    Konvolusi sirkular di grid Fourier, dihitung lewat FFT sepanjang sumbu 0.
    """
    _check_bandwidth(B_T)
    actions = np.asarray(actions, dtype=complex)
    T = actions.shape[0]
    weights = _lag_weights(W, B_T, T)
    # w genap dan real, sehingga transformnya real
    spectrum = scipy.fft.fft(weights).real
    transformed = scipy.fft.fft(actions, axis=0, workers=workers)
    transformed *= spectrum.reshape((T,) + (1,) * (actions.ndim - 1))
    return (2 * np.pi / T) * scipy.fft.ifft(transformed, axis=0, workers=workers)


def _enforce_conjugate_symmetry(actions: np.ndarray) -> np.ndarray:
    T = actions.shape[0]
    out = np.array(actions)
    out[0] = out[0].real
    if T % 2 == 0:
        out[T // 2] = out[T // 2].real
    s = np.arange(1, (T + 1) // 2)
    out[T - s] = np.conj(out[s])
    return out


def _is_auto(stackA: DftStack, stackB: Optional[DftStack]) -> bool:
    if stackB is None or stackB is stackA:
        return True
    return stackB.coeffs.shape == stackA.coeffs.shape and np.array_equal(stackA.coeffs, stackB.coeffs)


def smooth_spectrum(stackA: DftStack, stackB: Optional[DftStack], W: SmoothingKernel,
                    B_T: float, workers: Optional[int] = None) -> SpectralCurve:
    """
    Estimator F^ di semua frekuensi Fourier.

    Bobot Riemann 2 pi / T dipakai pada P / (2 pi), jadi hasilnya (1/T) sum_s W^(T) P_s
    dan F^ mengestimasi F (bukan 2 pi F); lihat DESIGN.md "Smoothing normalization".
    stackB None atau koefisien identik dengan stackA -> kurva auto (Hermitian),
    selain itu kurva cross F^AB.
    """
    _check_bandwidth(B_T)
    auto = _is_auto(stackA, stackB)
    stackB = stackA if stackB is None else stackB
    P = periodogram_stack(stackA, stackB) / (2 * np.pi)
    actions = smooth_operators(P, W, B_T, workers=workers)
    if auto:
        actions = hermitian_part(actions)
    actions = _enforce_conjugate_symmetry(actions)
    kind = "auto" if auto else "cross"
    logger.debug(f"Smoothed {kind} curve: T={stackA.T}, m={stackA.grid.m}, B_T={B_T:.4g}, kernel={W.name}")
    return SpectralCurve(actions, stackA.grid, kind, float(B_T))


def smooth_spectrum_at(stackA: DftStack, stackB: Optional[DftStack], W: SmoothingKernel,
                       B_T: float, omega: float) -> LinOp:
    """Estimator yang sama di frekuensi sembarang omega"""
    _check_bandwidth(B_T)
    auto = _is_auto(stackA, stackB)
    stackB = stackA if stackB is None else stackB
    _check_stacks(stackA, stackB)
    weights = periodized_weight(W, B_T, omega - stackA.freqs)
    action = (stackA.coeffs.T * weights) @ np.conj(stackB.coeffs) / (stackA.T * stackA.grid.m)
    if auto:
        action = hermitian_part(action)
    return LinOp(action, stackA.grid)
