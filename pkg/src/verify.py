"""
Suite invariant cepat di balik `ftsreg verify`.

Setiap check menghasilkan VerifyCheck (nilai terukur vs toleransi);
run_verify mencetak satu baris ✓/✗ per check.
"""

import logging
from typing import Callable, List

import numpy as np

from src.models import ProcessSpec, VerifyCheck
from src.opcore import GridContext, LinOp, compose, identity, tikhonov_inverse
from src.regression import FilterBank, parseval_gap, roundtrip_check
from src.simulate import GroundTruth
from src.spectral import (
    EPANECHNIKOV, FuncSeries, SpectralCurve, fdft, get_kernel, kernel_moment_check, kernel_weight_sum,
)

logger = logging.getLogger(__name__)


def _random_action(rng: np.random.Generator, m: int) -> np.ndarray:
    return rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))


def _result(name: str, value: float, tolerance: float) -> VerifyCheck:
    value = float(value)
    return VerifyCheck(name=name, passed=value <= tolerance, value=value, tolerance=tolerance)


def check_dft_parseval(rng: np.random.Generator) -> VerifyCheck:
    """sum_t ||X_t||^2 == sum_s ||X~_s||^2"""
    grid = GridContext(16)
    series = FuncSeries(rng.standard_normal((64, grid.m)), grid)
    lag_mass = np.sum(series.data ** 2)
    freq_mass = np.sum(np.abs(fdft(series).coeffs) ** 2)
    return _result("dft_parseval", abs(lag_mass - freq_mass) / lag_mass, 1e-10)


def check_curve_parseval(rng: np.random.Generator) -> VerifyCheck:
    """Lag-domain vs frequency-domain HS mass dari kurva acak"""
    grid = GridContext(32)
    curve = SpectralCurve(np.stack([_random_action(rng, grid.m) for _ in range(256)]), grid, "cross", 0.25)
    return _result("curve_parseval", parseval_gap(curve), 1e-9)


def check_filter_roundtrip(rng: np.random.Generator) -> VerifyCheck:
    grid = GridContext(16)
    bank = FilterBank({lag: LinOp(_random_action(rng, grid.m), grid) for lag in range(-3, 4)}, 3, grid)
    return _result("filter_roundtrip", roundtrip_check(bank, 64), 1e-10)


def check_transfer_identity(rng: np.random.Generator) -> VerifyCheck:
    """F^YX_w = Q_w F^XX_w di 32 frekuensi acak (ProcessSpec default)"""
    truth = GroundTruth(ProcessSpec(), GridContext(32))
    worst = 0.0
    for omega in rng.uniform(0, 2 * np.pi, 32):
        fyx = truth.cross_spectral_density(omega).action
        product = compose(truth.transfer(omega), truth.spectral_density(omega)).action
        worst = max(worst, np.linalg.norm(fyx - product) / np.linalg.norm(fyx))
    return _result("transfer_identity", worst, 1e-10)


def check_kernel_moments(rng: np.random.Generator) -> VerifyCheck:
    worst = 0.0
    for W in (EPANECHNIKOV, get_kernel("quartic")):
        report = kernel_moment_check(W)
        targets = [1.0] + [0.0] * (W.order - 1)
        worst = max(worst, max(abs(got - want) for got, want in zip(report.moments, targets)))
    return _result("kernel_moments", worst, 1e-8)


def check_tikhonov_residual(rng: np.random.Generator) -> VerifyCheck:
    """||(A + zeta I)(A + zeta I)^-1 - I||_2 untuk A PSD acak"""
    grid = GridContext(32)
    root = _random_action(rng, grid.m)
    A = LinOp(root @ np.conj(root.T) / grid.m, grid)
    zeta = 0.1
    ridge = A + zeta * identity(grid)
    residual = compose(ridge, tikhonov_inverse(A, zeta)).action - np.eye(grid.m)
    return _result("tikhonov_residual", np.linalg.norm(residual), 1e-10)


def check_weight_sum(rng: np.random.Generator) -> VerifyCheck:
    """T B_T |(2 pi / T) sum_s W^(T)(w - nu_s) - 1| <= 5 (T = 1024, B_T = 0.2)"""
    T, B_T = 1024, 0.2
    worst = max(
        abs(kernel_weight_sum(EPANECHNIKOV, B_T, T, omega) - 1.0) * T * B_T
        for omega in rng.uniform(0, 2 * np.pi, 50)
    )
    return _result("weight_sum", worst, 5.0)


CHECKS: List[Callable[[np.random.Generator], VerifyCheck]] = [
    check_dft_parseval,
    check_curve_parseval,
    check_filter_roundtrip,
    check_transfer_identity,
    check_kernel_moments,
    check_tikhonov_residual,
    check_weight_sum,
]


def run_checks(seed: int = 0) -> List[VerifyCheck]:
    rng = np.random.default_rng(seed)
    results = []
    for check in CHECKS:
        result = check(rng)
        logger.debug(f"{result.name}: value={result.value!r}, tolerance={result.tolerance!r}")
        results.append(result)
    return results


def run_verify(seed: int = 0) -> bool:
    """Jalankan semua check dan cetak ringkasan; True kalau semua lolos"""
    results = run_checks(seed)
    for result in results:
        status = "✓" if result.passed else "✗"
        print(f"{status} {result.name:<20} value={result.value:.3e}  tolerance={result.tolerance:.0e}")
    passed = all(r.passed for r in results)
    print("✓ ALL CHECKS PASSED" if passed else "✗ SOME CHECKS FAILED")
    return passed
