"""
Test suite acceptance: properti end-to-end dari pipeline regresi
frekuensi (Parseval, roundtrip filter, oracle transfer, momen kernel,
weight-sum, konsistensi spektral, rate study, guard ridge, jumlah Tikhonov).

Test Monte Carlo yang lama ditandai `slow`; jalankan dengan:
    pytest src/tests --runslow
"""
from dataclasses import replace

import numpy as np
import pytest

from src.errors import RidgeNotPositive
from src.experiments import fit_loglog_slope, mse_frequency, mse_lag, run_study
from src.models import ProcessSpec, StudyConfig
from src.opcore import GridContext, LinOp, compose
from src.regression import FilterBank, estimate_filter, ridge_sum_exponents, ridge_sums, roundtrip_check, schedule
from src.simulate import GroundTruth, simulate_pair
from src.spectral import (
    EPANECHNIKOV, SpectralCurve, fdft, get_kernel, kernel_moment_check, kernel_weight_sum, smooth_spectrum_at,
)


@pytest.fixture(scope="module")
def grid():
    return GridContext(32)


@pytest.fixture(scope="module")
def truth(grid):
    return GroundTruth(ProcessSpec(), grid)


# ========== invariant eksak ==========

def test_parseval_identity(truth, grid, rng):
    """T1: mse_freq = 2 pi mse_lag, 20 pasangan kurva acak, T = 256, m = 32"""
    shape = (256, grid.m, grid.m)
    worst = 0.0
    for _ in range(20):
        curve = SpectralCurve(rng.standard_normal(shape) + 1j * rng.standard_normal(shape), grid, "cross", 0.25)
        freq, lag = mse_frequency(curve, truth), mse_lag(curve, truth)
        worst = max(worst, abs(freq - 2 * np.pi * lag) / freq)
    assert worst <= 1e-9


def test_filter_transfer_roundtrip(rng):
    """T2: bank acak L = 3, T = 64, m = 16 -> diskrepansi HS <= 1e-10"""
    grid16 = GridContext(16)
    for _ in range(10):
        ops = {
            lag: LinOp(rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16)), grid16)
            for lag in range(-3, 4)
        }
        assert roundtrip_check(FilterBank(ops, 3, grid16), 64) <= 1e-10


def test_transfer_oracle(truth, rng):
    """T3: ||F^YX - Q F^XX|| <= 1e-10 ||F^YX|| di 32 omega acak"""
    for omega in rng.uniform(-np.pi, np.pi, 32):
        fyx = truth.cross_spectral_density(omega).action
        product = compose(truth.transfer(omega), truth.spectral_density(omega)).action
        assert np.linalg.norm(fyx - product) <= 1e-10 * np.linalg.norm(fyx)


def test_kernel_moments():
    """T4: Epanechnikov (1, 0, 0.2), quartic (1, 0, 0, 0) dalam 1e-8"""
    epan = kernel_moment_check(EPANECHNIKOV)
    np.testing.assert_allclose(epan.moments, [1.0, 0.0, 0.2], atol=1e-8)

    quartic = kernel_moment_check(get_kernel("quartic"))
    np.testing.assert_allclose(quartic.moments[:4], [1.0, 0.0, 0.0, 0.0], atol=1e-8)
    assert epan.passed and quartic.passed


def test_weight_sum_near_one(rng):
    """T5: |(2 pi / T) sum_s W^(T)(omega - nu_s) - 1| <= 5 / (T B_T)"""
    T, B_T = 1024, 0.2
    for omega in rng.uniform(-np.pi, np.pi, 50):
        assert abs(kernel_weight_sum(EPANECHNIKOV, B_T, T, omega) - 1.0) <= 5 / (T * B_T)


def test_ridge_sum_slopes():
    """T9: slope log-log jumlah (A)/(B)/(C) dalam +-0.1 dari eksponen teoritis"""
    Ts = 2 ** np.arange(8, 17)
    sums = np.array([ridge_sums(2.0, 2.0, int(T)) for T in Ts])
    for column, expected in enumerate(ridge_sum_exponents(2.0, 2.0)):
        slope, _ = fit_loglog_slope(Ts, sums[:, column])
        assert abs(slope - expected) <= 0.1, f"sum {'ABC'[column]}: slope {slope:.3f} vs {expected:.3f}"


# ========== statistik ==========

def test_spectral_estimator_consistency(truth, grid):
    """T6: MSE F^XX di pi/3, T = 2048 minimal 1.5x lebih kecil dari T = 512"""
    omega = np.pi / 3
    target = truth.spectral_density(omega).action

    def mean_error(T):
        errors = []
        for replicate in range(50):
            X, _, _ = simulate_pair(truth.spec, grid, T, seed=6, replicate=replicate)
            estimate = smooth_spectrum_at(fdft(X), None, EPANECHNIKOV, T ** -0.25, omega)
            errors.append(np.linalg.norm(estimate.action - target) ** 2)
        return float(np.mean(errors))

    small, large = mean_error(512), mean_error(2048)
    assert small / large >= 1.5


def test_guard_fires_on_adversarial_input(grid):
    """T8b: kernel quartic, T = 32, B_T = 0.9, zeta = 1e-12 -> RidgeNotPositive"""
    W = get_kernel("quartic")
    sched = replace(schedule(2.0, 2.0, 0.25, 32), B_T=0.9, zeta_T=1e-12)
    fired = 0
    for seed in range(5):
        X, Y, _ = simulate_pair(ProcessSpec(), grid, 32, seed=seed)
        try:
            estimate_filter(X, Y, W, sched, 3)
        except RidgeNotPositive as e:
            assert e.indices
            fired += 1
    assert fired >= 1


@pytest.mark.slow
def test_guard_silent_at_default_schedule(grid):
    """T8a: nol kegagalan guard pada 1000 estimasi, T = 512"""
    T = 512
    sched = schedule(2.0, 2.0, 0.25, T)
    spec = ProcessSpec()
    for replicate in range(1000):
        X, Y, _ = simulate_pair(spec, grid, T, seed=8, replicate=replicate)
        estimate_filter(X, Y, EPANECHNIKOV, sched, 3)


@pytest.mark.slow
def test_rate_reproduction():
    """T7: study default, slope log-MSE dalam [-0.40, -0.10], mean turun monoton"""
    config = StudyConfig(T_list=[256, 512, 1024, 2048, 4096], replicates=100, seed=0)
    result = run_study(config, threads=4)
    assert result.predicted_slope == pytest.approx(-0.25)
    means = [row.mse_freq_mean for row in result.rows]
    assert all(b < a for a, b in zip(means, means[1:]))
    assert -0.40 <= result.slope <= -0.10
    assert all(row.guard_failures == 0 for row in result.rows)
