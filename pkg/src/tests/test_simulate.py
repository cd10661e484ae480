import numpy as np
import pytest
from pydantic import ValidationError

from src.errors import ConfigurationError
from src.models import ProcessSpec
from src.opcore import GridContext, compose, from_eigenpairs
from src.regression import roundtrip_check
from src.simulate import (
    GroundTruth, mode_generator, simulate_pair, true_cross_spectral_density, true_filter,
    true_spectral_density, true_transfer,
)
from src.spectral import EPANECHNIKOV, autocovariance, cross_periodogram, fdft, periodogram, smooth_spectrum_at


# ========== ProcessSpec ==========

def test_process_spec_defaults(default_spec):
    """T1: default J = 8, w_0 = 1, w_+-1 = 0.4"""
    assert default_spec.J == 8
    assert default_spec.filter_lags == {-1: 0.4, 0: 1.0, 1: 0.4}
    assert default_spec.lag_radius == 1


@pytest.mark.parametrize("overrides", [
    {"rho": 1.0},
    {"alpha": 1.0},
    {"beta": 0.5},
    {"alpha": 3.0, "beta": 2.0},
    {"noise_alpha": 1.0},
    {"filter_lags": {}},
    {"noise_scale": -1.0},
])
def test_process_spec_rejects_invalid(overrides):
    """T2: pelanggaran asumsi -> ValidationError"""
    with pytest.raises(ValidationError):
        ProcessSpec(**overrides)


def test_ground_truth_needs_fine_grid(default_spec):
    """T3: 4J > m -> ConfigurationError"""
    with pytest.raises(ConfigurationError):
        GroundTruth(default_spec, GridContext(16))


def test_simulate_rejects_short_series(default_spec, grid32):
    with pytest.raises(ConfigurationError):
        simulate_pair(default_spec, grid32, 3, seed=0)


# ========== simulate_pair ==========

def test_simulate_deterministic(default_spec, grid32):
    """T4: seed sama -> deret identik bit per bit"""
    X1, Y1, _ = simulate_pair(default_spec, grid32, 128, seed=42)
    X2, Y2, _ = simulate_pair(default_spec, grid32, 128, seed=42)
    assert np.array_equal(X1.data, X2.data)
    assert np.array_equal(Y1.data, Y2.data)


def test_simulate_replicates_independent_streams(default_spec, grid32):
    X0, _, _ = simulate_pair(default_spec, grid32, 64, seed=42, replicate=0)
    X1, _, _ = simulate_pair(default_spec, grid32, 64, seed=42, replicate=1)
    assert not np.array_equal(X0.data, X1.data)


def test_mode_generator_keyed():
    a = mode_generator(1, 64, 0, 0, 3).standard_normal(4)
    b = mode_generator(1, 64, 0, 0, 3).standard_normal(4)
    c = mode_generator(1, 64, 0, 0, 4).standard_normal(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_simulate_noiseless_lag_zero(grid32):
    """T5: noise_scale = 0, hanya lag 0 -> P^YX = B_0 P^XX"""
    spec = ProcessSpec(noise_scale=0.0, filter_lags={0: 1.0})
    X, Y, truth = simulate_pair(spec, grid32, 64, seed=3)
    B0 = truth.filter_bank().op(0)
    stackX, stackY = fdft(X), fdft(Y)
    for s in range(64):
        np.testing.assert_allclose(
            cross_periodogram(stackY, stackX, s).action, compose(B0, periodogram(stackX, s)).action, atol=1e-10
        )


def test_simulate_general_lags(grid32):
    """T6: lag sembarang tanpa wraparound sirkular"""
    spec = ProcessSpec(noise_scale=0.0, filter_lags={0: 1.0, 2: 0.5})
    X, Y, truth = simulate_pair(spec, grid32, 64, seed=9)
    D = truth.filter_bank().op(0).action.real
    expected = X.data[2:] @ D.T + 0.5 * X.data[:-2] @ D.T
    np.testing.assert_allclose(Y.data[2:], expected, atol=1e-12)
    assert truth.filter_bank().L == 2


def test_simulate_lag_zero_covariance(default_spec, grid32):
    """T7: R^_0 ~ sum sigma_j^2 / (1 - rho^2) e_j ⊗ e_j"""
    T = 4096
    X, _, truth = simulate_pair(default_spec, grid32, T, seed=21)
    target = truth.covariance().action
    error = np.linalg.norm(autocovariance(X, 0).action - target)
    assert error <= 5 * T ** -0.5 * np.linalg.norm(target)


def test_simulate_noise_independent_of_covariate(default_spec, grid32):
    """T8: cross-covariance residual eps dan X di lag 0 <= 5 T^-1/2"""
    T = 4096
    X, Y, truth = simulate_pair(default_spec, grid32, T, seed=22)
    D = truth.filter_bank().op(0).action.real
    fitted = X.data[1:-1] @ D.T + 0.4 * (X.data[:-2] + X.data[2:]) @ D.T
    eps = Y.data[1:-1] - fitted
    cross = eps.T @ X.data[1:-1] / ((T - 2) * grid32.m)
    assert np.linalg.norm(cross) <= 5 * T ** -0.5


def test_simulate_eigenvalue_decay(default_spec, grid32):
    """T9: slope log lambda^_j vs log j ~ -alpha untuk j <= J/2"""
    T = 4096
    omega = np.pi / 3
    total = np.zeros((32, 32), dtype=complex)
    for replicate in range(50):
        X, _, _ = simulate_pair(default_spec, grid32, T, seed=4, replicate=replicate)
        stack = fdft(X)
        total += smooth_spectrum_at(stack, None, EPANECHNIKOV, T ** -0.25, omega).action
    values = np.sort(np.linalg.eigvalsh(total / 50))[::-1][:default_spec.J // 2]
    j = np.arange(1, default_spec.J // 2 + 1)
    slope = np.polyfit(np.log(j), np.log(values), 1)[0]
    assert abs(slope + default_spec.alpha) <= 0.25


# ========== closed-form truth ==========

def test_white_noise_spectrum_flat(grid32):
    """T10: rho = 0 -> F^XX = (2 pi)^-1 sum sigma_j^2 e_j ⊗ e_j, konstan di omega"""
    spec = ProcessSpec(rho=0.0)
    truth = GroundTruth(spec, grid32)
    expected = from_eigenpairs(grid32, truth.mode_variances / (2 * np.pi), truth.basis).action
    for omega in (0.0, 1.0, np.pi):
        np.testing.assert_allclose(true_spectral_density(spec, grid32, omega).action, expected, atol=1e-12)


def test_spectral_density_first_mode(default_spec, grid32):
    """T11: rho = 0.5, omega = 0, j = 1 -> 2/pi"""
    truth = GroundTruth(default_spec, grid32)
    e1 = truth.basis[0]
    value = (e1 @ truth.spectral_density(0.0).action @ e1 / grid32.m).real
    assert value == pytest.approx(2 / np.pi, rel=1e-12)

    # jumlah autocovariance terpotong
    rho = default_spec.rho
    t = np.arange(-60, 61)
    oracle = np.sum(rho ** np.abs(t) / (1 - rho ** 2)) / (2 * np.pi)
    assert value == pytest.approx(oracle, abs=1e-12)


def test_spectral_density_separable(default_spec, grid32):
    truth = GroundTruth(default_spec, grid32)
    ratio = truth.ar_spectrum(0.3) / truth.ar_spectrum(2.1)
    a = truth.mode_variances * truth.ar_spectrum(0.3)
    b = truth.mode_variances * truth.ar_spectrum(2.1)
    np.testing.assert_allclose(a / b, ratio, rtol=1e-12)


def test_transfer_constant_without_side_lags(grid32):
    spec = ProcessSpec(filter_lags={0: 1.0})
    base = true_transfer(spec, grid32, 0.0).action
    for omega in (0.7, 2.0, np.pi):
        np.testing.assert_allclose(true_transfer(spec, grid32, omega).action, base, atol=1e-14)


def test_transfer_symmetric_weights(default_spec, grid32):
    """T12: w_1 = w_-1 -> Q_pi = (w_0 - 2 w_1) D"""
    truth = GroundTruth(default_spec, grid32)
    D = from_eigenpairs(grid32, truth.filter_profile, truth.basis).action
    np.testing.assert_allclose(true_transfer(default_spec, grid32, np.pi).action, (1.0 - 0.8) * D, atol=1e-12)


def test_true_filter_roundtrip(default_spec, grid32):
    """T13: roundtrip_check(true_filter, T = 64) <= 1e-10"""
    assert roundtrip_check(true_filter(default_spec, grid32), 64) <= 1e-10


def test_transfer_identity_at_random_frequencies(default_spec, grid32, rng):
    """T14: F^YX = Q F^XX di 32 frekuensi acak"""
    for omega in rng.uniform(0, 2 * np.pi, 32):
        fyx = true_cross_spectral_density(default_spec, grid32, omega).action
        product = compose(true_transfer(default_spec, grid32, omega),
                          true_spectral_density(default_spec, grid32, omega)).action
        assert np.linalg.norm(fyx - product) <= 1e-10 * np.linalg.norm(fyx)


def test_transfer_stack_matches_pointwise(default_spec, grid32):
    truth = GroundTruth(default_spec, grid32)
    stack = truth.transfer_stack(16)
    for s in (0, 3, 8):
        np.testing.assert_allclose(stack[s], truth.transfer(2 * np.pi * s / 16).action, atol=1e-12)
