"""
Generator ground truth: X AR(1) per mode Fourier, Y = sum_l B_l X_{t-l} + eps.

Semua operator truth diagonal di basis Fourier real sehingga F^XX, F^YX,
Q dan filter tersedia dalam bentuk tertutup.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.signal

from src.errors import ConfigurationError
from src.models import ProcessSpec
from src.opcore import GridContext, LinOp, fourier_basis, from_eigenpairs
from src.regression import FilterBank
from src.spectral import FuncSeries, fourier_frequencies

logger = logging.getLogger(__name__)

STREAM_SIGNAL = 0
STREAM_NOISE = 1


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Operator-operator true untuk ProcessSpec pada grid tertentu"""
    spec: ProcessSpec
    grid: GridContext

    def __post_init__(self):
        if 4 * self.spec.J > self.grid.m:
            raise ConfigurationError(
                f"J={self.spec.J} modes need m >= 4J for orthonormality on the grid (m={self.grid.m})"
            )

    @property
    def basis(self) -> np.ndarray:
        return fourier_basis(self.grid, self.spec.J)

    @property
    def mode_variances(self) -> np.ndarray:
        """sigma_j^2 = j^-alpha"""
        return np.arange(1, self.spec.J + 1, dtype=float) ** -self.spec.alpha

    @property
    def filter_profile(self) -> np.ndarray:
        """j^-beta"""
        return np.arange(1, self.spec.J + 1, dtype=float) ** -self.spec.beta

    @property
    def noise_variances(self) -> np.ndarray:
        j = np.arange(1, self.spec.J + 1, dtype=float)
        return self.spec.noise_scale * j ** -self.spec.noise_alpha

    def ar_spectrum(self, omega):
        """f_AR(w) = (2 pi)^-1 / |1 - rho e^{-iw}|^2"""
        return 1.0 / (2 * np.pi * np.abs(1 - self.spec.rho * np.exp(-1j * np.asarray(omega))) ** 2)

    def transfer_scalar(self, omega):
        """sum_l w_l e^{-i w l}"""
        omega = np.asarray(omega, dtype=float)
        return sum(w * np.exp(-1j * omega * lag) for lag, w in self.spec.filter_lags.items())

    def _diagonal(self, values) -> LinOp:
        return from_eigenpairs(self.grid, values, self.basis)

    def spectral_density(self, omega: float) -> LinOp:
        return self._diagonal(self.mode_variances * self.ar_spectrum(omega))

    def transfer(self, omega: float) -> LinOp:
        return self._diagonal(self.transfer_scalar(omega) * self.filter_profile)

    def cross_spectral_density(self, omega: float) -> LinOp:
        """Dibangun langsung dari koefisien, bukan lewat compose"""
        return self._diagonal(
            self.transfer_scalar(omega) * self.filter_profile * self.mode_variances * self.ar_spectrum(omega)
        )

    def filter_bank(self) -> FilterBank:
        ops = {lag: self._diagonal(w * self.filter_profile) for lag, w in self.spec.filter_lags.items()}
        return FilterBank(ops, self.spec.lag_radius, self.grid)

    def transfer_stack(self, T: int) -> np.ndarray:
        """Q_{nu_s} untuk s = 0..T-1 sebagai array T x m x m"""
        profile = self._diagonal(self.filter_profile).action
        return self.transfer_scalar(fourier_frequencies(T))[:, None, None] * profile

    def covariance(self) -> LinOp:
        """R_0 = sum_j sigma_j^2 / (1 - rho^2) e_j ⊗ e_j"""
        return self._diagonal(self.mode_variances / (1 - self.spec.rho ** 2))

    def noise_covariance(self) -> LinOp:
        return self._diagonal(self.noise_variances)


def true_spectral_density(spec: ProcessSpec, grid: GridContext, omega: float) -> LinOp:
    return GroundTruth(spec, grid).spectral_density(omega)


def true_cross_spectral_density(spec: ProcessSpec, grid: GridContext, omega: float) -> LinOp:
    return GroundTruth(spec, grid).cross_spectral_density(omega)


def true_transfer(spec: ProcessSpec, grid: GridContext, omega: float) -> LinOp:
    return GroundTruth(spec, grid).transfer(omega)


def true_filter(spec: ProcessSpec, grid: GridContext) -> FilterBank:
    return GroundTruth(spec, grid).filter_bank()


def mode_generator(seed: int, T: int, replicate: int, stream: int, mode: int) -> np.random.Generator:
    """Generator Philox dengan key (seed, T, replicate, stream, mode)"""
    sequence = np.random.SeedSequence(seed, spawn_key=(T, replicate, stream, mode))
    return np.random.Generator(np.random.Philox(sequence))


def _stationary_ar1(rng: np.random.Generator, rho: float, n: int) -> np.ndarray:
    """AR(1) dengan inovasi unit, xi_0 dari distribusi stasioner"""
    shocks = rng.standard_normal(n)
    shocks[0] /= np.sqrt(1 - rho ** 2)
    return scipy.signal.lfilter([1.0], [1.0, -rho], shocks)


def simulate_pair(spec: ProcessSpec, grid: GridContext, T: int, seed: int,
                  replicate: int = 0) -> Tuple[FuncSeries, FuncSeries, GroundTruth]:
    """
    Simulasikan (X_t, Y_t), t = 0..T-1.

    X disimulasikan pada t = -r..T-1+r (r = radius lag filter) supaya
    konvolusi tidak perlu wraparound sirkular.
    """
    if int(T) != T or T < 4:
        raise ConfigurationError(f"simulation needs T >= 4, got T={T}")
    if seed < 0 or replicate < 0:
        raise ConfigurationError(f"seed and replicate must be non-negative (seed={seed}, replicate={replicate})")
    truth = GroundTruth(spec, grid)
    T = int(T)
    r = spec.lag_radius
    n = T + 2 * r
    J = spec.J

    xi = np.vstack([
        _stationary_ar1(mode_generator(seed, T, replicate, STREAM_SIGNAL, j), spec.rho, n)
        for j in range(1, J + 1)
    ])
    x_coeffs = np.sqrt(truth.mode_variances)[:, None] * xi

    y_coeffs = np.zeros((J, T))
    for lag, w in spec.filter_lags.items():
        y_coeffs += w * truth.filter_profile[:, None] * x_coeffs[:, r - lag:r - lag + T]
    if spec.noise_scale > 0:
        noise = np.vstack([
            mode_generator(seed, T, replicate, STREAM_NOISE, j).standard_normal(T)
            for j in range(1, J + 1)
        ])
        y_coeffs += np.sqrt(truth.noise_variances)[:, None] * noise

    basis = truth.basis
    X = FuncSeries(x_coeffs[:, r:r + T].T @ basis, grid)
    Y = FuncSeries(y_coeffs.T @ basis, grid)
    logger.debug(f"Simulated pair: T={T}, m={grid.m}, J={J}, seed={seed}, replicate={replicate}")
    return X, Y, truth
