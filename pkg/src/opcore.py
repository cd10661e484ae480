"""
Aljabar operator di atas grid midpoint [0,1].

Operator disimpan sebagai action matrix A (kernel/m) sehingga
(Af)(tau_i) = sum_j A[i,j] f(tau_j) dan norma Schatten operator sama
dengan norma Schatten matriks A. Nilai kernel = m * action.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from src.errors import DimensionError, NumericError, ParameterError, RidgeNotPositive, StructureError
from src.models import LinOpPayload

logger = logging.getLogger(__name__)

SELF_ADJOINT_RTOL = 1e-8


@dataclass(frozen=True)
class GridContext:
    """Diskretisasi [0,1] dengan m titik tengah dan bobot 1/m"""
    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ParameterError(f"grid resolution must be a positive integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))

    @property
    def points(self) -> np.ndarray:
        return (np.arange(self.m) + 0.5) / self.m

    @property
    def weight(self) -> float:
        return 1.0 / self.m


def _readonly(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class GridFunc:
    """Fungsi di L2[0,1] yang dievaluasi pada titik grid"""
    values: np.ndarray
    grid: GridContext

    def __post_init__(self):
        values = np.array(self.values, dtype=complex).reshape(-1)
        if values.shape[0] != self.grid.m:
            raise DimensionError(f"GridFunc has {values.shape[0]} values, grid has m={self.grid.m}")
        object.__setattr__(self, "values", _readonly(values))


@dataclass(frozen=True, eq=False)
class LinOp:
    """Operator linear terdiskretisasi (complex m x m action matrix)"""
    action: np.ndarray
    grid: GridContext

    def __post_init__(self):
        action = np.array(self.action, dtype=complex)
        m = self.grid.m
        if action.shape != (m, m):
            raise DimensionError(f"LinOp action has shape {action.shape}, expected ({m}, {m})")
        object.__setattr__(self, "action", _readonly(action))

    def apply(self, f: GridFunc) -> GridFunc:
        _check_grid(self.grid, f.grid)
        return GridFunc(self.action @ f.values, self.grid)

    def adjoint(self) -> "LinOp":
        return LinOp(self.action.conj().T, self.grid)

    def is_self_adjoint(self, rtol: float = SELF_ADJOINT_RTOL) -> bool:
        return is_hermitian(self.action, rtol)

    def kernel(self) -> np.ndarray:
        """Nilai kernel k(tau_i, tau_j) = m * action"""
        return self.grid.m * self.action

    def __add__(self, other: "LinOp") -> "LinOp":
        _check_grid(self.grid, other.grid)
        return LinOp(self.action + other.action, self.grid)

    def __sub__(self, other: "LinOp") -> "LinOp":
        _check_grid(self.grid, other.grid)
        return LinOp(self.action - other.action, self.grid)

    def __mul__(self, scalar: complex) -> "LinOp":
        return LinOp(scalar * self.action, self.grid)

    __rmul__ = __mul__

    def to_payload(self) -> LinOpPayload:
        return LinOpPayload(
            m=self.grid.m,
            action_re=self.action.real.tolist(),
            action_im=self.action.imag.tolist(),
        )

    @classmethod
    def from_payload(cls, payload: LinOpPayload) -> "LinOp":
        action = np.asarray(payload.action_re, dtype=float) + 1j * np.asarray(payload.action_im, dtype=float)
        return cls(action, GridContext(payload.m))


def _check_grid(a: GridContext, b: GridContext):
    if a.m != b.m:
        raise DimensionError(f"grid mismatch: m={a.m} vs m={b.m}")


def _check_finite(action: np.ndarray):
    if not np.all(np.isfinite(action)):
        raise NumericError("operator has non-finite entries")


def is_hermitian(action: np.ndarray, rtol: float = SELF_ADJOINT_RTOL) -> bool:
    """Relative Frobenius test ||A - A*|| <= rtol * ||A||"""
    gap = np.linalg.norm(action - np.conj(np.swapaxes(action, -1, -2)))
    return bool(gap <= rtol * np.linalg.norm(action))


def hermitian_part(actions: np.ndarray) -> np.ndarray:
    return 0.5 * (actions + np.conj(np.swapaxes(actions, -1, -2)))


def identity(grid: GridContext) -> LinOp:
    return LinOp(np.eye(grid.m), grid)


def zero(grid: GridContext) -> LinOp:
    return LinOp(np.zeros((grid.m, grid.m)), grid)


def fourier_basis(grid: GridContext, J: int) -> np.ndarray:
    """
    Basis Fourier real e_1 = 1, e_2k = sqrt2 cos(2 pi k tau),
    e_2k+1 = sqrt2 sin(2 pi k tau). Return matriks J x m (baris = e_j).
    """
    if J < 1:
        raise ParameterError(f"basis size must be >= 1, got {J}")
    tau = grid.points
    rows = []
    for j in range(1, J + 1):
        k = j // 2
        if j == 1:
            rows.append(np.ones(grid.m))
        elif j % 2 == 0:
            rows.append(np.sqrt(2.0) * np.cos(2 * np.pi * k * tau))
        else:
            rows.append(np.sqrt(2.0) * np.sin(2 * np.pi * k * tau))
    return np.vstack(rows)


def fourier_function(grid: GridContext, j: int) -> GridFunc:
    return GridFunc(fourier_basis(grid, j)[j - 1], grid)


def inner(f: GridFunc, g: GridFunc) -> complex:
    """<f, g> = (1/m) sum_k f_k conj(g_k)"""
    _check_grid(f.grid, g.grid)
    return complex(f.grid.weight * np.sum(f.values * np.conj(g.values)))


def l2_norm(f: GridFunc) -> float:
    return float(np.sqrt(max(inner(f, f).real, 0.0)))


def tensor(f: GridFunc, g: GridFunc) -> LinOp:
    """(f ⊗ g) u = <u, g> f"""
    _check_grid(f.grid, g.grid)
    return LinOp(np.outer(f.values, np.conj(g.values)) / f.grid.m, f.grid)


def schatten_norm(A: LinOp, order: Union[int, float, str] = 2) -> float:
    """Norma Schatten orde 1 (nuclear), 2 (Hilbert-Schmidt) atau inf (operator)"""
    _check_finite(A.action)
    if order == 2:
        return float(np.linalg.norm(A.action, "fro"))
    if order not in (1, np.inf, "inf"):
        raise ParameterError(f"unsupported Schatten order {order!r}")
    singular = scipy.linalg.svdvals(A.action)
    if order == 1:
        return float(np.sum(singular))
    return float(singular.max()) if singular.size else 0.0


def hs_norm(A: LinOp) -> float:
    return schatten_norm(A, 2)


def compose(A: LinOp, B: LinOp) -> LinOp:
    _check_grid(A.grid, B.grid)
    return LinOp(A.action @ B.action, A.grid)


def tikhonov_inverse_stack(actions: np.ndarray, zeta: float) -> np.ndarray:
    """
    [A_s + zeta I]^-1 untuk setiap matriks dalam stack (..., m, m).

    Matriks disimetrisasi dulu; guard: min eigenvalue + zeta harus > 0.
    """
    if not np.isfinite(zeta) or zeta <= 0:
        raise ParameterError(f"Tikhonov parameter must be positive, got {zeta!r}")
    _check_finite(actions)
    H = hermitian_part(np.asarray(actions, dtype=complex))
    w, V = np.linalg.eigh(H)
    floor = w[..., 0] + zeta
    bad = np.flatnonzero(np.atleast_1d(floor) <= 0)
    if bad.size:
        lowest = float(np.atleast_1d(w[..., 0])[bad].min())
        logger.debug(f"Ridge guard fired: {bad.size} matrices, lowest eigenvalue {lowest:.3e}")
        raise RidgeNotPositive(lowest, zeta, bad.tolist() if np.ndim(floor) else None)
    scaled = V / (w + zeta)[..., None, :]
    return scaled @ np.conj(np.swapaxes(V, -1, -2))


def tikhonov_inverse(A: LinOp, zeta: float) -> LinOp:
    """Ridge-regularised inverse [A + zeta I]^-1"""
    if not A.is_self_adjoint():
        raise StructureError("tikhonov_inverse requires a self-adjoint operator")
    return LinOp(tikhonov_inverse_stack(A.action, zeta), A.grid)


def eigh_stack(actions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalue menurun dan eigenvector (kolom, norma Euclid 1) per matriks"""
    _check_finite(actions)
    w, V = np.linalg.eigh(hermitian_part(np.asarray(actions, dtype=complex)))
    return w[..., ::-1], V[..., ::-1]


def eigh(A: LinOp) -> Tuple[np.ndarray, List[GridFunc]]:
    """
    Dekomposisi spektral operator self-adjoint.
    Eigenfunction orthonormal terhadap inner(): phi_n = sqrt(m) * v_n.
    """
    if not A.is_self_adjoint():
        raise StructureError("eigh requires a self-adjoint operator")
    values, vectors = eigh_stack(A.action)
    scale = np.sqrt(A.grid.m)
    functions = [GridFunc(scale * vectors[:, n], A.grid) for n in range(A.grid.m)]
    return values, functions


def from_eigenpairs(grid: GridContext, values: Sequence[complex],
                    functions: Union[Sequence[GridFunc], np.ndarray]) -> LinOp:
    """sum_n c_n (phi_n ⊗ phi_n)"""
    if isinstance(functions, np.ndarray):
        Phi = np.asarray(functions, dtype=complex)
    else:
        for f in functions:
            _check_grid(grid, f.grid)
        Phi = np.array([f.values for f in functions], dtype=complex).reshape(-1, grid.m)
    coeffs = np.asarray(values, dtype=complex)
    if Phi.shape != (coeffs.shape[0], grid.m):
        raise DimensionError(f"{coeffs.shape[0]} coefficients for function matrix {Phi.shape}")
    return LinOp((Phi.T * coeffs) @ np.conj(Phi) / grid.m, grid)
