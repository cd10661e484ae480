"""
Hierarki exception untuk ftsreg.

Dua keluarga: ValidationFailure (input/konfigurasi salah, exit code 1)
dan NumericFailure (perhitungan gagal, exit code 2).
"""


class FtsRegError(Exception):
    """Base exception untuk semua error ftsreg"""


class ValidationFailure(FtsRegError, ValueError):
    """Input, parameter atau konfigurasi tidak valid"""
    exit_code = 1


class NumericFailure(FtsRegError, ArithmeticError):
    """Perhitungan numerik tidak bisa diselesaikan"""
    exit_code = 2


class DimensionError(ValidationFailure):
    """Grid, panjang deret atau ukuran matriks tidak cocok"""


class ParameterError(ValidationFailure):
    """Parameter di luar domain yang diizinkan"""


class ScheduleError(ParameterError):
    """Parameter tuning melanggar batas admissible"""


class ConfigurationError(ParameterError):
    """ProcessSpec atau StudyConfig tidak konsisten dengan grid / T"""


class AliasingError(ParameterError):
    """Radius lag filter terlalu besar untuk panjang T"""


class StructureError(ValidationFailure):
    """Operator tidak self-adjoint padahal diwajibkan"""


class FormatError(ValidationFailure):
    """File CSV/JSON tidak sesuai format"""


class NumericError(NumericFailure):
    """Entri non-finite atau hasil numerik tidak valid"""


class RidgeNotPositive(NumericFailure):
    """F + zeta*I tidak positive definite (guard Tikhonov)"""

    def __init__(self, min_eigenvalue: float, zeta: float, indices=None):
        self.min_eigenvalue = float(min_eigenvalue)
        self.zeta = float(zeta)
        self.indices = list(indices) if indices is not None else []
        where = f" at stack indices {self.indices[:8]}" if self.indices else ""
        super().__init__(
            f"ridge not positive definite{where}: "
            f"min eigenvalue {self.min_eigenvalue!r} + zeta {self.zeta!r} <= 0"
        )


class RankError(NumericFailure):
    """Eigenvalue ke-K tidak positif untuk truncation"""
