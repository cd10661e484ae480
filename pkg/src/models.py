from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Dict, List, Literal, Optional


class LinOpPayload(BaseModel):
    """Export JSON untuk LinOp (action matrix, bukan kernel)"""
    m: int = Field(..., ge=1, description="Grid resolution")
    action_re: List[List[float]] = Field(..., description="Real part of the action matrix (kernel = m * action)")
    action_im: List[List[float]] = Field(..., description="Imaginary part of the action matrix")

    @model_validator(mode="after")
    def check_shape(self):
        for part in (self.action_re, self.action_im):
            if len(part) != self.m or any(len(row) != self.m for row in part):
                raise ValueError(f"action must be {self.m}x{self.m}")
        return self


class FilterBankPayload(BaseModel):
    """Export JSON untuk FilterBank"""
    L: int = Field(..., ge=0, description="Support radius")
    lags: List[int] = Field(..., description="Sorted lags")
    ops: List[LinOpPayload] = Field(..., description="One LinOp per lag, same order as lags")
    imag_mass: float = Field(0.0, description="Imaginary HS mass relative to total HS mass")

    @model_validator(mode="after")
    def check_lags(self):
        if len(self.lags) != len(self.ops):
            raise ValueError("lags and ops must have the same length")
        if self.lags != sorted(set(self.lags)):
            raise ValueError("lags must be sorted and unique")
        if any(abs(lag) > self.L for lag in self.lags):
            raise ValueError("every lag must satisfy |lag| <= L")
        return self


class SpectralCurvePayload(BaseModel):
    """Export JSON untuk SpectralCurve"""
    kind: Literal["auto", "cross"]
    bandwidth: float
    ops: List[LinOpPayload]


class EstimateDiagnostics(BaseModel):
    """Diagnostik yang ditulis bersama bank.json"""
    guard: Literal["ok", "failed"]
    imag_mass: float
    hs_summability: float
    parseval_relative_error: Optional[float] = Field(None, description="Lag-domain vs frequency-domain HS mass of the Q curve")
    estimator: str
    kernel: str
    kernel_order: int
    T: int
    zeta_T: float
    B_T: float
    rate_exponent: float
    rank: Optional[int] = None
    mse_freq: Optional[float] = Field(None, description="Only when a truth manifest is supplied")
    mse_lag: Optional[float] = None


class EstimateReport(FilterBankPayload):
    """bank.json: FilterBank plus blok diagnostics"""
    diagnostics: EstimateDiagnostics


class ProcessSpec(BaseModel):
    """Spesifikasi proses simulasi (X AR(1) per mode Fourier, filter diagonal)"""
    J: int = Field(8, ge=1, description="Number of Fourier basis modes")
    alpha: float = Field(2.0, description="Eigenvalue decay: sigma_j^2 = j^-alpha")
    rho: float = Field(0.5, description="AR(1) coefficient per mode")
    beta: float = Field(2.0, description="Filter decay: j^-beta")
    filter_lags: Dict[int, float] = Field(
        default_factory=lambda: {-1: 0.4, 0: 1.0, 1: 0.4},
        description="Scalar weight w_l per lag l"
    )
    noise_alpha: float = Field(2.0, description="Noise eigenvalue decay exponent")
    noise_scale: float = Field(1.0, ge=0.0, description="Multiplier on noise variances")

    model_config = {
        "json_schema_extra": {
            "example": {
                "J": 8, "alpha": 2.0, "rho": 0.5, "beta": 2.0,
                "filter_lags": {"-1": 0.4, "0": 1.0, "1": 0.4},
                "noise_alpha": 2.0, "noise_scale": 1.0
            }
        }
    }

    @model_validator(mode="after")
    def check_assumptions(self):
        if not abs(self.rho) < 1:
            raise ValueError(f"|rho| < 1 required, got rho={self.rho}")
        if not self.alpha > 1:
            raise ValueError(f"alpha > 1 required, got alpha={self.alpha}")
        if not self.beta > 0.5:
            raise ValueError(f"beta > 1/2 required, got beta={self.beta}")
        if not self.alpha < self.beta + 0.5:
            raise ValueError(f"alpha < beta + 1/2 required, got alpha={self.alpha}, beta={self.beta}")
        if not self.noise_alpha > 1:
            raise ValueError(f"noise_alpha > 1 required, got {self.noise_alpha}")
        if not self.filter_lags:
            raise ValueError("filter_lags must not be empty")
        return self

    @property
    def lag_radius(self) -> int:
        return max(abs(lag) for lag in self.filter_lags)


class StudyConfig(BaseModel):
    """Konfigurasi Monte Carlo study"""
    spec: ProcessSpec = Field(default_factory=ProcessSpec)
    m: int = Field(32, ge=1, description="Grid resolution")
    T_list: List[int] = Field(..., min_length=1, description="Increasing powers of two")
    replicates: int = Field(..., ge=2)
    alpha: float = 2.0
    beta: float = 2.0
    gamma: float = 0.25
    L_eval: int = Field(3, ge=0, description="Lag radius for the windowed metric")
    seed: int = Field(0, ge=0)
    estimator: Literal["tikhonov", "truncation"] = "tikhonov"
    truncation_exponent: Optional[float] = Field(
        None, gt=0, description="K(T) = round(T^kappa); default kappa = 1/(alpha + 2 beta)"
    )
    kernel: str = "epanechnikov"
    kernel_order: Optional[int] = None

    @field_validator("T_list")
    @classmethod
    def check_T_list(cls, v: List[int]) -> List[int]:
        for T in v:
            if T < 4 or T & (T - 1):
                raise ValueError(f"every T must be a power of two >= 4, got {T}")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("T_list must be strictly increasing")
        return v


class StudyRow(BaseModel):
    """Satu baris hasil per T"""
    T: int
    B_T: float
    zeta_T: float
    mse_freq_mean: Optional[float] = None
    mse_freq_se: Optional[float] = None
    mse_lag_mean: Optional[float] = None
    guard_failures: int = 0
    replicates: Optional[int] = None
    mse_freq_restricted: Optional[float] = Field(
        None, description="Sum over guarded replicates / all replicates"
    )
    mse_window_mean: Optional[float] = None
    rank: Optional[int] = None


class StudyResult(BaseModel):
    """Hasil study: baris per T plus fit log-log"""
    rows: List[StudyRow] = Field(default_factory=list)
    slope: Optional[float] = None
    slope_se: Optional[float] = None
    predicted_slope: Optional[float] = None
    spearman: Optional[float] = None
    config: Optional[StudyConfig] = None


class KernelMomentReport(BaseModel):
    """Report dari kernel_moment_check"""
    name: str
    order: int
    moments: List[float] = Field(description="Moments 0..order")
    tolerance: float
    passed: bool
    total_variation: float
    min_value: float


class TruthManifest(BaseModel):
    """truth.json yang ditulis oleh `simulate`"""
    spec: ProcessSpec
    m: int
    T: int
    seed: int
    replicate: int = 0
    checksums: Dict[str, str] = Field(default_factory=dict, description="SHA-256 per written file")
    filter: FilterBankPayload


class ArtifactManifest(BaseModel):
    """manifest.json untuk output study"""
    command: str
    files: Dict[str, str] = Field(default_factory=dict, description="SHA-256 per artifact")


class VerifyCheck(BaseModel):
    """Hasil satu check pada `verify`"""
    name: str
    passed: bool
    value: float
    tolerance: float
