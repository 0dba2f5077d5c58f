"""Request/response models of the HTTP API."""

from __future__ import annotations

from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from ..config import RunConfig, TrapParams


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class HealthResponse(_Model):
    status: str
    version: str


class ModesInfoRequest(_Model):
    trap: TrapParams = TrapParams()


class ModesInfoResponse(_Model):
    separation_m: float
    f_com_hz: dict
    f_rel_hz: dict
    omega_com_rad_s: dict
    omega_rel_rad_s: dict


class ImagePayload(_Model):
    pixels: List[List[float]]
    phi_rad: List[float]
    phi_out_rad: List[float]
    channel: Literal["pi", "sigma", "unpol"]
    is_counts: bool


class ProfilePayload(_Model):
    phi_rad: List[float]
    values: List[float]
    stderr: Optional[List[float]] = None


class SimulateImageRequest(_Model):
    config: RunConfig = RunConfig()


class SimulateImageResponse(_Model):
    image: ImagePayload
    config: RunConfig
    seed: int


class SimulateProfileRequest(_Model):
    config: RunConfig = RunConfig()
    phi_out_window_deg: Optional[Tuple[float, float]] = None


class SimulateProfileResponse(_Model):
    profile: ProfilePayload
    channel: str
    config: RunConfig
    seed: int


class FitFringeRequest(_Model):
    config: RunConfig = RunConfig()
    profile: ProfilePayload


class FittedParams(_Model):
    amplitude: float
    background: float
    t_rock_k: float
    visibility_scale: float


class VisibilityExtrapolation(_Model):
    value: float
    error: float
    contrast_at_zero: float


class FitFringeResponse(_Model):
    converged: bool
    n_iter: int
    n_points: int
    message: str
    params: Optional[FittedParams] = None
    one_sigma: Optional[FittedParams] = None
    reduced_chi2: Optional[float] = None
    covariance: Optional[List[List[float]]] = None
    extrapolated_visibility: Optional[VisibilityExtrapolation] = None
    config: RunConfig
    seed: int


class JumpsSimulateRequest(_Model):
    config: RunConfig = RunConfig()


class JumpsSimulateResponse(_Model):
    counts: List[int]
    bin_width_s: float
    p_on: float
    p_off: float
    gated_fraction: float
    config: RunConfig
    seed: int


class JumpsCalibrateRequest(_Model):
    config: RunConfig = RunConfig()
    counts: List[int]
    bin_width_s: float = 5e-3


class JumpsCalibrateResponse(_Model):
    converged: bool
    n_iter: int
    means: List[float]
    widths: List[float]
    amplitudes: List[float]
    area_fractions: List[float]
    area_fraction_errors: List[float]
    reduced_chi2: float
    p_ratio: float
    p_ratio_error: float
    saturation: float
    saturation_error: float
    gated_fraction: Optional[float] = None
    config: RunConfig


class CheckResult(_Model):
    name: str
    passed: bool
    detail: str


class SelfCheckResponse(_Model):
    passed: bool
    checks: List[CheckResult]
