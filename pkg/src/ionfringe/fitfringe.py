"""Least-squares fitting of 1D fringe profiles.

The model is the detected-channel angular factor evaluated along the
in-plane angle at phi_out = 0, with an overall amplitude, a constant
background, one fitted rock-mode temperature (the stretch temperature is
tied to it by the laser-cooling ratio), and a visibility scale multiplying
the interference term:

    A * { cos^2 polar + sin^2 polar * [1 + V0 cos(q.d) dw(q, T)] } + B

(for the pi-detected channel; unpolarized adds 1 inside the braces).
The extrapolation of the fringe visibility to the forward direction is V0,
since both cos(q.d) and dw tend to 1 there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    BeamGeometry,
    DetectorDirection,
    atom_angles,
    atom_frame,
    k_in_vector,
    k_out_vector,
    scattering_vector,
)
from .modes import ModeSpectrum
from .optimize import LMResult, levenberg_marquardt
from .scatter import Channel
from .thermal import ModeTemperatures, ThermalState, debye_waller, temperature_ratio

PARAM_NAMES = ("amplitude", "background", "t_rock", "visibility_scale")

# bounds enforced by projection during the fit; the visibility scale is
# allowed a little slack above 1 so noise cannot pin it at the bound
PARAM_LOWER = (1e-300, 0.0, 0.0, 0.0)
PARAM_UPPER = (math.inf, math.inf, math.inf, 1.05)


@dataclass(frozen=True)
class FringeModelParams:
    """Free parameters of the profile model."""

    amplitude: float          # profile units
    background: float         # profile units
    t_rock: float             # K, rock-mode temperature (stretch is tied to it)
    visibility_scale: float   # dimensionless, in [0, 1.05]

    def __post_init__(self):
        if self.amplitude <= 0.0:
            raise ValueError("amplitude must be positive")
        if self.background < 0.0 or self.t_rock < 0.0:
            raise ValueError("background and temperature must be >= 0")
        if not 0.0 <= self.visibility_scale <= 1.05:
            raise ValueError("visibility_scale must be in [0, 1.05]")

    def as_array(self) -> np.ndarray:
        return np.array([self.amplitude, self.background, self.t_rock, self.visibility_scale])


@dataclass(frozen=True)
class FringeFitSetup:
    """Everything held fixed during the fit.

    The ion separation comes from the mode spectrum (i.e. from the trap
    parameters), never from the data.  ``stretch_to_rock_ratio`` defaults
    to the laser-cooling theory value for the beam angle.
    """

    beam: BeamGeometry
    spectrum: ModeSpectrum
    mass: float
    channel: Channel = Channel.PI
    stretch_to_rock_ratio: float | None = None
    phase_offset: float = 0.0   # rad, absorbs the in-plane rotation sign convention

    def ratio(self) -> float:
        if self.stretch_to_rock_ratio is not None:
            return self.stretch_to_rock_ratio
        return temperature_ratio(self.beam.theta_in)


@dataclass(frozen=True)
class FitResult:
    """Converged parameters with 1-sigma errors from the fit covariance."""

    params: FringeModelParams | None
    one_sigma: dict | None
    reduced_chi2: float | None
    covariance: np.ndarray | None
    converged: bool
    n_iter: int
    n_points: int
    message: str


def _thermal_state(setup: FringeFitSetup, t_rock: float) -> ThermalState:
    t_stretch = setup.ratio() * t_rock
    return ThermalState(
        temperatures=ModeTemperatures(t_x=t_rock, t_y=t_rock, t_z=t_stretch),
        spectrum=setup.spectrum,
        mass=setup.mass,
    )


def model_profile(phi_grid, params: FringeModelParams, setup: FringeFitSetup) -> np.ndarray:
    """Model values on a grid of in-plane angles (radians), at phi_out = 0."""
    return _model(np.asarray(phi_grid, dtype=float), params.as_array(), setup)


def _model(phi_grid: np.ndarray, x: np.ndarray, setup: FringeFitSetup) -> np.ndarray:
    amplitude, background, t_rock, vis = x
    state = _thermal_state(setup, max(t_rock, 0.0))
    k_in = k_in_vector(setup.beam)
    triad = atom_frame(setup.beam)
    d = setup.spectrum.separation
    out = np.empty(phi_grid.size)
    for idx, phi in enumerate(phi_grid):
        k_out = k_out_vector(setup.beam, DetectorDirection(phi=float(phi), phi_out=0.0))
        q = scattering_vector(k_in, k_out)
        dw = debye_waller(q, state)
        polar = atom_angles(k_out, triad).polar
        c2 = math.cos(polar) ** 2
        s2 = math.sin(polar) ** 2
        fringe = s2 * (1.0 + vis * math.cos(q.z * d + setup.phase_offset) * dw)
        if setup.channel is Channel.PI:
            shape = c2 + fringe
        elif setup.channel is Channel.UNPOLARIZED:
            shape = 1.0 + c2 + fringe
        else:
            shape = 1.0
        out[idx] = amplitude * shape + background
    return out


def fit_profile(
    phi,
    values,
    stderr=None,
    initial: FringeModelParams | None = None,
    setup: FringeFitSetup = None,
    vary_background: bool = False,
    max_iter: int = 200,
    xtol: float = 1e-9,
    gtol: float = 1e-10,
) -> FitResult:
    """Weighted Levenberg-Marquardt fit of the profile model.

    ``stderr`` entries that are zero or missing fall back to unit weights.
    A non-converged fit is returned with ``converged=False`` and no
    parameter errors.

    The background is held at its initial value unless ``vary_background``
    is set: for every channel the angular factors sum to a constant plus
    the fringe term, so a free background is exactly degenerate with the
    amplitude and visibility scale (only A + B and A * V0 would be
    determined) and the fit would end in singular normal equations.
    """
    if setup is None:
        raise ValueError("a FringeFitSetup is required")
    phi = np.asarray(phi, dtype=float)
    values = np.asarray(values, dtype=float)
    if phi.size != values.size:
        raise ValueError("phi and values must have the same length")
    if phi.size < 8:
        raise ValueError(f"need at least 8 data points, got {phi.size}")
    if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(values))):
        raise ValueError("profile contains non-finite values")
    if stderr is None:
        sigma = np.ones_like(values)
    else:
        sigma = np.asarray(stderr, dtype=float).copy()
        if sigma.shape != values.shape:
            raise ValueError("stderr must match values")
        sigma[sigma <= 0.0] = 1.0
    if initial is None:
        initial = default_initial_guess(values)

    free = [0, 1, 2, 3] if vary_background else [0, 2, 3]
    x_full = initial.as_array()

    def residual(x: np.ndarray) -> np.ndarray:
        full = x_full.copy()
        full[free] = x
        return (_model(phi, full, setup) - values) / sigma

    res: LMResult = levenberg_marquardt(
        residual,
        x_full[free],
        lower=np.array(PARAM_LOWER)[free],
        upper=np.array(PARAM_UPPER)[free],
        max_iter=max_iter,
        xtol=xtol,
        gtol=gtol,
    )
    if not res.converged:
        return FitResult(
            params=None,
            one_sigma=None,
            reduced_chi2=None,
            covariance=None,
            converged=False,
            n_iter=res.n_iter,
            n_points=phi.size,
            message=res.message,
        )
    x_fit = x_full.copy()
    x_fit[free] = res.x
    amplitude, background, t_rock, vis = x_fit
    params = FringeModelParams(
        amplitude=amplitude,
        background=background,
        t_rock=t_rock,
        visibility_scale=min(max(vis, 0.0), 1.05),
    )
    sigmas = np.zeros(4)
    sigmas[free] = res.one_sigma
    covariance = np.zeros((4, 4))
    covariance[np.ix_(free, free)] = res.covariance
    errors = dict(zip(PARAM_NAMES, sigmas))
    return FitResult(
        params=params,
        one_sigma=errors,
        reduced_chi2=res.reduced_chi2,
        covariance=covariance,
        converged=True,
        n_iter=res.n_iter,
        n_points=phi.size,
        message=res.message,
    )


def default_initial_guess(values: np.ndarray) -> FringeModelParams:
    """Rough starting point: amplitude near the profile mean, no background,
    millikelvin-scale temperature, strong fringes."""
    mean = float(np.mean(values))
    return FringeModelParams(
        amplitude=max(mean, 1e-12),
        background=0.0,
        t_rock=1.0e-3,
        visibility_scale=0.7,
    )


def extrapolated_visibility(result: FitResult, setup: FringeFitSetup) -> tuple[float, float, float]:
    """Fringe visibility extrapolated to the forward direction.

    Returns (visibility, 1-sigma error, contrast factor at phi = 0).  At
    phi = phi_out = 0 the scattering vector vanishes, so the contrast
    factor is 1 and the extrapolated visibility is the fitted scale; the
    factor is still evaluated through the full pipeline and reported.
    """
    if not result.converged or result.params is None:
        raise ValueError("visibility extrapolation requires a converged fit")
    state = _thermal_state(setup, result.params.t_rock)
    k_in = k_in_vector(setup.beam)
    k_out = k_out_vector(setup.beam, DetectorDirection(phi=0.0, phi_out=0.0))
    dw0 = debye_waller(scattering_vector(k_in, k_out), state)
    return (
        result.params.visibility_scale * dw0,
        result.one_sigma["visibility_scale"] * dw0,
        dw0,
    )


def saturation_visibility_correction(s: float) -> float:
    """Visibility reduction 1/(1+s) from the incoherent part of the
    fluorescence at saturation parameter s."""
    if s < 0.0:
        raise ValueError("saturation parameter must be >= 0")
    return 1.0 / (1.0 + s)
