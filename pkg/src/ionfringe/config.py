"""Run configuration: validated, JSON-serializable, paper-experiment defaults.

Human-facing units live here (degrees, nm, mK, amu) and are converted once
when the core objects are built.  Unknown keys are rejected with the field
path, so a config file is always fully understood or fully refused.

seeds: one root ``seed`` feeds named substreams (image noise, telegraph,
Monte Carlo oracles), so a single number pins every random artifact.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import geometry, imaging, modes, scatter, thermal
from .constants import ATOMIC_MASS_UNIT, ELEMENTARY_CHARGE

DEG = math.pi / 180.0


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TrapParams(_Section):
    """Trap and ion parameters.  The axial frequency is back-derived from
    ``separation_um`` unless ``f_axial_hz`` is given explicitly; the radial
    frequency defaults to twice the axial one."""

    mass_amu: float = Field(default=197.967, gt=0)
    charge_e: float = 1.0
    f_axial_hz: Optional[float] = Field(default=None, gt=0)
    f_radial_hz: Optional[float] = Field(default=None, gt=0)
    separation_um: float = Field(default=4.17, gt=0)


class BeamParams(_Section):
    """Incoming beam: angle from the trap axis, wavelength, polarization
    either perpendicular to the scattering plane or inside it."""

    theta_deg: float = Field(default=62.0, gt=0, lt=180)
    wavelength_nm: float = Field(default=194.2, gt=0)
    polarization: Literal["out_of_plane", "in_plane"] = "out_of_plane"
    eps_in: Optional[Tuple[float, float, float]] = None


class DetectorParams(_Section):
    """``profile_phi_out_deg`` is the band summed into 1D profiles.  It is
    narrow by default: the fringe phase falls off quadratically with the
    out-of-plane angle, so summing the full detector height would smear the
    fringes that the phi_out = 0 profile model describes."""

    phi_deg: Tuple[float, float] = (15.0, 45.0)
    phi_out_deg: Tuple[float, float] = (-15.0, 15.0)
    n_phi: int = Field(default=256, ge=2)
    n_phi_out: int = Field(default=64, ge=2)
    channel: Literal["pi", "sigma", "unpol"] = "pi"
    profile_phi_out_deg: Optional[Tuple[float, float]] = (-1.5, 1.5)


class ThermalParams(_Section):
    """Relative-mode temperatures.  Unset values default to the rock-X
    temperature (Y) and to the laser-cooling theory ratio times it (Z)."""

    t_rock_x_mk: float = Field(default=1.08, ge=0)
    t_rock_y_mk: Optional[float] = Field(default=None, ge=0)
    t_stretch_mk: Optional[float] = Field(default=None, ge=0)


class ScatterParams(_Section):
    """Transition parameters; the resonance wavelength defaults to the beam
    wavelength (resonant excitation)."""

    wavelength_0_nm: Optional[float] = Field(default=None, gt=0)
    linewidth_hz: float = Field(default=70.0e6, gt=0)
    detuning_hz: float = 0.0


class NoiseParams(_Section):
    enabled: bool = False
    exposure_scale: float = Field(default=2000.0, ge=0)
    background_rate: float = Field(default=5.0, ge=0)


class FitParams(_Section):
    """``vary_background`` frees the constant background; it is exactly
    degenerate with the amplitude and visibility scale, so by default the
    background is held at its initial value."""

    max_iter: int = Field(default=200, ge=1)
    xtol: float = Field(default=1e-9, gt=0)
    gtol: float = Field(default=1e-10, gt=0)
    phase_offset_rad: float = 0.0
    vary_background: bool = False
    initial_amplitude: Optional[float] = Field(default=None, gt=0)
    initial_background: Optional[float] = Field(default=None, ge=0)
    initial_t_rock_mk: Optional[float] = Field(default=None, ge=0)
    initial_visibility: Optional[float] = Field(default=None, ge=0, le=1.05)


class JumpsParams(_Section):
    ratio: float = Field(default=0.10, gt=0)
    rate_off_to_on_hz: float = Field(default=4.0, gt=0)
    bin_width_ms: float = Field(default=5.0, gt=0)
    duration_s: float = Field(default=600.0, gt=0)
    rate_per_on_ion: float = Field(default=60.0, ge=0)
    background: float = Field(default=5.0, ge=0)
    gate_threshold: float = Field(default=80.0, ge=0)
    gate_histogram: bool = False
    calib_coefficient: float = Field(default=0.36, gt=0)
    calib_rel_uncertainty: float = Field(default=0.30, ge=0)


class RunConfig(_Section):
    """Root configuration with the experiment's geometry as defaults."""

    trap: TrapParams = TrapParams()
    beam: BeamParams = BeamParams()
    detector: DetectorParams = DetectorParams()
    thermal: ThermalParams = ThermalParams()
    scatter: ScatterParams = ScatterParams()
    noise: NoiseParams = NoiseParams()
    fit: FitParams = FitParams()
    jumps: JumpsParams = JumpsParams()
    seed: int = 12345
    threads: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _cross_checks(self):
        # fail early on combinations no module would accept
        build_trap(self.trap)
        build_beam(self.beam)
        return self


def parse_config(path) -> RunConfig:
    """Load and validate a JSON config file; empty file means all defaults."""
    text = Path(path).read_text()
    data = json.loads(text) if text.strip() else {}
    return RunConfig.model_validate(data)


def config_from_dict(data: dict) -> RunConfig:
    return RunConfig.model_validate(data)


# ---------------------------------------------------------------- builders


def build_trap(p: TrapParams) -> modes.TrapConfig:
    mass = p.mass_amu * ATOMIC_MASS_UNIT
    charge = p.charge_e * ELEMENTARY_CHARGE
    if p.f_axial_hz is not None:
        omega_z = 2.0 * math.pi * p.f_axial_hz
    else:
        omega_z = modes.axial_frequency_for_separation(p.separation_um * 1e-6, mass, charge)
    omega_r = 2.0 * math.pi * p.f_radial_hz if p.f_radial_hz is not None else 2.2 * omega_z
    return modes.TrapConfig(mass=mass, charge=charge, omega_R=omega_r, omega_Z=omega_z)


def build_beam(p: BeamParams) -> geometry.BeamGeometry:
    theta = p.theta_deg * DEG
    if p.eps_in is not None:
        eps = geometry.Vec3(*p.eps_in).unit()
    elif p.polarization == "out_of_plane":
        eps = geometry.Y_HAT
    else:
        eps = geometry.Vec3(math.cos(theta), 0.0, -math.sin(theta))
    return geometry.BeamGeometry(theta_in=theta, wavelength=p.wavelength_nm * 1e-9, eps_in=eps)


def build_detector(p: DetectorParams) -> imaging.DetectorConfig:
    return imaging.DetectorConfig(
        phi_range=(p.phi_deg[0] * DEG, p.phi_deg[1] * DEG),
        phi_out_range=(p.phi_out_deg[0] * DEG, p.phi_out_deg[1] * DEG),
        n_phi=p.n_phi,
        n_phi_out=p.n_phi_out,
        channel=scatter.Channel(p.channel),
    )


def build_scatter(p: ScatterParams, beam: BeamParams) -> scatter.ScatterConfig:
    lambda_0 = (p.wavelength_0_nm if p.wavelength_0_nm is not None else beam.wavelength_nm) * 1e-9
    return scatter.ScatterConfig.from_wavelength(
        lambda_0, linewidth_hz=p.linewidth_hz, detuning_hz=p.detuning_hz
    )


def resolve_temperatures(p: ThermalParams, theta_in: float) -> thermal.ModeTemperatures:
    t_x = p.t_rock_x_mk * 1e-3
    t_y = (p.t_rock_y_mk * 1e-3) if p.t_rock_y_mk is not None else t_x
    if p.t_stretch_mk is not None:
        t_z = p.t_stretch_mk * 1e-3
    else:
        t_z = thermal.temperature_ratio(theta_in) * t_x
    return thermal.ModeTemperatures(t_x=t_x, t_y=t_y, t_z=t_z)


def build_thermal_state(cfg: RunConfig) -> thermal.ThermalState:
    trap = build_trap(cfg.trap)
    spectrum = modes.mode_spectrum(trap)
    temps = resolve_temperatures(cfg.thermal, cfg.beam.theta_deg * DEG)
    return thermal.ThermalState(temperatures=temps, spectrum=spectrum, mass=trap.mass)
