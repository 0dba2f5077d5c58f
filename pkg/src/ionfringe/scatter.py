"""Thermally averaged differential cross sections per polarization channel.

For near-resonant scattering off the two-ion crystal the angular pattern
splits into a fringe-carrying part (both ions end in their initial Zeeman
sublevels, so the two photon paths are indistinguishable) and isotropic /
smooth parts (one ion flips, leaving which-path information behind).  With
``polar`` the angle of k_out from the incident polarization axis, ``phase``
the fringe phase q.d, and ``dw`` the thermal contrast factor, the detected
channels are (units of sigma_0/sr, times the resonance Lorentzian L):

    pi-detected     L/4pi * { cos^2 + sin^2 * [1 + cos(phase) dw] }
    sigma-detected  L/4pi                       (isotropic, no fringes)
    unpolarized     L/4pi * { 1 + cos^2 + sin^2 * [1 + cos(phase) dw] }

so unpolarized = pi-detected + sigma-detected pointwise.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.integrate import quad

from .constants import SPEED_OF_LIGHT

FOUR_PI = 4.0 * math.pi


class Channel(enum.Enum):
    """Detected-polarization channel."""

    PI = "pi"
    SIGMA = "sigma"
    UNPOLARIZED = "unpol"


@dataclass(frozen=True)
class ScatterConfig:
    """Optical parameters of the scattering transition."""

    omega_0: float    # rad/s, resonance frequency
    omega_in: float   # rad/s, laser frequency
    gamma: float      # rad/s, excited-state decay rate
    lambda_0: float   # m, resonance wavelength
    sigma_0: float    # m^2, resonance cross section lambda_0^2 / 2 pi

    def __post_init__(self):
        if min(self.omega_0, self.omega_in, self.gamma, self.lambda_0, self.sigma_0) <= 0.0:
            raise ValueError("all scattering parameters must be positive")
        expected = self.lambda_0**2 / (2.0 * math.pi)
        if abs(self.sigma_0 - expected) > 1e-12 * expected:
            raise ValueError(
                f"sigma_0 = {self.sigma_0:.6e} inconsistent with lambda_0 "
                f"(expected {expected:.6e})"
            )

    @property
    def detuning(self) -> float:
        return self.omega_in - self.omega_0

    @classmethod
    def from_wavelength(
        cls, lambda_0: float, linewidth_hz: float, detuning_hz: float = 0.0
    ) -> "ScatterConfig":
        """Build from resonance wavelength, natural linewidth gamma/2pi (Hz),
        and laser detuning (Hz)."""
        omega_0 = 2.0 * math.pi * SPEED_OF_LIGHT / lambda_0
        return cls(
            omega_0=omega_0,
            omega_in=omega_0 + 2.0 * math.pi * detuning_hz,
            gamma=2.0 * math.pi * linewidth_hz,
            lambda_0=lambda_0,
            sigma_0=lambda_0**2 / (2.0 * math.pi),
        )


def lorentzian(delta: float, gamma: float) -> float:
    """Unit-height Lorentzian of full width gamma: (g/2)^2 / (d^2 + (g/2)^2)."""
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    half = 0.5 * gamma
    return half * half / (delta * delta + half * half)


def _scale(cfg: ScatterConfig, si: bool) -> float:
    line = lorentzian(cfg.detuning, cfg.gamma)
    return line * cfg.sigma_0 if si else line


def xsec_pi_case(polar: float, phase: float, dw: float, cfg: ScatterConfig, si: bool = False) -> float:
    """Fringe-carrying channel alone (no sublevel change in either ion):
    sin^2(polar)/4pi * L * [1 + cos(phase) dw]."""
    _check_dw(dw)
    s2 = math.sin(polar) ** 2
    return _scale(cfg, si) * s2 / FOUR_PI * (1.0 + math.cos(phase) * dw)


def xsec_sigma_to_sigmapol(cfg: ScatterConfig, si: bool = False) -> float:
    """Sublevel-changing scattering into the perpendicular polarization:
    isotropic L/8pi, no fringes."""
    return _scale(cfg, si) / (8.0 * math.pi)


def xsec_sigma_to_pipol(polar: float, cfg: ScatterConfig, si: bool = False) -> float:
    """Sublevel-changing scattering into the in-plane polarization:
    cos^2(polar)/8pi * L, no fringes."""
    return _scale(cfg, si) * math.cos(polar) ** 2 / (8.0 * math.pi)


def _check_dw(dw: float) -> None:
    if not 0.0 <= dw <= 1.0:
        raise ValueError(f"contrast factor must be in [0, 1], got {dw}")


def channel_shape(channel: Channel, polar: float, phase: float, dw: float) -> float:
    """Angular factor of the detected cross section (the braces above),
    without the L/4pi * sigma_0 prefactor."""
    _check_dw(dw)
    if channel is Channel.SIGMA:
        return 1.0
    c2 = math.cos(polar) ** 2
    s2 = math.sin(polar) ** 2
    fringe = s2 * (1.0 + math.cos(phase) * dw)
    if channel is Channel.PI:
        return c2 + fringe
    return 1.0 + c2 + fringe


def xsec_detected(
    channel: Channel, polar: float, phase: float, dw: float, cfg: ScatterConfig, si: bool = False
) -> float:
    """Differential cross section for the detected channel, summed over the
    sublevel-preserving and sublevel-changing processes."""
    return _scale(cfg, si) / FOUR_PI * channel_shape(channel, polar, phase, dw)


def fringe_visibility(channel: Channel, polar: float, dw: float) -> float:
    """(I_max - I_min)/(I_max + I_min) over the fringe phase, analytically.

    pi-detected: sin^2(polar) * dw (100% at polar = pi/2 and dw = 1);
    unpolarized: sin^2(polar) * dw / 2 (never above 50%); sigma-detected: 0.
    """
    _check_dw(dw)
    if channel is Channel.SIGMA:
        return 0.0
    v = math.sin(polar) ** 2 * dw
    return v if channel is Channel.PI else 0.5 * v


def total_xsec_no_interference(
    channel: Channel, cfg: ScatterConfig, si: bool = False, epsrel: float = 1e-10
) -> float:
    """Solid-angle integral of the channel cross section with the fringe
    term switched off (sum-rule check; unpolarized must give 2 sigma_0 L)."""

    def integrand(polar: float) -> float:
        return channel_shape(channel, polar, 0.0, 0.0) * math.sin(polar)

    integral, _ = quad(integrand, 0.0, math.pi, epsrel=epsrel, epsabs=0.0)
    return _scale(cfg, si) / FOUR_PI * 2.0 * math.pi * integral
