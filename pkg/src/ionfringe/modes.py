"""Equilibrium separation and normal modes of two ions in a harmonic trap.

The trap pseudopotential is taken as cylindrically symmetric with radial
secular frequency omega_R and axial secular frequency omega_Z
(omega_R > omega_Z, so the two-ion crystal aligns on the Z axis).  The six
normal modes split into three center-of-mass modes at the single-ion
frequencies and three relative modes: an axial stretch at sqrt(3)*omega_Z
and a doubly degenerate transverse rock at sqrt(omega_R^2 - omega_Z^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import ELEMENTARY_CHARGE, HBAR, VACUUM_PERMITTIVITY


@dataclass(frozen=True)
class TrapConfig:
    """Single-ion trap parameters (SI units)."""

    mass: float      # kg
    charge: float    # C
    omega_R: float   # rad/s, radial secular frequency
    omega_Z: float   # rad/s, axial secular frequency

    def __post_init__(self):
        if self.mass <= 0.0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if self.charge == 0.0:
            raise ValueError("charge must be nonzero")
        if self.omega_Z <= 0.0:
            raise ValueError(f"omega_Z must be positive, got {self.omega_Z}")
        if self.omega_R <= self.omega_Z:
            raise ValueError(
                f"omega_R = {self.omega_R:.4e} must exceed omega_Z = "
                f"{self.omega_Z:.4e}, otherwise the ions would not align on the Z axis"
            )


@dataclass(frozen=True)
class ModeSpectrum:
    """Frequencies of the six normal modes plus the ion separation.

    ``com`` holds (omega_X, omega_Y, omega_Z) of the center-of-mass modes,
    ``rel`` holds (rock_X, rock_Y, stretch_Z) of the relative modes.
    """

    com: tuple[float, float, float]
    rel: tuple[float, float, float]
    separation: float  # m

    def __post_init__(self):
        if self.separation <= 0.0:
            raise ValueError("separation must be positive")

    @property
    def stretch(self) -> float:
        return self.rel[2]

    @property
    def rock(self) -> float:
        return self.rel[0]


def equilibrium_separation(trap: TrapConfig) -> float:
    """Distance between the two equilibrium positions on the Z axis.

    Balances the axial restoring force against the Coulomb repulsion:
    d = [e^2 / (2 pi eps0 m omega_Z^2)]^(1/3).
    """
    e2 = trap.charge * trap.charge
    return (e2 / (2.0 * math.pi * VACUUM_PERMITTIVITY * trap.mass * trap.omega_Z**2)) ** (1.0 / 3.0)


def axial_frequency_for_separation(d: float, mass: float, charge: float) -> float:
    """Inverse of equilibrium_separation: omega_Z giving separation d."""
    if d <= 0.0:
        raise ValueError("separation must be positive")
    e2 = charge * charge
    return math.sqrt(e2 / (2.0 * math.pi * VACUUM_PERMITTIVITY * mass * d**3))


def mode_spectrum(trap: TrapConfig) -> ModeSpectrum:
    """All six normal-mode frequencies and the equilibrium separation."""
    omega_s = math.sqrt(3.0) * trap.omega_Z
    omega_t = math.sqrt(trap.omega_R**2 - trap.omega_Z**2)
    return ModeSpectrum(
        com=(trap.omega_R, trap.omega_R, trap.omega_Z),
        rel=(omega_t, omega_t, omega_s),
        separation=equilibrium_separation(trap),
    )


def mode_energy(quantum_numbers, spectrum: ModeSpectrum) -> float:
    """Total vibrational energy for occupation numbers
    (nX_com, nY_com, nZ_com, nX_rel, nY_rel, nZ_rel), in joules."""
    n = tuple(int(v) for v in quantum_numbers)
    if len(n) != 6 or any(v < 0 for v in n):
        raise ValueError("need six non-negative occupation numbers")
    nx_c, ny_c, nz_c, nx_r, ny_r, nz_r = n
    omega_r = spectrum.com[0]
    omega_z = spectrum.com[2]
    omega_t = spectrum.rock
    omega_s = spectrum.stretch
    return HBAR * (
        omega_z * (nz_c + 0.5)
        + omega_r * (nx_c + ny_c + 1.0)
        + omega_s * (nz_r + 0.5)
        + omega_t * (nx_r + ny_r + 1.0)
    )


def recoil_energy(mass: float, wavelength: float) -> float:
    """Photon recoil energy (hbar k)^2 / 2m in joules."""
    if mass <= 0.0 or wavelength <= 0.0:
        raise ValueError("mass and wavelength must be positive")
    hk = HBAR * 2.0 * math.pi / wavelength
    return hk * hk / (2.0 * mass)


def closure_validity_margin(recoil: float, initial_energy: float, gamma: float) -> float:
    """Ratio sqrt(R * E_i) / (hbar*gamma/2).

    The spread of intermediate-state energy denominators is of order
    sqrt(R*E_i); when this is much smaller than the half linewidth, the
    denominators are nearly constant and summing intermediate vibrational
    states by closure is justified.
    """
    if recoil < 0.0 or initial_energy < 0.0 or gamma <= 0.0:
        raise ValueError("recoil and initial energy must be >= 0, gamma > 0")
    return math.sqrt(recoil * initial_energy) / (HBAR * gamma / 2.0)


def default_hg198_trap(
    mass_amu: float = 197.967,
    separation: float = 4.17e-6,
    omega_R: float | None = None,
) -> TrapConfig:
    """Trap with omega_Z back-derived from the target ion separation.

    Only omega_Z is pinned by the separation; the radial frequency is an
    arbitrary choice above it, defaulting to 2.2x omega_Z (2.0 would make
    the rock and stretch modes exactly degenerate).
    """
    from .constants import ATOMIC_MASS_UNIT

    mass = mass_amu * ATOMIC_MASS_UNIT
    omega_z = axial_frequency_for_separation(separation, mass, ELEMENTARY_CHARGE)
    if omega_R is None:
        omega_R = 2.2 * omega_z
    return TrapConfig(mass=mass, charge=ELEMENTARY_CHARGE, omega_R=omega_R, omega_Z=omega_z)
