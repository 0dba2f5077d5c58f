import math

import pytest

from ionfringe import (
    BeamGeometry,
    ModeTemperatures,
    ScatterConfig,
    ThermalState,
    Vec3,
    default_hg198_trap,
    mode_spectrum,
)

THETA = math.radians(62.0)
WAVELENGTH = 194.2e-9


@pytest.fixture(scope="session")
def trap():
    return default_hg198_trap()


@pytest.fixture(scope="session")
def spectrum(trap):
    return mode_spectrum(trap)


@pytest.fixture(scope="session")
def beam():
    """Experiment geometry: beam at 62 deg from the trap axis, polarization
    perpendicular to the scattering plane."""
    return BeamGeometry(theta_in=THETA, wavelength=WAVELENGTH, eps_in=Vec3(0.0, 1.0, 0.0))


@pytest.fixture(scope="session")
def scatter_cfg():
    return ScatterConfig.from_wavelength(WAVELENGTH, linewidth_hz=70e6)


@pytest.fixture()
def thermal_state(trap, spectrum):
    return ThermalState(
        temperatures=ModeTemperatures(t_x=1.08e-3, t_y=1.08e-3, t_z=1.9e-3),
        spectrum=spectrum,
        mass=trap.mass,
    )
