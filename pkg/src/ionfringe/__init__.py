"""Interference fringes in the resonance fluorescence of two trapped ions:
geometry, normal modes, thermal fringe contrast, polarization-channel cross
sections, detector images, profile fitting, and quantum-jump saturation
calibration."""

__version__ = "0.1.0"

from .geometry import (
    AtomFrameAngles,
    BeamGeometry,
    DetectorDirection,
    Vec3,
    atom_angles,
    atom_frame,
    k_in_vector,
    k_out_vector,
    polarization_basis,
    scattering_vector,
)
from .modes import (
    ModeSpectrum,
    TrapConfig,
    closure_validity_margin,
    default_hg198_trap,
    equilibrium_separation,
    mode_energy,
    mode_spectrum,
    recoil_energy,
)
from .scatter import (
    Channel,
    ScatterConfig,
    fringe_visibility,
    lorentzian,
    total_xsec_no_interference,
    xsec_detected,
    xsec_pi_case,
    xsec_sigma_to_pipol,
    xsec_sigma_to_sigmapol,
)
from .thermal import (
    ModeTemperatures,
    ThermalState,
    debye_waller,
    mean_occupation,
    temperature_ratio,
)
from .imaging import (
    DetectorConfig,
    FringeImage,
    NoiseConfig,
    add_shot_noise,
    apply_efficiency,
    collapse_profile,
    synthesize_image,
)
from .fitfringe import (
    FitResult,
    FringeFitSetup,
    FringeModelParams,
    extrapolated_visibility,
    fit_profile,
    model_profile,
    saturation_visibility_correction,
)
from .jumps import (
    CountTrace,
    JumpRates,
    SaturationCalib,
    TristableFit,
    fit_three_gaussians,
    gate_filter,
    p_ratio_from_areas,
    ratio_from_saturation,
    saturation_from_ratio,
    simulate_telegraph,
)
from .config import RunConfig, parse_config
