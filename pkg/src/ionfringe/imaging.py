"""Synthetic fringe images over the detector acceptance.

Each pixel holds the detected differential cross section (sigma_0/sr units)
evaluated at the pixel-center direction, with the fringe phase q.d and the
thermal contrast factor from the relative-mode state.  Images can then be
scaled by a detection-efficiency map, converted to Poisson photon counts,
and collapsed to 1D profiles by summing rows.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .geometry import (
    BeamGeometry,
    DetectorDirection,
    Vec3,
    atom_angles,
    atom_frame,
    k_in_vector,
    k_out_vector,
    scattering_vector,
)
from .scatter import Channel, ScatterConfig, xsec_detected
from .thermal import ThermalState, debye_waller


@dataclass(frozen=True)
class DetectorConfig:
    """Pixel grid over the (phi, phi_out) acceptance, angles in radians."""

    phi_range: tuple[float, float]
    phi_out_range: tuple[float, float]
    n_phi: int
    n_phi_out: int
    channel: Channel

    def __post_init__(self):
        if self.n_phi < 2 or self.n_phi_out < 2:
            raise ValueError("pixel counts must be >= 2")
        for lo, hi in (self.phi_range, self.phi_out_range):
            if not lo < hi:
                raise ValueError("angle ranges must be increasing")
        # the corners must be valid detector directions
        for phi in self.phi_range:
            for pout in self.phi_out_range:
                DetectorDirection(phi=phi, phi_out=pout)

    def phi_centers(self) -> np.ndarray:
        lo, hi = self.phi_range
        step = (hi - lo) / self.n_phi
        return lo + (np.arange(self.n_phi) + 0.5) * step

    def phi_out_centers(self) -> np.ndarray:
        lo, hi = self.phi_out_range
        step = (hi - lo) / self.n_phi_out
        return lo + (np.arange(self.n_phi_out) + 0.5) * step


@dataclass(frozen=True, eq=False)
class FringeImage:
    """Detector image: pixels[i, j] at (phi_out[i], phi[j])."""

    pixels: np.ndarray       # (n_phi_out, n_phi)
    phi: np.ndarray          # rad, in-plane axis
    phi_out: np.ndarray      # rad, out-of-plane axis
    channel: Channel

    def __post_init__(self):
        if self.pixels.shape != (self.phi_out.size, self.phi.size):
            raise ValueError("pixel array does not match axes")
        if np.any(self.pixels < 0):
            raise ValueError("pixel values must be non-negative")
        for ax in (self.phi, self.phi_out):
            if np.any(np.diff(ax) <= 0):
                raise ValueError("axes must be strictly increasing")

    @property
    def is_counts(self) -> bool:
        return np.issubdtype(self.pixels.dtype, np.integer)


@dataclass(frozen=True)
class NoiseConfig:
    """Photon-counting conversion: counts = Poisson(exposure * I + background)."""

    exposure_scale: float    # counts per unit intensity per pixel
    background_rate: float   # counts per pixel
    seed: int

    def __post_init__(self):
        if self.exposure_scale < 0.0 or self.background_rate < 0.0:
            raise ValueError("noise parameters must be non-negative")


def pixel_intensity(
    beam: BeamGeometry,
    state: ThermalState,
    scatter_cfg: ScatterConfig,
    channel: Channel,
    phi: float,
    phi_out: float,
) -> float:
    """Detected cross section (sigma_0/sr) at one detector direction."""
    k_in = k_in_vector(beam)
    k_out = k_out_vector(beam, DetectorDirection(phi=phi, phi_out=phi_out))
    q = scattering_vector(k_in, k_out)
    phase = q.z * state.spectrum.separation
    dw = debye_waller(q, state)
    polar = atom_angles(k_out, atom_frame(beam)).polar
    return xsec_detected(channel, polar, phase, dw, scatter_cfg)


def synthesize_image(
    beam: BeamGeometry,
    state: ThermalState,
    scatter_cfg: ScatterConfig,
    det: DetectorConfig,
    n_threads: int = 1,
) -> FringeImage:
    """Deterministic noiseless fringe image at the pixel centers.

    Rows are independent; with ``n_threads > 1`` they are computed in a
    thread pool (the result does not depend on the thread count).
    """
    phis = det.phi_centers()
    phi_outs = det.phi_out_centers()
    k_in = k_in_vector(beam)
    triad = atom_frame(beam)
    d = state.spectrum.separation

    def row(i: int) -> np.ndarray:
        phi_out = phi_outs[i]
        out = np.empty(det.n_phi)
        for j, phi in enumerate(phis):
            k_out = k_out_vector(beam, DetectorDirection(phi=phi, phi_out=phi_out))
            q = scattering_vector(k_in, k_out)
            dw = debye_waller(q, state)
            polar = atom_angles(k_out, triad).polar
            out[j] = xsec_detected(det.channel, polar, q.z * d, dw, scatter_cfg)
        return out

    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            rows = list(pool.map(row, range(det.n_phi_out)))
    else:
        rows = [row(i) for i in range(det.n_phi_out)]
    return FringeImage(
        pixels=np.array(rows), phi=phis, phi_out=phi_outs, channel=det.channel
    )


def apply_efficiency(img: FringeImage, efficiency: np.ndarray, normalize: bool = False) -> FringeImage:
    """Multiply by a detection-efficiency map (or divide, to normalize
    measured data by it).  The two modes are exact inverses."""
    efficiency = np.asarray(efficiency, dtype=float)
    if efficiency.shape != img.pixels.shape:
        raise ValueError(
            f"efficiency shape {efficiency.shape} does not match image {img.pixels.shape}"
        )
    if np.any(efficiency <= 0.0):
        raise ValueError("efficiency must be positive everywhere")
    pixels = img.pixels / efficiency if normalize else img.pixels * efficiency
    return replace(img, pixels=pixels)


def add_shot_noise(img: FringeImage, noise: NoiseConfig) -> FringeImage:
    """Poisson photon-count image with the configured exposure/background.

    The whole array is drawn in one pass from a generator seeded by
    ``noise.seed``, so the output is reproducible and never depends on how
    the preceding synthesis was parallelized.
    """
    rng = np.random.default_rng(noise.seed)
    expected = noise.exposure_scale * img.pixels + noise.background_rate
    counts = rng.poisson(expected).astype(np.int64)
    return replace(img, pixels=counts)


def collapse_profile(
    img: FringeImage, phi_out_window: tuple[float, float] | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sum rows with phi_out inside the window into a 1D profile.

    Returns (phi, values, stderr); stderr is sqrt(sum) for count images and
    zero (meaning: unweighted) for intensity images.
    """
    if phi_out_window is None:
        mask = np.ones(img.phi_out.size, dtype=bool)
    else:
        lo, hi = phi_out_window
        mask = (img.phi_out >= lo) & (img.phi_out <= hi)
    if not np.any(mask):
        raise ValueError("phi_out window selects no rows")
    values = img.pixels[mask, :].sum(axis=0).astype(float)
    if img.is_counts:
        stderr = np.sqrt(values)
    else:
        stderr = np.zeros_like(values)
    return img.phi.copy(), values, stderr
