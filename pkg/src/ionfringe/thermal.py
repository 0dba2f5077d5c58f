"""Thermal suppression of the interference term (Debye-Waller factor).

The fringe contrast is multiplied by exp(-<[q.(u1-u2)]^2>/2), where u1, u2
are the ion displacements.  Only the relative modes enter: the rock modes
(X, Y) at omega_T and the stretch mode (Z) at omega_S, each allowed its own
temperature.  Per axis the relative-displacement variance is

    Var[(u1-u2)_i] = (hbar / m omega_i) * coth(hbar omega_i / 2 kB T_i)

with m the single-ion mass, so the exponent is the sum of
(hbar q_i^2 / 2 m omega_i) * coth(...) over the three axes.

Two brute-force oracles validate the closed form: a seeded Gaussian Monte
Carlo over the relative coordinates, and a 1D truncated-number-basis
calculation of <exp(i q u)> for a thermal oscillator state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import eval_genlaguerre, gammaln

from .constants import BOLTZMANN, HBAR
from .geometry import Vec3
from .modes import ModeSpectrum

_WEIGHT_CUTOFF = 1e-12


@dataclass(frozen=True)
class ModeTemperatures:
    """Temperatures (K) of the relative modes: rock X, rock Y, stretch Z."""

    t_x: float
    t_y: float
    t_z: float

    def __post_init__(self):
        if min(self.t_x, self.t_y, self.t_z) < 0.0:
            raise ValueError("mode temperatures must be >= 0")


@dataclass(frozen=True)
class ThermalState:
    """Thermal state of the two-ion crystal's relative motion."""

    temperatures: ModeTemperatures
    spectrum: ModeSpectrum
    mass: float  # single-ion mass, kg

    def __post_init__(self):
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")


def mean_occupation(omega: float, temperature: float) -> float:
    """Bose-Einstein occupation 1/(exp(hbar w / kB T) - 1); 0 at T = 0."""
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    if temperature < 0.0:
        raise ValueError("temperature must be >= 0")
    if temperature == 0.0:
        return 0.0
    x = HBAR * omega / (BOLTZMANN * temperature)
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def _coth_half(omega: float, temperature: float) -> float:
    """coth(hbar w / 2 kB T) = 2 <N> + 1; equals 1 at T = 0."""
    if temperature == 0.0:
        return 1.0
    x = HBAR * omega / (2.0 * BOLTZMANN * temperature)
    if x > 350.0:
        return 1.0
    return 1.0 / math.tanh(x)


def relative_displacement_variance(omega: float, temperature: float, mass: float) -> float:
    """Variance of one axis of u1 - u2 for relative-mode frequency omega."""
    return HBAR / (mass * omega) * _coth_half(omega, temperature)


def debye_waller(q: Vec3, state: ThermalState) -> float:
    """Fringe-contrast factor exp(-<[q.(u1-u2)]^2>/2), in (0, 1]."""
    omega_t = state.spectrum.rock
    omega_s = state.spectrum.stretch
    t = state.temperatures
    exponent = 0.5 * (
        q.x**2 * relative_displacement_variance(omega_t, t.t_x, state.mass)
        + q.y**2 * relative_displacement_variance(omega_t, t.t_y, state.mass)
        + q.z**2 * relative_displacement_variance(omega_s, t.t_z, state.mass)
    )
    return math.exp(-exponent)


def temperature_ratio(theta_in: float) -> float:
    """Laser-cooling equilibrium ratio T_stretch / T_rock for a beam at
    angle theta_in from the trap axis:
    {1 + [3 cos^2]^-1} / {1 + [3 sin^2]^-1}."""
    if not 0.0 < theta_in < math.pi / 2:
        raise ValueError("theta_in must be strictly inside (0, pi/2)")
    c2 = math.cos(theta_in) ** 2
    s2 = math.sin(theta_in) ** 2
    return (1.0 + 1.0 / (3.0 * c2)) / (1.0 + 1.0 / (3.0 * s2))


def dw_oracle_gaussian_mc(
    q: Vec3, state: ThermalState, n_samples: int = 100_000, seed: int = 0
) -> tuple[float, float]:
    """Monte Carlo estimate of <cos(q.(u1-u2))> with Gaussian sampling.

    Samples each axis of the relative displacement from a zero-mean normal
    with the thermal variance above and averages cos(q.v).  Returns
    (mean, standard error).  Validates the Gaussian-average identity
    <exp(i q v)> = exp(-q^2 <v^2>/2) against the closed form.
    """
    if n_samples < 1000:
        raise ValueError("need at least 1000 samples")
    rng = np.random.default_rng(seed)
    omega_t = state.spectrum.rock
    omega_s = state.spectrum.stretch
    t = state.temperatures
    sigmas = np.sqrt(
        [
            relative_displacement_variance(omega_t, t.t_x, state.mass),
            relative_displacement_variance(omega_t, t.t_y, state.mass),
            relative_displacement_variance(omega_s, t.t_z, state.mass),
        ]
    )
    v = rng.standard_normal((n_samples, 3)) * sigmas
    phases = v @ np.array([q.x, q.y, q.z])
    values = np.cos(phases)
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(n_samples))
    return mean, stderr


def _thermal_weights(beta: float, n_max: int) -> np.ndarray:
    """Occupation probabilities p_n for n = 0..n_max (beta = hbar w / kB T)."""
    if math.isinf(beta):
        p = np.zeros(n_max + 1)
        p[0] = 1.0
        return p
    n = np.arange(n_max + 1)
    return (1.0 - math.exp(-beta)) * np.exp(-beta * n)


def _auto_n_max(beta: float) -> int:
    """Smallest basis size with occupation below the weight cutoff."""
    if math.isinf(beta):
        return 8
    n = int(math.ceil((-math.log(_WEIGHT_CUTOFF) - math.log1p(-math.exp(-beta))) / beta))
    return max(n, 8)


def _position_eigenbasis(n_states: int, x_zp: float):
    """Eigendecomposition of the position operator in a truncated number
    basis: u = x_zp (a + a†), tridiagonal with off-diagonal x_zp sqrt(n+1)."""
    diag = np.zeros(n_states)
    off = x_zp * np.sqrt(np.arange(1, n_states))
    return eigh_tridiagonal(diag, off)


def dw_oracle_fock_1d(
    q_1d: float, omega: float, temperature: float, eff_mass: float, n_max: int | None = None
) -> float:
    """Brute-force thermal average of Re<n|exp(i q u)|n> for a 1D oscillator.

    Builds the position operator in a truncated number basis, exponentiates
    it through its eigendecomposition, and sums the diagonal over the
    thermal distribution.  ``eff_mass`` is the effective mass of the
    coordinate u (m/2 for the two-ion relative displacement u1 - u2).
    Raises if ``n_max`` leaves occupation above 1e-12 untruncated.
    """
    if omega <= 0.0 or eff_mass <= 0.0:
        raise ValueError("omega and eff_mass must be positive")
    if temperature < 0.0:
        raise ValueError("temperature must be >= 0")
    beta = math.inf if temperature == 0.0 else HBAR * omega / (BOLTZMANN * temperature)
    if n_max is None:
        n_max = _auto_n_max(beta)
    weights = _thermal_weights(beta, n_max)
    if weights[-1] >= _WEIGHT_CUTOFF:
        raise ValueError(
            f"truncation insufficient: occupation {weights[-1]:.2e} at n_max={n_max} "
            f"exceeds {_WEIGHT_CUTOFF:.0e}"
        )
    x_zp = math.sqrt(HBAR / (2.0 * eff_mass * omega))
    # headroom so the displacement of the highest occupied state stays inside
    eta = abs(q_1d) * x_zp
    buffer = int(math.ceil(12 + 8.0 * eta * math.sqrt(n_max + 1.0) + 4.0 * eta * eta))
    n_states = n_max + 1 + buffer
    vals, vecs = _position_eigenbasis(n_states, x_zp)
    phases = np.exp(1j * q_1d * vals)
    # diagonal of V exp(i q Lambda) V^T for the occupied states
    diag = (vecs[: n_max + 1, :] ** 2) @ phases
    return float(np.real(weights @ diag))


def closure_check_1d(
    q_1d: float, omega: float, eff_mass: float, n_initial: int, n_max: int
) -> float:
    """Sum of |<f|exp(-i q u)|n>|^2 over final states f = 0..n_max.

    Uses the exact displacement-operator matrix elements (generalized
    Laguerre form), so the deficit from 1 is the true leakage past the
    truncation.  Equals 1 exactly at q = 0.
    """
    if omega <= 0.0 or eff_mass <= 0.0:
        raise ValueError("omega and eff_mass must be positive")
    if n_initial < 0 or n_max < n_initial:
        raise ValueError("need 0 <= n_initial <= n_max")
    eta2 = q_1d * q_1d * HBAR / (2.0 * eff_mass * omega)
    total = 0.0
    for f in range(n_max + 1):
        lo, hi = min(f, n_initial), max(f, n_initial)
        k = hi - lo
        if k > 0 and eta2 == 0.0:
            continue
        log_mag = -eta2 + gammaln(lo + 1) - gammaln(hi + 1)
        if k > 0:
            log_mag += k * math.log(eta2)
        lag = eval_genlaguerre(lo, k, eta2)
        total += math.exp(log_mag) * lag * lag
    return float(total)
