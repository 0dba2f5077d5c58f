"""Tristable fluorescence of two ions and saturation-parameter calibration.

Each ion is an independent two-state telegraph: "on" while it cycles on the
strong transition, "off" while shelved in a metastable level.  Binned photon
counts then populate three peaks (0, 1, or 2 ions off) whose areas are in
the ratio p_off^2 : 2 p_off p_on : p_on^2.  A three-Gaussian fit of the
count histogram recovers p_off/p_on, and the steady-state relation

    s / [2 (1 + s)] = c * (p_off / p_on),   c = 0.36 (about 30% uncertain)

is inverted for the saturation parameter s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .optimize import levenberg_marquardt
from .seeding import substream

DEFAULT_CALIB_COEFFICIENT = 0.36
DEFAULT_CALIB_REL_UNCERTAINTY = 0.30


@dataclass(frozen=True)
class JumpRates:
    """Per-ion telegraph rates (1/s)."""

    rate_on_to_off: float
    rate_off_to_on: float

    def __post_init__(self):
        if self.rate_on_to_off <= 0.0 or self.rate_off_to_on <= 0.0:
            raise ValueError("both rates must be positive")

    @property
    def p_on(self) -> float:
        return self.rate_off_to_on / (self.rate_on_to_off + self.rate_off_to_on)

    @property
    def p_off(self) -> float:
        return self.rate_on_to_off / (self.rate_on_to_off + self.rate_off_to_on)

    @property
    def ratio(self) -> float:
        """p_off / p_on."""
        return self.rate_on_to_off / self.rate_off_to_on

    @classmethod
    def from_ratio(cls, ratio: float, rate_off_to_on: float = 4.0) -> "JumpRates":
        """Rates with the given p_off/p_on; the off->on rate sets the
        timescale (default mean shelved dwell 250 ms)."""
        if ratio <= 0.0:
            raise ValueError("ratio must be positive")
        return cls(rate_on_to_off=ratio * rate_off_to_on, rate_off_to_on=rate_off_to_on)


@dataclass(frozen=True, eq=False)
class CountTrace:
    """Binned photon counts plus the underlying per-bin on-ion occupancy."""

    bin_width: float                       # s
    counts: np.ndarray                     # non-negative ints, one per bin
    rate_per_on_ion: float                 # counts per bin per fluorescing ion
    background: float                      # counts per bin
    seed: int
    mean_on_ions: np.ndarray | None = None  # time-weighted on ions per bin, in [0, 2]

    def __post_init__(self):
        if self.bin_width <= 0.0:
            raise ValueError("bin_width must be positive")


def telegraph_trajectory(
    rates: JumpRates, duration: float, rng: np.random.Generator
) -> tuple[np.ndarray, bool]:
    """Switch times in (0, duration) of one ion, plus its initial state
    (True = on, drawn from the stationary distribution)."""
    if duration <= 0.0:
        raise ValueError("duration must be positive")
    on = bool(rng.random() < rates.p_on)
    times = []
    t = 0.0
    state = on
    while True:
        rate = rates.rate_on_to_off if state else rates.rate_off_to_on
        t += rng.exponential(1.0 / rate)
        if t >= duration:
            break
        times.append(t)
        state = not state
    return np.array(times), on


def _on_time_per_bin(
    switch_times: np.ndarray, initial_on: bool, n_bins: int, bin_width: float
) -> np.ndarray:
    """Seconds spent in the on state within each bin."""
    on_time = np.zeros(n_bins)
    edges = np.concatenate(([0.0], switch_times, [n_bins * bin_width]))
    state = initial_on
    for t0, t1 in zip(edges[:-1], edges[1:]):
        if state:
            b0 = int(t0 / bin_width)
            b1 = min(int(t1 / bin_width), n_bins - 1)
            if b0 == b1:
                on_time[b0] += t1 - t0
            else:
                on_time[b0] += (b0 + 1) * bin_width - t0
                on_time[b0 + 1 : b1] += bin_width
                on_time[b1] += t1 - b1 * bin_width
        state = not state
    return on_time


def simulate_telegraph(
    rates: JumpRates,
    duration: float,
    bin_width: float = 5e-3,
    rate_per_on_ion: float = 60.0,
    background: float = 5.0,
    seed: int = 0,
) -> CountTrace:
    """Photon-count trace for two independently jumping ions.

    Bin occupancy is the exact time-weighted on-ion fraction (event-driven),
    so bins straddling a jump take intermediate values.  Counts are Poisson
    with mean background + rate_per_on_ion * occupancy.  All randomness
    derives from ``seed`` through named substreams.
    """
    if rate_per_on_ion < 0.0 or background < 0.0:
        raise ValueError("rates must be non-negative")
    n_bins = int(duration / bin_width)
    if n_bins < 1:
        raise ValueError("duration shorter than one bin")
    occupancy = np.zeros(n_bins)
    for ion in (1, 2):
        rng = substream(seed, f"telegraph-ion{ion}")
        times, initial_on = telegraph_trajectory(rates, n_bins * bin_width, rng)
        occupancy += _on_time_per_bin(times, initial_on, n_bins, bin_width) / bin_width
    expected = background + rate_per_on_ion * occupancy
    counts = substream(seed, "telegraph-counts").poisson(expected).astype(np.int64)
    return CountTrace(
        bin_width=bin_width,
        counts=counts,
        rate_per_on_ion=rate_per_on_ion,
        background=background,
        seed=seed,
        mean_on_ions=occupancy,
    )


def gate_filter(trace: CountTrace, threshold: float, window: float | None = None) -> np.ndarray:
    """Mask of bins gated OFF because the previous window fell below the
    count threshold.  ``window`` defaults to one bin and must be a whole
    number of bins.  The first bins (no complete previous window) stay on.
    """
    if threshold < 0.0:
        raise ValueError("threshold must be >= 0")
    if window is None:
        m = 1
    else:
        m_float = window / trace.bin_width
        m = int(round(m_float))
        if m < 1 or abs(m_float - m) > 1e-9:
            raise ValueError("window must be a positive whole number of bins")
    counts = trace.counts
    gated = np.zeros(counts.size, dtype=bool)
    if counts.size <= m:
        return gated
    window_sums = np.convolve(counts, np.ones(m), mode="valid")  # sums of m consecutive bins
    gated[m:] = window_sums[:-1] < threshold
    return gated


def histogram_counts(trace: CountTrace) -> tuple[np.ndarray, np.ndarray]:
    """Unit-width histogram of the count values: (count value, frequency)."""
    top = int(trace.counts.max())
    freq = np.bincount(trace.counts, minlength=top + 1)
    return np.arange(top + 1, dtype=float), freq.astype(float)


@dataclass(frozen=True, eq=False)
class TristableFit:
    """Three-Gaussian fit of a count histogram, peaks ordered by mean."""

    amplitudes: np.ndarray
    means: np.ndarray
    widths: np.ndarray
    areas: np.ndarray
    area_fractions: np.ndarray        # normalized to sum 1, order: 2-off, 1-off, 0-off
    area_fraction_errors: np.ndarray
    reduced_chi2: float
    converged: bool
    n_iter: int


def _three_gaussians(x: np.ndarray, p: np.ndarray) -> np.ndarray:
    total = np.zeros_like(x)
    for k in range(3):
        a, mu, w = p[3 * k : 3 * k + 3]
        total = total + a * np.exp(-0.5 * ((x - mu) / w) ** 2)
    return total


def _initial_peaks(x: np.ndarray, y: np.ndarray) -> list[tuple[float, float, float]]:
    """Three (amplitude, mean, width) guesses by repeated peak suppression."""
    smooth = np.convolve(y, np.ones(3) / 3.0, mode="same")
    work = smooth.copy()
    guesses = []
    for _ in range(3):
        idx = int(np.argmax(work))
        height = work[idx]
        if height <= 0.0:
            break
        half = height / 2.0
        left = idx
        while left > 0 and work[left] > half:
            left -= 1
        right = idx
        while right < work.size - 1 and work[right] > half:
            right += 1
        width = max((x[right] - x[left]) / 2.355, 0.8)
        guesses.append((float(smooth[idx]), float(x[idx]), float(width)))
        # blank out the whole peak, not just its cap, before searching on
        exclusion = max(3, int(math.ceil(4.0 * width)))
        lo = max(idx - exclusion, 0)
        work[lo : idx + exclusion + 1] = 0.0
    return guesses


def fit_three_gaussians(x, y, max_iter: int = 200) -> TristableFit:
    """Weighted LM fit of three Gaussians to a count histogram.

    Weights are sqrt(max(y, 1)) (Poisson).  Raises if three separated modes
    cannot be located (means closer than twice the estimated widths).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 12:
        raise ValueError("histogram too short for a three-peak fit")
    guesses = _initial_peaks(x, y)
    if len(guesses) < 3:
        raise ValueError("could not locate three peaks in the histogram")
    guesses.sort(key=lambda g: g[1])
    for (_, m1, w1), (_, m2, w2) in zip(guesses[:-1], guesses[1:]):
        if m2 - m1 < 2.0 * max(w1, w2):
            raise ValueError(
                f"histogram modes at {m1:.1f} and {m2:.1f} are not resolvable "
                "(separation below twice the width)"
            )
    p0 = np.array([v for g in guesses for v in g])
    sigma = np.sqrt(np.maximum(y, 1.0))

    def residual(p: np.ndarray) -> np.ndarray:
        return (_three_gaussians(x, p) - y) / sigma

    span = x[-1] - x[0]
    lower = np.tile([0.0, x[0] - span, 0.3], 3)
    upper = np.tile([np.inf, x[-1] + span, span], 3)
    res = levenberg_marquardt(residual, p0, lower=lower, upper=upper, max_iter=max_iter)

    p = res.x.reshape(3, 3)
    order = np.argsort(p[:, 1])
    p = p[order]
    amplitudes, means, widths = p[:, 0], p[:, 1], p[:, 2]
    areas = amplitudes * widths * math.sqrt(2.0 * math.pi)
    total = areas.sum()
    if total <= 0.0:
        raise ValueError("fit produced zero total area")
    fractions = areas / total

    if res.converged and res.covariance is not None:
        # delta method: fractions -> areas -> (amplitude, width), through the
        # sort order (d f_k / d area_j = (delta_kj - f_k) / total)
        root2pi = math.sqrt(2.0 * math.pi)
        grad = np.zeros((3, 9))
        for k in range(3):
            for j in range(3):
                coef = ((1.0 if j == k else 0.0) - fractions[k]) / total
                src = order[j]
                grad[k, 3 * src] += coef * res.x[3 * src + 2] * root2pi
                grad[k, 3 * src + 2] += coef * res.x[3 * src] * root2pi
        frac_cov = grad @ res.covariance @ grad.T
        frac_err = np.sqrt(np.maximum(np.diag(frac_cov), 0.0))
    else:
        frac_err = np.full(3, np.nan)

    return TristableFit(
        amplitudes=amplitudes,
        means=means,
        widths=widths,
        areas=areas,
        area_fractions=fractions,
        area_fraction_errors=frac_err,
        reduced_chi2=res.reduced_chi2 if res.converged else float("nan"),
        converged=res.converged,
        n_iter=res.n_iter,
    )


def p_ratio_from_areas(areas, area_errors=None) -> tuple[float, float]:
    """p_off/p_on from peak areas (2-off, 1-off, 0-off).

    Combines the two estimators a1/(2 a0) and sqrt(a2/a0) by inverse
    variance when errors are supplied, otherwise equally; the reported
    error is never smaller than half the spread between the estimators.
    """
    a2, a1, a0 = (float(v) for v in areas)
    if min(a2, a1, a0) < 0.0:
        raise ValueError("areas must be non-negative")
    if a0 <= 0.0:
        raise ValueError("the 0-off (both fluorescing) peak area must be positive")
    r_lin = a1 / (2.0 * a0)
    estimates = [r_lin]
    variances = []
    if area_errors is not None:
        s2, s1, s0 = (float(v) for v in area_errors)
        var_lin = (s1 / (2.0 * a0)) ** 2 + (a1 * s0 / (2.0 * a0 * a0)) ** 2
        variances.append(var_lin)
    if a2 > 0.0:
        r_sq = math.sqrt(a2 / a0)
        estimates.append(r_sq)
        if area_errors is not None:
            var_sq = r_sq * r_sq * ((s2 / (2.0 * a2)) ** 2 + (s0 / (2.0 * a0)) ** 2)
            variances.append(var_sq)
    if variances and all(v > 0.0 for v in variances):
        weights = [1.0 / v for v in variances]
        value = sum(w * r for w, r in zip(weights, estimates)) / sum(weights)
        error = math.sqrt(1.0 / sum(weights))
    else:
        value = sum(estimates) / len(estimates)
        error = 0.0
    if len(estimates) == 2:
        error = max(error, abs(estimates[1] - estimates[0]) / 2.0)
    return value, error


@dataclass(frozen=True)
class SaturationCalib:
    """Coefficient c of the shelving-ratio relation s/[2(1+s)] = c * r.

    When the underlying decay rates are supplied, the coefficient must
    equal g1*g2 / (g3*(g2 + f2*g1)).
    """

    coefficient: float = DEFAULT_CALIB_COEFFICIENT
    coefficient_rel_uncertainty: float = DEFAULT_CALIB_REL_UNCERTAINTY
    gamma_1: float | None = None
    gamma_2: float | None = None
    gamma_3: float | None = None
    f_2: float | None = None

    def __post_init__(self):
        if self.coefficient <= 0.0:
            raise ValueError("coefficient must be positive")
        rates = (self.gamma_1, self.gamma_2, self.gamma_3, self.f_2)
        if any(v is not None for v in rates):
            if any(v is None for v in rates):
                raise ValueError("supply all of gamma_1, gamma_2, gamma_3, f_2 or none")
            implied = self.gamma_1 * self.gamma_2 / (self.gamma_3 * (self.gamma_2 + self.f_2 * self.gamma_1))
            if abs(implied - self.coefficient) > 1e-12 * abs(implied):
                raise ValueError(
                    f"coefficient {self.coefficient} inconsistent with rates (implies {implied})"
                )

    @classmethod
    def from_rates(
        cls, gamma_1: float, gamma_2: float, gamma_3: float, f_2: float,
        coefficient_rel_uncertainty: float = DEFAULT_CALIB_REL_UNCERTAINTY,
    ) -> "SaturationCalib":
        c = gamma_1 * gamma_2 / (gamma_3 * (gamma_2 + f_2 * gamma_1))
        return cls(
            coefficient=c,
            coefficient_rel_uncertainty=coefficient_rel_uncertainty,
            gamma_1=gamma_1, gamma_2=gamma_2, gamma_3=gamma_3, f_2=f_2,
        )


def saturation_from_ratio(
    ratio: float, ratio_error: float = 0.0, calib: SaturationCalib | None = None
) -> tuple[float, float]:
    """Invert s/[2(1+s)] = c*r for s; error combines the ratio error and
    the coefficient uncertainty in quadrature."""
    if calib is None:
        calib = SaturationCalib()
    if ratio < 0.0:
        raise ValueError("ratio must be >= 0")
    c = calib.coefficient
    x = 2.0 * c * ratio
    if x >= 1.0:
        raise ValueError(
            f"ratio {ratio} outside the invertible range (need c*ratio < 1/2)"
        )
    s = x / (1.0 - x)
    dsdr = 2.0 * c / (1.0 - x) ** 2
    dsdc = 2.0 * ratio / (1.0 - x) ** 2
    sigma_c = c * calib.coefficient_rel_uncertainty
    error = math.hypot(dsdr * ratio_error, dsdc * sigma_c)
    return s, error


def ratio_from_saturation(s: float, calib: SaturationCalib | None = None) -> float:
    """Forward relation: the p_off/p_on ratio produced by saturation s."""
    if calib is None:
        calib = SaturationCalib()
    if s < 0.0:
        raise ValueError("saturation parameter must be >= 0")
    return s / (2.0 * calib.coefficient * (1.0 + s))
