"""Fast built-in oracle suite: cross-checks the closed forms against
brute-force routes so an installation can validate itself in seconds."""

from __future__ import annotations

import math

import numpy as np

from . import fitfringe, jumps, modes, scatter, thermal
from .constants import HBAR
from .geometry import BeamGeometry, Vec3


def _random_state(rng: np.random.Generator) -> thermal.ThermalState:
    trap = modes.default_hg198_trap()
    spectrum = modes.mode_spectrum(trap)
    temps = thermal.ModeTemperatures(
        t_x=float(rng.uniform(0.0, 3e-3)),
        t_y=float(rng.uniform(0.0, 3e-3)),
        t_z=float(rng.uniform(0.0, 3e-3)),
    )
    return thermal.ThermalState(temperatures=temps, spectrum=spectrum, mass=trap.mass)


def run_selfcheck() -> list[dict]:
    """Run every check; each entry has name, passed, detail."""
    checks = []

    def record(name: str, passed: bool, detail: str) -> None:
        checks.append({"name": name, "passed": bool(passed), "detail": detail})

    rng = np.random.default_rng(20260809)
    cfg = scatter.ScatterConfig.from_wavelength(194.2e-9, linewidth_hz=70e6)

    # channel additivity and isotropy of the depolarized channel
    worst = 0.0
    for _ in range(200):
        polar = float(rng.uniform(0.0, math.pi))
        phase = float(rng.uniform(-10.0, 10.0))
        dw = float(rng.uniform(0.0, 1.0))
        total = scatter.xsec_detected(scatter.Channel.UNPOLARIZED, polar, phase, dw, cfg)
        parts = scatter.xsec_detected(
            scatter.Channel.PI, polar, phase, dw, cfg
        ) + scatter.xsec_detected(scatter.Channel.SIGMA, polar, phase, dw, cfg)
        worst = max(worst, abs(total - parts) / total)
    record("channel-additivity", worst < 1e-12, f"max relative gap {worst:.2e}")

    sig = [
        scatter.xsec_detected(scatter.Channel.SIGMA, float(rng.uniform(0, math.pi)), 1.0, 0.5, cfg)
        for _ in range(64)
    ]
    record("sigma-isotropy", float(np.ptp(sig)) == 0.0, f"spread {float(np.ptp(sig)):.2e}")

    # sum rule: unpolarized solid-angle integral, fringe term off
    total = scatter.total_xsec_no_interference(scatter.Channel.UNPOLARIZED, cfg)
    line = scatter.lorentzian(cfg.detuning, cfg.gamma)
    err = abs(total - 2.0 * line) / (2.0 * line)
    record("unpolarized-sum-rule", err < 1e-6, f"relative error {err:.2e}")

    # contrast factor: closed form vs Fock-basis brute force and Monte Carlo
    state = _random_state(rng)
    q = Vec3(2e6, -1e6, 3e6)
    closed = thermal.debye_waller(q, state)
    fock = 1.0
    for q1, omega, temp in (
        (q.x, state.spectrum.rock, state.temperatures.t_x),
        (q.y, state.spectrum.rock, state.temperatures.t_y),
        (q.z, state.spectrum.stretch, state.temperatures.t_z),
    ):
        fock *= thermal.dw_oracle_fock_1d(q1, omega, temp, state.mass / 2.0)
    err = abs(fock - closed)
    record("contrast-fock-oracle", err < 1e-6, f"|closed - fock| = {err:.2e}")

    mc, stderr = thermal.dw_oracle_gaussian_mc(q, state, n_samples=100_000, seed=7)
    record(
        "contrast-mc-oracle",
        abs(mc - closed) < 3.0 * max(stderr, 1e-12),
        f"|closed - mc| = {abs(mc - closed):.2e} vs 3 stderr = {3 * stderr:.2e}",
    )

    # closure over final vibrational states
    deficit = 0.0
    eta_q = 0.5 / math.sqrt(HBAR / (2.0 * (state.mass / 2.0) * state.spectrum.stretch))
    for n in range(3):
        total = thermal.closure_check_1d(eta_q, state.spectrum.stretch, state.mass / 2.0, n, 60)
        deficit = max(deficit, abs(total - 1.0))
    record("vibrational-closure", deficit < 1e-8, f"max deficit {deficit:.2e}")

    # mode algebra
    trap = modes.default_hg198_trap()
    spec = modes.mode_spectrum(trap)
    ok = (
        abs(spec.stretch - math.sqrt(3.0) * trap.omega_Z) < 1e-12 * spec.stretch
        and abs(spec.rock**2 + trap.omega_Z**2 - trap.omega_R**2) < 1e-12 * trap.omega_R**2
    )
    record("mode-frequencies", ok, "stretch = sqrt(3) omega_Z; rock^2 + omega_Z^2 = omega_R^2")

    ratio = thermal.temperature_ratio(62.0 * math.pi / 180.0)
    record("cooling-temperature-ratio", abs(ratio - 1.760) < 1e-3, f"ratio(62 deg) = {ratio:.4f}")

    # saturation inversion roundtrip
    calib = jumps.SaturationCalib()
    s0 = 0.078
    s1, _ = jumps.saturation_from_ratio(jumps.ratio_from_saturation(s0, calib), calib=calib)
    record("saturation-roundtrip", abs(s1 - s0) < 1e-12, f"|s - s'| = {abs(s1 - s0):.2e}")

    # fit roundtrip on noiseless synthetic data
    beam = BeamGeometry(
        theta_in=62.0 * math.pi / 180.0, wavelength=194.2e-9, eps_in=Vec3(0.0, 1.0, 0.0)
    )
    setup = fitfringe.FringeFitSetup(beam=beam, spectrum=spec, mass=trap.mass)
    truth = fitfringe.FringeModelParams(
        amplitude=100.0, background=10.0, t_rock=1.08e-3, visibility_scale=0.71
    )
    phi = np.linspace(15.0, 45.0, 48) * math.pi / 180.0
    data = fitfringe.model_profile(phi, truth, setup)
    guess = fitfringe.FringeModelParams(
        amplitude=80.0, background=0.0, t_rock=2.0e-3, visibility_scale=0.5
    )
    fit = fitfringe.fit_profile(phi, data, initial=guess, setup=setup)
    ok = fit.converged and abs(fit.params.t_rock - truth.t_rock) < 1e-6 * truth.t_rock
    record(
        "fit-roundtrip",
        ok,
        f"converged={fit.converged}, recovered T = {fit.params.t_rock if fit.params else float('nan'):.4e} K",
    )

    return checks
