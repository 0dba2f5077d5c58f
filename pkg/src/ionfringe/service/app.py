"""HTTP API exposing the simulation and analysis pipeline.

All endpoints are stateless: a request carries the full run configuration,
the response echoes it back together with the root seed, so any result can
be reproduced bit-for-bit from its own report.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..config import (
    DEG,
    RunConfig,
    build_beam,
    build_detector,
    build_scatter,
    build_thermal_state,
    build_trap,
)
from ..fitfringe import (
    FringeFitSetup,
    FringeModelParams,
    default_initial_guess,
    extrapolated_visibility,
    fit_profile,
)
from ..imaging import FringeImage, NoiseConfig, add_shot_noise, collapse_profile, synthesize_image
from ..jumps import (
    CountTrace,
    JumpRates,
    SaturationCalib,
    fit_three_gaussians,
    gate_filter,
    histogram_counts,
    p_ratio_from_areas,
    saturation_from_ratio,
    simulate_telegraph,
)
from ..modes import mode_spectrum
from ..optimize import SingularJacobianError
from ..scatter import Channel
from ..seeding import child_seed
from ..selfcheck import run_selfcheck
from . import schemas

TWO_PI = 2.0 * math.pi


def create_app() -> FastAPI:
    app = FastAPI(title="ionfringe", version=__version__)

    @app.exception_handler(ValueError)
    async def _domain_error(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=400, content={"detail": str(exc), "error_class": "domain"}
        )

    @app.exception_handler(SingularJacobianError)
    async def _numeric_error(request: Request, exc: SingularJacobianError):
        return JSONResponse(
            status_code=400, content={"detail": str(exc), "error_class": "numeric"}
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/modes/info", response_model=schemas.ModesInfoResponse)
    def modes_info(req: schemas.ModesInfoRequest):
        spectrum = mode_spectrum(build_trap(req.trap))
        com = dict(zip(("x", "y", "z"), spectrum.com))
        rel = dict(zip(("rock_x", "rock_y", "stretch"), spectrum.rel))
        return schemas.ModesInfoResponse(
            separation_m=spectrum.separation,
            f_com_hz={k: v / TWO_PI for k, v in com.items()},
            f_rel_hz={k: v / TWO_PI for k, v in rel.items()},
            omega_com_rad_s=com,
            omega_rel_rad_s=rel,
        )

    def _make_image(cfg: RunConfig) -> FringeImage:
        beam = build_beam(cfg.beam)
        det = build_detector(cfg.detector)
        state = build_thermal_state(cfg)
        scatter_cfg = build_scatter(cfg.scatter, cfg.beam)
        img = synthesize_image(beam, state, scatter_cfg, det, n_threads=cfg.threads)
        if cfg.noise.enabled:
            noise = NoiseConfig(
                exposure_scale=cfg.noise.exposure_scale,
                background_rate=cfg.noise.background_rate,
                seed=child_seed(cfg.seed, "image-noise"),
            )
            img = add_shot_noise(img, noise)
        return img

    @app.post("/simulate/image", response_model=schemas.SimulateImageResponse)
    def simulate_image(req: schemas.SimulateImageRequest):
        img = _make_image(req.config)
        payload = schemas.ImagePayload(
            pixels=img.pixels.tolist(),
            phi_rad=img.phi.tolist(),
            phi_out_rad=img.phi_out.tolist(),
            channel=img.channel.value,
            is_counts=img.is_counts,
        )
        return schemas.SimulateImageResponse(image=payload, config=req.config, seed=req.config.seed)

    @app.post("/simulate/profile", response_model=schemas.SimulateProfileResponse)
    def simulate_profile(req: schemas.SimulateProfileRequest):
        img = _make_image(req.config)
        window_deg = (
            req.phi_out_window_deg
            if req.phi_out_window_deg is not None
            else req.config.detector.profile_phi_out_deg
        )
        window = None
        if window_deg is not None:
            window = (window_deg[0] * DEG, window_deg[1] * DEG)
        phi, values, stderr = collapse_profile(img, window)
        payload = schemas.ProfilePayload(
            phi_rad=phi.tolist(), values=values.tolist(), stderr=stderr.tolist()
        )
        return schemas.SimulateProfileResponse(
            profile=payload,
            channel=img.channel.value,
            config=req.config,
            seed=req.config.seed,
        )

    @app.post("/fit/fringe", response_model=schemas.FitFringeResponse)
    def fit_fringe(req: schemas.FitFringeRequest):
        cfg = req.config
        beam = build_beam(cfg.beam)
        spectrum = mode_spectrum(build_trap(cfg.trap))
        setup = FringeFitSetup(
            beam=beam,
            spectrum=spectrum,
            mass=build_trap(cfg.trap).mass,
            channel=Channel(cfg.detector.channel),
            phase_offset=cfg.fit.phase_offset_rad,
        )
        values = np.asarray(req.profile.values, dtype=float)
        initial = default_initial_guess(values)
        f = cfg.fit
        initial = FringeModelParams(
            amplitude=f.initial_amplitude if f.initial_amplitude is not None else initial.amplitude,
            background=f.initial_background if f.initial_background is not None else initial.background,
            t_rock=f.initial_t_rock_mk * 1e-3 if f.initial_t_rock_mk is not None else initial.t_rock,
            visibility_scale=f.initial_visibility if f.initial_visibility is not None else initial.visibility_scale,
        )
        result = fit_profile(
            np.asarray(req.profile.phi_rad, dtype=float),
            values,
            stderr=np.asarray(req.profile.stderr, dtype=float) if req.profile.stderr else None,
            initial=initial,
            setup=setup,
            vary_background=f.vary_background,
            max_iter=f.max_iter,
            xtol=f.xtol,
            gtol=f.gtol,
        )
        if not result.converged:
            return schemas.FitFringeResponse(
                converged=False,
                n_iter=result.n_iter,
                n_points=result.n_points,
                message=result.message,
                config=cfg,
                seed=cfg.seed,
            )
        vis, vis_err, contrast0 = extrapolated_visibility(result, setup)
        p = result.params
        return schemas.FitFringeResponse(
            converged=True,
            n_iter=result.n_iter,
            n_points=result.n_points,
            message=result.message,
            params=schemas.FittedParams(
                amplitude=p.amplitude,
                background=p.background,
                t_rock_k=p.t_rock,
                visibility_scale=p.visibility_scale,
            ),
            one_sigma=schemas.FittedParams(
                amplitude=result.one_sigma["amplitude"],
                background=result.one_sigma["background"],
                t_rock_k=result.one_sigma["t_rock"],
                visibility_scale=result.one_sigma["visibility_scale"],
            ),
            reduced_chi2=result.reduced_chi2,
            covariance=result.covariance.tolist(),
            extrapolated_visibility=schemas.VisibilityExtrapolation(
                value=vis, error=vis_err, contrast_at_zero=contrast0
            ),
            config=cfg,
            seed=cfg.seed,
        )

    @app.post("/jumps/simulate", response_model=schemas.JumpsSimulateResponse)
    def jumps_simulate(req: schemas.JumpsSimulateRequest):
        j = req.config.jumps
        rates = JumpRates.from_ratio(j.ratio, rate_off_to_on=j.rate_off_to_on_hz)
        trace = simulate_telegraph(
            rates,
            duration=j.duration_s,
            bin_width=j.bin_width_ms * 1e-3,
            rate_per_on_ion=j.rate_per_on_ion,
            background=j.background,
            seed=child_seed(req.config.seed, "telegraph"),
        )
        gated = gate_filter(trace, j.gate_threshold)
        return schemas.JumpsSimulateResponse(
            counts=trace.counts.tolist(),
            bin_width_s=trace.bin_width,
            p_on=rates.p_on,
            p_off=rates.p_off,
            gated_fraction=float(gated.mean()),
            config=req.config,
            seed=req.config.seed,
        )

    @app.post("/jumps/calibrate", response_model=schemas.JumpsCalibrateResponse)
    def jumps_calibrate(req: schemas.JumpsCalibrateRequest):
        j = req.config.jumps
        counts = np.asarray(req.counts, dtype=np.int64)
        trace = CountTrace(
            bin_width=req.bin_width_s,
            counts=counts,
            rate_per_on_ion=j.rate_per_on_ion,
            background=j.background,
            seed=req.config.seed,
        )
        gated_fraction = None
        if j.gate_histogram:
            gated = gate_filter(trace, j.gate_threshold)
            gated_fraction = float(gated.mean())
            counts = counts[~gated]
        x, y = histogram_counts(
            CountTrace(
                bin_width=req.bin_width_s,
                counts=counts,
                rate_per_on_ion=j.rate_per_on_ion,
                background=j.background,
                seed=req.config.seed,
            )
        )
        fit = fit_three_gaussians(x, y)
        ratio, ratio_err = p_ratio_from_areas(fit.area_fractions, fit.area_fraction_errors)
        calib = SaturationCalib(
            coefficient=j.calib_coefficient,
            coefficient_rel_uncertainty=j.calib_rel_uncertainty,
        )
        s, s_err = saturation_from_ratio(ratio, ratio_err, calib)
        return schemas.JumpsCalibrateResponse(
            converged=fit.converged,
            n_iter=fit.n_iter,
            means=fit.means.tolist(),
            widths=fit.widths.tolist(),
            amplitudes=fit.amplitudes.tolist(),
            area_fractions=fit.area_fractions.tolist(),
            area_fraction_errors=fit.area_fraction_errors.tolist(),
            reduced_chi2=fit.reduced_chi2,
            p_ratio=ratio,
            p_ratio_error=ratio_err,
            saturation=s,
            saturation_error=s_err,
            gated_fraction=gated_fraction,
            config=req.config,
        )

    @app.post("/selfcheck", response_model=schemas.SelfCheckResponse)
    def selfcheck():
        checks = run_selfcheck()
        return schemas.SelfCheckResponse(
            passed=all(c["passed"] for c in checks),
            checks=[schemas.CheckResult(**c) for c in checks],
        )

    return app


app = create_app()
