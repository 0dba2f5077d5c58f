import math

import numpy as np
import pytest

from ionfringe import (
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

FOUR_PI = 4.0 * math.pi


def cfg_detuned(delta_hz):
    return ScatterConfig.from_wavelength(194.2e-9, linewidth_hz=70e6, detuning_hz=delta_hz)


class TestLorentzian:
    def test_resonant(self):
        assert lorentzian(0.0, 1e8) == 1.0

    def test_half_width(self):
        assert lorentzian(5e7, 1e8) == pytest.approx(0.5, rel=1e-12)

    def test_full_width_detuning(self):
        assert lorentzian(1e8, 1e8) == pytest.approx(0.2, rel=1e-12)


class TestConfig:
    def test_inconsistent_sigma0_rejected(self):
        lam = 194.2e-9
        with pytest.raises(ValueError, match="sigma_0"):
            ScatterConfig(
                omega_0=1e15, omega_in=1e15, gamma=1e8, lambda_0=lam, sigma_0=lam * lam
            )

    def test_from_wavelength(self):
        cfg = cfg_detuned(35e6)  # half the linewidth
        assert cfg.sigma_0 == pytest.approx(cfg.lambda_0**2 / (2 * math.pi), rel=1e-15)
        # detuning is the difference of two ~1e15 rad/s frequencies, so it
        # carries rounding noise of order 1e-8 relative
        assert lorentzian(cfg.detuning, cfg.gamma) == pytest.approx(0.5, rel=1e-6)


class TestFringeChannel:
    def test_no_emission_along_polarization(self, scatter_cfg):
        assert xsec_pi_case(0.0, 1.0, 0.8, scatter_cfg) == 0.0

    def test_perfect_destructive_fringe(self, scatter_cfg):
        assert xsec_pi_case(math.pi / 2, math.pi, 1.0, scatter_cfg) == pytest.approx(0.0, abs=1e-16)

    def test_constructive_equatorial(self, scatter_cfg):
        # sigma_0 units: 2/(4 pi) at the fringe maximum
        assert xsec_pi_case(math.pi / 2, 0.0, 1.0, scatter_cfg) == pytest.approx(
            1.0 / (2.0 * math.pi), rel=1e-12
        )
        si = xsec_pi_case(math.pi / 2, 0.0, 1.0, scatter_cfg, si=True)
        assert si == pytest.approx(scatter_cfg.sigma_0 / (2.0 * math.pi), rel=1e-12)


class TestDepolarizingChannels:
    def test_sigma_pol_value(self, scatter_cfg):
        assert xsec_sigma_to_sigmapol(scatter_cfg) == pytest.approx(1.0 / (8 * math.pi), rel=1e-12)

    def test_sigma_pol_isotropic_and_detuned(self):
        cfg = cfg_detuned(35e6)
        assert xsec_sigma_to_sigmapol(cfg) == pytest.approx(0.5 / (8 * math.pi), rel=1e-6)

    def test_pi_pol_angular_factor(self, scatter_cfg):
        assert xsec_sigma_to_pipol(math.pi / 2, scatter_cfg) == pytest.approx(0.0, abs=1e-30)
        assert xsec_sigma_to_pipol(0.0, scatter_cfg) == pytest.approx(1.0 / (8 * math.pi), rel=1e-12)
        assert xsec_sigma_to_pipol(math.pi / 3, scatter_cfg) == pytest.approx(
            1.0 / (32 * math.pi), rel=1e-12
        )


class TestDetectedChannels:
    def test_additivity_random(self, scatter_cfg):
        rng = np.random.default_rng(41)
        for _ in range(1000):
            polar = float(rng.uniform(0, math.pi))
            phase = float(rng.uniform(-20, 20))
            dw = float(rng.uniform(0, 1))
            total = xsec_detected(Channel.UNPOLARIZED, polar, phase, dw, scatter_cfg)
            split = xsec_detected(Channel.PI, polar, phase, dw, scatter_cfg) + xsec_detected(
                Channel.SIGMA, polar, phase, dw, scatter_cfg
            )
            assert abs(total - split) <= 1e-12 * total

    def test_unpolarized_equatorial_maximum(self, scatter_cfg):
        value = xsec_detected(Channel.UNPOLARIZED, math.pi / 2, 0.0, 1.0, scatter_cfg)
        assert value == pytest.approx(3.0 / FOUR_PI, rel=1e-12)

    def test_sigma_channel_direction_independent(self, scatter_cfg):
        rng = np.random.default_rng(42)
        values = {
            xsec_detected(
                Channel.SIGMA,
                float(rng.uniform(0, math.pi)),
                float(rng.uniform(-9, 9)),
                float(rng.uniform(0, 1)),
                scatter_cfg,
            )
            for _ in range(1000)
        }
        assert len(values) == 1

    def test_which_path_limit_kills_phase(self, scatter_cfg):
        for channel in Channel:
            values = {
                xsec_detected(channel, 1.0, phase, 0.0, scatter_cfg)
                for phase in np.linspace(-8, 8, 64)
            }
            assert len(values) == 1

    def test_nonnegative(self, scatter_cfg):
        rng = np.random.default_rng(43)
        for channel in Channel:
            for _ in range(300):
                value = xsec_detected(
                    channel,
                    float(rng.uniform(0, math.pi)),
                    float(rng.uniform(-20, 20)),
                    float(rng.uniform(0, 1)),
                    scatter_cfg,
                )
                assert value >= 0.0

    def test_contrast_out_of_range_rejected(self, scatter_cfg):
        with pytest.raises(ValueError):
            xsec_detected(Channel.PI, 1.0, 0.0, 1.2, scatter_cfg)


class TestVisibility:
    def test_full_visibility_point(self):
        assert fringe_visibility(Channel.PI, math.pi / 2, 1.0) == 1.0

    def test_unpolarized_bound(self):
        rng = np.random.default_rng(44)
        for _ in range(200):
            polar = float(rng.uniform(0, math.pi))
            dw = float(rng.uniform(0, 1))
            v = fringe_visibility(Channel.UNPOLARIZED, polar, dw)
            assert v <= 0.5 + 1e-15
        assert fringe_visibility(Channel.UNPOLARIZED, math.pi / 2, 1.0) == pytest.approx(0.5)

    def test_depolarized_channel_flat(self):
        assert fringe_visibility(Channel.SIGMA, 1.2, 0.9) == 0.0

    def test_matches_phase_sweep(self, scatter_cfg):
        phases = np.linspace(0.0, 2.0 * math.pi, 512, endpoint=False)
        rng = np.random.default_rng(45)
        for channel in (Channel.PI, Channel.UNPOLARIZED):
            for _ in range(60):
                polar = float(rng.uniform(0.05, math.pi - 0.05))
                dw = float(rng.uniform(0, 1))
                values = [xsec_detected(channel, polar, p, dw, scatter_cfg) for p in phases]
                vmax, vmin = max(values), min(values)
                swept = (vmax - vmin) / (vmax + vmin)
                assert swept == pytest.approx(fringe_visibility(channel, polar, dw), abs=1e-10)


class TestSumRule:
    def test_unpolarized_total(self, scatter_cfg):
        # two independent emitters once interference is switched off
        assert total_xsec_no_interference(Channel.UNPOLARIZED, scatter_cfg) == pytest.approx(
            2.0, rel=1e-6
        )

    def test_depolarized_total(self, scatter_cfg):
        assert total_xsec_no_interference(Channel.SIGMA, scatter_cfg) == pytest.approx(1.0, rel=1e-6)

    def test_pi_total_is_complement(self, scatter_cfg):
        assert total_xsec_no_interference(Channel.PI, scatter_cfg) == pytest.approx(1.0, rel=1e-6)

    def test_si_units_and_detuning(self):
        cfg = cfg_detuned(35e6)
        total = total_xsec_no_interference(Channel.UNPOLARIZED, cfg, si=True)
        assert total == pytest.approx(2.0 * cfg.sigma_0 * 0.5, rel=2e-6)
