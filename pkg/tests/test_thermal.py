import math

import numpy as np
import pytest

from ionfringe import ModeTemperatures, ThermalState, Vec3, debye_waller, mean_occupation, temperature_ratio
from ionfringe.constants import BOLTZMANN, HBAR
from ionfringe.thermal import (
    closure_check_1d,
    dw_oracle_fock_1d,
    dw_oracle_gaussian_mc,
    relative_displacement_variance,
)


def state_with(spectrum, mass, t_x, t_y, t_z):
    return ThermalState(ModeTemperatures(t_x=t_x, t_y=t_y, t_z=t_z), spectrum, mass)


class TestMeanOccupation:
    def test_ground_state(self):
        assert mean_occupation(1e7, 0.0) == 0.0

    def test_unit_occupation_at_log2(self):
        omega = 1e7
        temperature = HBAR * omega / (BOLTZMANN * math.log(2.0))
        assert mean_occupation(omega, temperature) == pytest.approx(1.0, rel=1e-12)

    def test_classical_limit(self):
        omega = 1e6
        temperature = 60.0 * HBAR * omega / BOLTZMANN
        classical = BOLTZMANN * temperature / (HBAR * omega)
        assert mean_occupation(omega, temperature) == pytest.approx(classical, rel=0.01)


class TestDebyeWaller:
    def test_unity_at_zero_q(self, thermal_state):
        assert debye_waller(Vec3(0.0, 0.0, 0.0), thermal_state) == 1.0

    def test_zero_point_axial(self, trap, spectrum):
        state = state_with(spectrum, trap.mass, 0.0, 0.0, 0.0)
        q = Vec3(0.0, 0.0, 5e6)
        expected = math.exp(-HBAR * q.z**2 / (2.0 * trap.mass * spectrum.stretch))
        assert debye_waller(q, state) == pytest.approx(expected, rel=1e-12)

    def test_classical_limit_axial(self, trap, spectrum):
        # hot stretch mode: exponent becomes q^2 kB T / (m omega^2)
        t_hot = 60.0 * HBAR * spectrum.stretch / BOLTZMANN
        state = state_with(spectrum, trap.mass, 0.0, 0.0, t_hot)
        q_z = 0.3 * math.sqrt(trap.mass * spectrum.stretch**2 / (BOLTZMANN * t_hot))
        classical = math.exp(-q_z**2 * BOLTZMANN * t_hot / (trap.mass * spectrum.stretch**2))
        assert debye_waller(Vec3(0.0, 0.0, q_z), state) == pytest.approx(classical, rel=0.005)

    def test_in_unit_interval_and_unity_only_at_zero(self, thermal_state):
        rng = np.random.default_rng(2)
        for _ in range(200):
            q = Vec3(*rng.uniform(-1e7, 1e7, size=3))
            dw = debye_waller(q, thermal_state)
            assert 0.0 < dw <= 1.0
            if q.norm() > 1e3:
                assert dw < 1.0

    def test_monotone_in_temperature(self, trap, spectrum):
        q = Vec3(3e6, 2e6, 4e6)
        values = [
            debye_waller(q, state_with(spectrum, trap.mass, t, t, t))
            for t in np.linspace(0.0, 5e-3, 12)
        ]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_exponent_additivity(self, thermal_state):
        q = Vec3(4e6, 0.0, 6e6)
        product = debye_waller(Vec3(q.x, 0.0, 0.0), thermal_state) * debye_waller(
            Vec3(0.0, 0.0, q.z), thermal_state
        )
        assert debye_waller(q, thermal_state) == pytest.approx(product, rel=1e-12)


class TestTemperatureRatio:
    def test_symmetric_at_45(self):
        assert temperature_ratio(math.pi / 4) == pytest.approx(1.0, rel=1e-12)

    def test_experiment_angle(self):
        theta = math.radians(62.0)
        direct = (1.0 + 1.0 / (3.0 * math.cos(theta) ** 2)) / (
            1.0 + 1.0 / (3.0 * math.sin(theta) ** 2)
        )
        value = temperature_ratio(theta)
        assert value == pytest.approx(direct, rel=1e-14)
        assert value == pytest.approx(1.760, abs=1e-3)

    def test_complementary_angles(self):
        for theta in (0.3, 0.7, 1.1):
            product = temperature_ratio(theta) * temperature_ratio(math.pi / 2 - theta)
            assert product == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("theta", [0.0, math.pi / 2, -0.1, 2.0])
    def test_domain(self, theta):
        with pytest.raises(ValueError):
            temperature_ratio(theta)


class TestGaussianMCOracle:
    def test_zero_q(self, thermal_state):
        mean, stderr = dw_oracle_gaussian_mc(Vec3(0, 0, 0), thermal_state, 2000, seed=1)
        assert mean == 1.0
        assert stderr == 0.0

    def test_agrees_with_closed_form(self, trap, spectrum):
        rng = np.random.default_rng(31)
        for i in range(20):
            state = state_with(
                spectrum,
                trap.mass,
                float(rng.uniform(0, 4e-3)),
                float(rng.uniform(0, 4e-3)),
                float(rng.uniform(0, 4e-3)),
            )
            q = Vec3(*rng.uniform(-8e6, 8e6, size=3))
            mean, stderr = dw_oracle_gaussian_mc(q, state, 100_000, seed=100 + i)
            assert abs(mean - debye_waller(q, state)) < 3.0 * max(stderr, 1e-12)

    def test_stderr_scaling(self, thermal_state):
        q = Vec3(4e6, 3e6, 5e6)
        _, err_small = dw_oracle_gaussian_mc(q, thermal_state, 25_000, seed=9)
        _, err_big = dw_oracle_gaussian_mc(q, thermal_state, 100_000, seed=9)
        assert err_small / err_big == pytest.approx(2.0, rel=0.15)

    def test_sample_floor(self, thermal_state):
        with pytest.raises(ValueError):
            dw_oracle_gaussian_mc(Vec3(1, 0, 0), thermal_state, 10, seed=0)


class TestFockOracle:
    def test_ground_state_gaussian(self, trap, spectrum):
        omega = spectrum.stretch
        eff_mass = trap.mass / 2.0
        q = 0.7 / math.sqrt(HBAR / (2.0 * eff_mass * omega))
        value = dw_oracle_fock_1d(q, omega, 0.0, eff_mass)
        assert value == pytest.approx(math.exp(-q * q * HBAR / (4.0 * eff_mass * omega)), abs=1e-10)

    def test_zero_q(self, trap, spectrum):
        assert dw_oracle_fock_1d(0.0, spectrum.stretch, 1e-3, trap.mass / 2.0) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_thermal_two_quanta(self, trap, spectrum):
        omega = spectrum.rock
        eff_mass = trap.mass / 2.0
        temperature = HBAR * omega / (BOLTZMANN * math.log(1.5))  # mean occupation = 2
        assert mean_occupation(omega, temperature) == pytest.approx(2.0, rel=1e-12)
        q = 0.5 / math.sqrt(HBAR / (2.0 * eff_mass * omega))
        closed = math.exp(-0.5 * q * q * relative_displacement_variance(omega, temperature, trap.mass))
        assert dw_oracle_fock_1d(q, omega, temperature, eff_mass) == pytest.approx(closed, abs=1e-6)

    def test_insufficient_truncation_rejected(self, trap, spectrum):
        omega = spectrum.stretch
        temperature = 5e-3
        with pytest.raises(ValueError, match="truncation"):
            dw_oracle_fock_1d(1e6, omega, temperature, trap.mass / 2.0, n_max=10)


class TestClosure:
    def test_exact_at_zero_q(self, trap, spectrum):
        assert closure_check_1d(0.0, spectrum.stretch, trap.mass / 2.0, 3, 40) == 1.0

    def test_ground_state_small_coupling(self, trap, spectrum):
        omega = spectrum.stretch
        eff_mass = trap.mass / 2.0
        q = 0.5 / math.sqrt(HBAR / (2.0 * eff_mass * omega))
        assert abs(closure_check_1d(q, omega, eff_mass, 0, 60) - 1.0) < 1e-8

    def test_deficit_decreases_with_basis(self, trap, spectrum):
        omega = spectrum.stretch
        eff_mass = trap.mass / 2.0
        q = 1.5 / math.sqrt(HBAR / (2.0 * eff_mass * omega))
        deficits = [
            abs(closure_check_1d(q, omega, eff_mass, 5, n_max) - 1.0) for n_max in (8, 11, 14, 20)
        ]
        assert all(a > b for a, b in zip(deficits, deficits[1:]))
        assert deficits[0] > 1e-10


class TestOracleConsistency:
    def test_fock_times_three_axes_matches_closed_form(self, trap, spectrum):
        state = state_with(spectrum, trap.mass, 1.3e-3, 0.4e-3, 2.2e-3)
        q = Vec3(5e6, -3e6, 7e6)
        product = 1.0
        for q1, omega, t in (
            (q.x, spectrum.rock, 1.3e-3),
            (q.y, spectrum.rock, 0.4e-3),
            (q.z, spectrum.stretch, 2.2e-3),
        ):
            product *= dw_oracle_fock_1d(q1, omega, t, trap.mass / 2.0)
        assert product == pytest.approx(debye_waller(q, state), abs=1e-6)
