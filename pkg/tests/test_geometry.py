import math

import numpy as np
import pytest

from ionfringe import (
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
from ionfringe.geometry import k_in_direction

THETA = math.radians(62.0)
WAVELENGTH = 194.2e-9
K = 2.0 * math.pi / WAVELENGTH

IDENTITY_TRIAD = (Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1))


def rot_y(angle):
    """Rotation matrix about +Y (oracle for the in-plane rotation)."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])


class TestKin:
    def test_axis_aligned(self):
        d = k_in_direction(0.0)
        assert d.as_tuple() == (0.0, 0.0, 1.0)

    def test_perpendicular(self):
        d = k_in_direction(math.pi / 2)
        assert d.x == pytest.approx(1.0, abs=1e-15)
        assert abs(d.z) < 1e-15

    def test_experiment_angle(self, beam):
        k = k_in_vector(beam)
        assert k.norm() == pytest.approx(K, rel=1e-14)
        assert k.z == pytest.approx(K * math.cos(THETA), rel=1e-14)
        assert k.y == 0.0


class TestKout:
    def test_forward_returns_k_in(self, beam):
        k_out = k_out_vector(beam, DetectorDirection(phi=0.0, phi_out=0.0))
        k_in = k_in_vector(beam)
        assert (k_out - k_in).norm() < 1e-12 * K

    def test_pure_out_of_plane_limit(self, beam):
        # |phi_out| < pi/2 is open, so approach the +Y axis
        eps = 1e-7
        k_out = k_out_vector(beam, DetectorDirection(phi=0.0, phi_out=math.pi / 2 - eps))
        assert k_out.y == pytest.approx(K, rel=1e-9)
        assert abs(k_out.x) < 1e-6 * K and abs(k_out.z) < 1e-6 * K

    def test_in_plane_rotation_against_matrix(self, beam):
        # positive phi rotates the beam direction toward +Z
        phi = math.radians(30.0)
        k_out = k_out_vector(beam, DetectorDirection(phi=phi, phi_out=0.0))
        expected = K * rot_y(-phi) @ np.array(k_in_direction(THETA).as_tuple())
        assert np.allclose([k_out.x, k_out.y, k_out.z], expected, rtol=1e-12)
        polar = math.acos(k_out.z / k_out.norm())
        assert polar == pytest.approx(THETA - phi, abs=1e-12)

    def test_out_of_plane_construction(self, beam):
        rng = np.random.default_rng(3)
        for _ in range(50):
            phi = float(rng.uniform(-1.2, 1.2))
            pout = float(rng.uniform(-1.2, 1.2))
            k_out = k_out_vector(beam, DetectorDirection(phi=phi, phi_out=pout))
            in_plane = rot_y(-phi) @ np.array(k_in_direction(THETA).as_tuple())
            expected = K * (math.cos(pout) * in_plane + math.sin(pout) * np.array([0.0, 1.0, 0.0]))
            assert np.allclose([k_out.x, k_out.y, k_out.z], expected, rtol=1e-12)

    def test_elastic_magnitude_everywhere(self, beam):
        k = k_in_vector(beam).norm()
        for phi in np.linspace(-1.4, 1.4, 15):
            for pout in np.linspace(-1.4, 1.4, 15):
                k_out = k_out_vector(beam, DetectorDirection(phi=float(phi), phi_out=float(pout)))
                assert k_out.norm() == pytest.approx(k, rel=1e-12)


class TestScatteringVector:
    def test_forward_zero(self, beam):
        k = k_in_vector(beam)
        q = scattering_vector(k, k)
        assert q.as_tuple() == (0.0, 0.0, 0.0)

    def test_backscattering(self, beam):
        k = k_in_vector(beam)
        q = scattering_vector(k, -k)
        assert q.norm() == pytest.approx(2.0 * K, rel=1e-14)

    def test_z_component_arithmetic(self, beam):
        k_in = k_in_vector(beam)
        k_out = k_out_vector(beam, DetectorDirection(phi=math.radians(30.0), phi_out=0.0))
        q = scattering_vector(k_in, k_out)
        expected = K * (math.cos(math.radians(32.0)) - math.cos(math.radians(62.0)))
        assert q.z == pytest.approx(expected, rel=1e-12)

    def test_magnitude_mismatch_rejected(self, beam):
        k = k_in_vector(beam)
        with pytest.raises(ValueError, match="elastic"):
            scattering_vector(k, 1.001 * k)


class TestAtomFrame:
    def test_z_along_polarization(self, beam):
        x_hat, y_hat, z_hat = atom_frame(beam)
        assert z_hat.as_tuple() == (0.0, 1.0, 0.0)
        assert (x_hat - k_in_direction(THETA)).norm() < 1e-15

    def test_right_handed_orthonormal(self, beam):
        x_hat, y_hat, z_hat = atom_frame(beam)
        m = np.array([x_hat.as_tuple(), y_hat.as_tuple(), z_hat.as_tuple()])
        assert np.allclose(m @ m.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-12)

    def test_in_plane_polarization_handedness(self):
        eps = Vec3(math.cos(THETA), 0.0, -math.sin(THETA))
        beam = BeamGeometry(theta_in=THETA, wavelength=WAVELENGTH, eps_in=eps)
        x_hat, y_hat, z_hat = atom_frame(beam)
        # z x x with both in the X-Z plane lands on -Y
        assert y_hat.y == pytest.approx(-1.0, abs=1e-12)

    def test_non_perpendicular_rejected(self):
        with pytest.raises(ValueError):
            BeamGeometry(theta_in=THETA, wavelength=WAVELENGTH, eps_in=Vec3(0.0, 0.0, 1.0))


class TestAtomAngles:
    def test_along_z(self, beam):
        triad = atom_frame(beam)
        angles = atom_angles(Vec3(0.0, 5.0, 0.0), triad)  # +Y is the atom z axis here
        assert angles.polar == 0.0

    def test_along_x(self, beam):
        triad = atom_frame(beam)
        angles = atom_angles(k_in_vector(beam), triad)
        assert angles.polar == pytest.approx(math.pi / 2, abs=1e-12)
        assert angles.azimuth == pytest.approx(0.0, abs=1e-12)

    def test_perpendicular_polarization_gives_equatorial_outgoing(self, beam):
        triad = atom_frame(beam)
        for phi in np.linspace(-1.3, 1.3, 21):
            k_out = k_out_vector(beam, DetectorDirection(phi=float(phi), phi_out=0.0))
            angles = atom_angles(k_out, triad)
            assert abs(angles.polar - math.pi / 2) < 1e-12

    def test_zero_vector_rejected(self, beam):
        with pytest.raises(ValueError):
            atom_angles(Vec3(0.0, 0.0, 0.0), atom_frame(beam))


class TestPolarizationBasis:
    def test_equatorial_pi_vector(self):
        from ionfringe import AtomFrameAngles

        eps_pi, eps_sigma = polarization_basis(
            AtomFrameAngles(polar=math.pi / 2, azimuth=0.0), IDENTITY_TRIAD
        )
        assert np.allclose(eps_pi.as_tuple(), (0.0, 0.0, 1.0), atol=1e-15)

    def test_polar_axis_case(self):
        from ionfringe import AtomFrameAngles

        az = 0.7
        eps_pi, _ = polarization_basis(AtomFrameAngles(polar=0.0, azimuth=az), IDENTITY_TRIAD)
        assert np.allclose(eps_pi.as_tuple(), (-math.cos(az), -math.sin(az), 0.0), atol=1e-15)

    def test_orthogonality_random(self, beam):
        from ionfringe import AtomFrameAngles

        triad = atom_frame(beam)
        x_hat, y_hat, z_hat = triad
        rng = np.random.default_rng(11)
        for _ in range(100):
            polar = float(rng.uniform(0.0, math.pi))
            az = float(rng.uniform(-math.pi, math.pi))
            angles = AtomFrameAngles(polar=polar, azimuth=az)
            eps_pi, eps_sigma = polarization_basis(angles, triad)
            k_hat = (
                math.sin(polar) * math.cos(az) * x_hat
                + math.sin(polar) * math.sin(az) * y_hat
                + math.cos(polar) * z_hat
            )
            assert abs(eps_pi.dot(eps_sigma)) < 1e-12
            assert abs(eps_pi.dot(k_hat)) < 1e-12
            assert abs(eps_sigma.dot(k_hat)) < 1e-12
            assert eps_pi.norm() == pytest.approx(1.0, abs=1e-12)
            assert eps_sigma.norm() == pytest.approx(1.0, abs=1e-12)


class TestInvariants:
    def test_momentum_transfer_identity(self, beam):
        # |q|^2 = 2 k^2 (1 - cos of the scattering angle)
        k_in = k_in_vector(beam)
        rng = np.random.default_rng(5)
        for _ in range(100):
            det = DetectorDirection(
                phi=float(rng.uniform(-1.4, 1.4)), phi_out=float(rng.uniform(-1.4, 1.4))
            )
            k_out = k_out_vector(beam, det)
            q = scattering_vector(k_in, k_out)
            expected = 2.0 * K * K * (1.0 - k_in.unit().dot(k_out.unit()))
            assert q.dot(q) == pytest.approx(expected, rel=1e-10, abs=1e-6)

    def test_fringe_phase_derivative(self, beam, spectrum):
        # d(q . d)/dphi at the forward direction equals k*d*sin(theta)
        d = spectrum.separation
        k_in = k_in_vector(beam)

        def phase(phi):
            k_out = k_out_vector(beam, DetectorDirection(phi=phi, phi_out=0.0))
            return scattering_vector(k_in, k_out).z * d

        h = 1e-6
        numeric = (phase(h) - phase(-h)) / (2.0 * h)
        analytic = K * d * math.sin(THETA)
        assert abs(numeric) == pytest.approx(analytic, rel=1e-8)
