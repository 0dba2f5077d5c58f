"""Directions, frames, and angles for the two-ion scattering geometry.

Trap frame: the two ions sit on the Z axis, the incoming beam lies in the
X-Z plane at angle ``theta_in`` from Z.  Detector directions are given by an
in-plane deviation ``phi`` from the beam and an out-of-plane deviation
``phi_out`` toward +Y.  The atom frame has its z axis along the incident
polarization and its x axis along the beam; the polar/azimuth angles of an
outgoing direction in that frame control the dipole emission pattern.

Sign convention: positive ``phi`` rotates the outgoing direction toward +Z,
i.e. at ``phi_out = 0`` the polar angle of k_out from Z is ``theta_in - phi``
(see PHI_TOWARD_Z_AXIS).  Only the orientation of the fringe image depends
on this choice.

All angles are radians; everything here is pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Convention flag: k_out at phi_out=0 has polar angle (theta_in - phi) from +Z.
# Flipping the fringe image left/right would correspond to (theta_in + phi).
PHI_TOWARD_Z_AXIS = True

_UNIT_TOL = 1e-12
_PERP_TOL = 1e-10
_ELASTIC_TOL = 1e-9


@dataclass(frozen=True)
class Vec3:
    """Cartesian 3-vector. Used for wavevectors, polarizations, and q."""

    x: float
    y: float
    z: float

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def unit(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


X_HAT = Vec3(1.0, 0.0, 0.0)
Y_HAT = Vec3(0.0, 1.0, 0.0)
Z_HAT = Vec3(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class BeamGeometry:
    """Incoming beam: angle from the trap Z axis, wavelength, polarization.

    ``eps_in`` must be a unit vector perpendicular to the beam direction.
    """

    theta_in: float          # rad, 0 < theta_in < pi
    wavelength: float        # m
    eps_in: Vec3

    def __post_init__(self):
        if not 0.0 < self.theta_in < math.pi:
            raise ValueError(f"theta_in must be in (0, pi), got {self.theta_in}")
        if self.wavelength <= 0.0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        if abs(self.eps_in.norm() - 1.0) > _UNIT_TOL * 10:
            raise ValueError("eps_in must be a unit vector")
        if abs(self.eps_in.dot(k_in_direction(self.theta_in))) > _PERP_TOL:
            raise ValueError("eps_in must be perpendicular to the beam direction")

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength


@dataclass(frozen=True)
class DetectorDirection:
    """Outgoing direction: in-plane deviation ``phi`` from the beam and
    out-of-plane deviation ``phi_out`` toward +Y, both in radians."""

    phi: float
    phi_out: float

    def __post_init__(self):
        if abs(self.phi) >= math.pi / 2 or abs(self.phi_out) >= math.pi / 2:
            raise ValueError(
                f"detector angles must satisfy |phi|, |phi_out| < pi/2, "
                f"got phi={self.phi}, phi_out={self.phi_out}"
            )


@dataclass(frozen=True)
class AtomFrameAngles:
    """Spherical angles of the outgoing direction in the atom frame
    (polar angle measured from the incident-polarization axis)."""

    polar: float
    azimuth: float

    def __post_init__(self):
        if not 0.0 <= self.polar <= math.pi:
            raise ValueError(f"polar angle must be in [0, pi], got {self.polar}")


def k_in_direction(theta_in: float) -> Vec3:
    """Unit propagation vector of the incoming beam (in the X-Z plane)."""
    return Vec3(math.sin(theta_in), 0.0, math.cos(theta_in))


def k_in_vector(beam: BeamGeometry) -> Vec3:
    """Incoming wavevector, magnitude 2*pi/wavelength."""
    return beam.wavenumber * k_in_direction(beam.theta_in)


def k_out_vector(beam: BeamGeometry, det: DetectorDirection) -> Vec3:
    """Outgoing wavevector for a detector pixel.

    Elastic: |k_out| = |k_in|.  The in-plane part is the beam direction
    rotated by ``phi`` within the X-Z plane (toward +Z, see module note),
    then tilted out of plane by ``phi_out`` toward +Y.
    """
    sign = 1.0 if PHI_TOWARD_Z_AXIS else -1.0
    polar = beam.theta_in - sign * det.phi
    in_plane = Vec3(math.sin(polar), 0.0, math.cos(polar))
    tilted = math.cos(det.phi_out) * in_plane + math.sin(det.phi_out) * Y_HAT
    return beam.wavenumber * tilted.unit()


def scattering_vector(k_in: Vec3, k_out: Vec3) -> Vec3:
    """q = k_out - k_in.  Requires elastic magnitudes (|k_out| = |k_in|)."""
    n_in, n_out = k_in.norm(), k_out.norm()
    if abs(n_out - n_in) > _ELASTIC_TOL * n_in:
        raise ValueError(
            f"|k_out| = {n_out:.6e} differs from |k_in| = {n_in:.6e}: "
            "elastic-scattering assumption violated"
        )
    return k_out - k_in


def atom_frame(beam: BeamGeometry) -> tuple[Vec3, Vec3, Vec3]:
    """Right-handed orthonormal triad (x, y, z) of the atom frame in trap
    coordinates: z along eps_in, x along the beam, y = z x x."""
    z_hat = beam.eps_in.unit()
    x_hat = k_in_direction(beam.theta_in)
    if abs(z_hat.dot(x_hat)) > _PERP_TOL:
        raise ValueError("eps_in is not perpendicular to the beam direction")
    y_hat = z_hat.cross(x_hat)
    return (x_hat, y_hat.unit(), z_hat)


def atom_angles(k_out: Vec3, triad: tuple[Vec3, Vec3, Vec3]) -> AtomFrameAngles:
    """Polar/azimuth angles of k_out in the atom frame."""
    if k_out.norm() == 0.0:
        raise ValueError("k_out must be nonzero")
    x_hat, y_hat, z_hat = triad
    k_hat = k_out.unit()
    cos_polar = min(1.0, max(-1.0, k_hat.dot(z_hat)))
    polar = math.acos(cos_polar)
    azimuth = math.atan2(k_hat.dot(y_hat), k_hat.dot(x_hat))
    return AtomFrameAngles(polar=polar, azimuth=azimuth)


def polarization_basis(
    angles: AtomFrameAngles, triad: tuple[Vec3, Vec3, Vec3]
) -> tuple[Vec3, Vec3]:
    """The two orthogonal unit polarization vectors transverse to k_out.

    The first lies in the plane containing the polarization axis and k_out
    (the fringe-carrying channel for this transition); the second is
    perpendicular to that plane.  Returned in trap-frame components.
    """
    ct, st = math.cos(angles.polar), math.sin(angles.polar)
    ca, sa = math.cos(angles.azimuth), math.sin(angles.azimuth)
    eps_pi_atom = (-ct * ca, -ct * sa, st)
    eps_sigma_atom = (-sa, ca, 0.0)
    x_hat, y_hat, z_hat = triad

    def to_trap(v):
        return v[0] * x_hat + v[1] * y_hat + v[2] * z_hat

    return (to_trap(eps_pi_atom), to_trap(eps_sigma_atom))
