"""Physical constants, electron-beam kinematics, and internal unit scaling.

All public APIs across the package accept and return SI quantities.
Internally, length-like quantities are rescaled (see ScaledUnits) so that
no intermediate ever multiplies raw values like hbar ~ 1e-34 against each
other; the acceptance tolerances (1e-8..1e-12 relative) are then reachable
in ordinary double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants in SI units (CODATA-2018 defaults).

    Override only by constructing a new instance; there is no ambient
    global that can be mutated.
    """

    hbar: float = 1.054571817e-34          # J s
    electron_mass: float = 9.1093837015e-31  # kg
    elementary_charge: float = 1.602176634e-19  # C
    speed_of_light: float = 299792458.0    # m/s

    def __post_init__(self):
        for name in ("hbar", "electron_mass", "elementary_charge", "speed_of_light"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be strictly positive and finite, got {value!r}")


CODATA2018 = PhysicalConstants()


def larmor_from_B(b_tesla: float, constants: PhysicalConstants = CODATA2018) -> float:
    """Larmor (half-cyclotron) frequency e*B/(2 m_e) in rad/s.

    Total function: the sign of the result follows the sign of B.
    """
    return constants.elementary_charge * b_tesla / (2.0 * constants.electron_mass)


def landau_width(omega: float, constants: PhysicalConstants = CODATA2018) -> float:
    """Width sqrt(2*hbar/(m_e*|omega|)) of the stationary (Landau) envelope.

    Raises DomainError for omega = 0: in free space no finite width is
    stationary, the beam always diffracts.
    """
    if omega == 0:
        raise DomainError("landau_width is undefined for omega = 0 (free space always diffracts)")
    return math.sqrt(2.0 * constants.hbar / (constants.electron_mass * abs(omega)))


@dataclass(frozen=True)
class BeamParams:
    """Axial kinematics of the electron beam.

    The axial speed is tied to the wavenumber by v = hbar*k/m_e; use the
    classmethod constructors so the pair is built consistently.
    """

    wavenumber_k: float     # 1/m
    axial_speed_v: float    # m/s
    constants: PhysicalConstants = CODATA2018

    def __post_init__(self):
        if not (self.wavenumber_k > 0 and math.isfinite(self.wavenumber_k)):
            raise ValueError(f"wavenumber_k must be positive and finite, got {self.wavenumber_k!r}")
        v_expected = self.constants.hbar * self.wavenumber_k / self.constants.electron_mass
        if not math.isclose(self.axial_speed_v, v_expected, rel_tol=1e-12):
            raise ValueError(
                "axial_speed_v inconsistent with wavenumber_k: "
                f"expected {v_expected!r}, got {self.axial_speed_v!r}"
            )

    @classmethod
    def from_wavenumber(cls, k: float, constants: PhysicalConstants = CODATA2018) -> "BeamParams":
        return cls(k, constants.hbar * k / constants.electron_mass, constants)

    @classmethod
    def from_speed(cls, v: float, constants: PhysicalConstants = CODATA2018) -> "BeamParams":
        k = constants.electron_mass * v / constants.hbar
        return cls(k, constants.hbar * k / constants.electron_mass, constants)

    @classmethod
    def from_speed_fraction(cls, fraction_of_c: float,
                            constants: PhysicalConstants = CODATA2018) -> "BeamParams":
        return cls.from_speed(fraction_of_c * constants.speed_of_light, constants)

    @classmethod
    def from_kinetic_energy_ev(cls, energy_ev: float,
                               constants: PhysicalConstants = CODATA2018) -> "BeamParams":
        """Non-relativistic kinematics: v = sqrt(2 E / m_e)."""
        energy_j = energy_ev * constants.elementary_charge
        if energy_j <= 0:
            raise ValueError(f"kinetic energy must be positive, got {energy_ev!r} eV")
        return cls.from_speed(math.sqrt(2.0 * energy_j / constants.electron_mass), constants)

    def rayleigh_length(self, w0: float) -> float:
        """z_R = k*w0^2/2 for an initial width w0 > 0."""
        if w0 <= 0:
            raise ValueError(f"w0 must be positive, got {w0!r}")
        return 0.5 * self.wavenumber_k * w0 * w0


@dataclass(frozen=True)
class ScaledUnits:
    """Per-scenario nondimensionalization.

    Lengths (rho, z, w) divide by ``length_scale``; frequencies divide by
    the derived scale v/length_scale, so a scaled Larmor frequency is the
    rotation angle per scaled unit of z.  Round trips are exact to a few
    ulp because only one multiply and one divide are involved.
    """

    length_scale: float   # m
    speed: float          # m/s

    def __post_init__(self):
        if not (self.length_scale > 0 and math.isfinite(self.length_scale)):
            raise ValueError(f"length_scale must be positive and finite, got {self.length_scale!r}")
        if not (self.speed != 0 and math.isfinite(self.speed)):
            raise ValueError(f"speed must be nonzero and finite, got {self.speed!r}")

    @property
    def inverse_length_scale(self) -> float:
        return 1.0 / self.length_scale

    @property
    def frequency_scale(self) -> float:
        return self.speed / self.length_scale

    def length_to_scaled(self, x):
        return x / self.length_scale

    def length_from_scaled(self, x):
        return x * self.length_scale

    def omega_to_scaled(self, omega):
        return omega * self.length_scale / self.speed

    def omega_from_scaled(self, omega_scaled):
        return omega_scaled * self.speed / self.length_scale
