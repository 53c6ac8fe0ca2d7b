"""Axial Larmor-frequency profiles Omega(z) and the reconstructed 3D field.

Profiles are immutable after construction and safe to evaluate concurrently.
Every kind supplies Omega(z), its z-derivative, and the exact antiderivative
used by the rotation part of the mode phase.  The full divergence-free field
is B = B_z(z) zhat - (rho/2) dB_z/dz rhohat with B_z = 2 m_e Omega / e.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy.interpolate import CubicSpline

from .constants import CODATA2018, PhysicalConstants
from .errors import OutOfDomainError


class FieldProfile:
    """Base class; concrete kinds are the dataclasses below."""

    #: (z_lo, z_hi) where the profile is defined; infinite for analytic kinds.
    domain = (-math.inf, math.inf)

    def omega(self, z):
        raise NotImplementedError

    def domega_dz(self, z):
        raise NotImplementedError

    def omega_antiderivative(self, z):
        """Exact antiderivative of Omega evaluated at z (arbitrary constant)."""
        raise NotImplementedError

    def omega_integral(self, z0: float, z1: float) -> float:
        """Exact integral of Omega(z) dz over [z0, z1]."""
        self._check_domain(z0)
        self._check_domain(z1)
        return self.omega_antiderivative(z1) - self.omega_antiderivative(z0)

    def omega_left(self, z: float) -> float:
        """Left limit of Omega at z; differs from omega(z) only where a
        Piecewise profile is discontinuous."""
        return self.omega(z)

    def breakpoints(self) -> tuple:
        """z values where smoothness degrades; integrators restart there."""
        return ()

    def omega_peak_abs(self, z_lo: float, z_hi: float) -> float:
        """max |Omega| over [z_lo, z_hi]; used for scale selection."""
        zs = np.linspace(z_lo, z_hi, 513)
        return float(np.max(np.abs(self.omega(zs))))

    def _check_domain(self, z):
        lo, hi = self.domain
        zmin = np.min(z)
        zmax = np.max(z)
        if zmin < lo or zmax > hi:
            raise OutOfDomainError(
                f"z range [{zmin!r}, {zmax!r}] outside profile domain [{lo!r}, {hi!r}]"
            )


@dataclass(frozen=True)
class Uniform(FieldProfile):
    omega0: float

    def omega(self, z):
        return np.full(np.shape(z), float(self.omega0)) if np.ndim(z) else float(self.omega0)

    def domega_dz(self, z):
        return np.zeros(np.shape(z)) if np.ndim(z) else 0.0

    def omega_antiderivative(self, z):
        return self.omega0 * np.asarray(z, dtype=float) if np.ndim(z) else self.omega0 * z

    def omega_peak_abs(self, z_lo, z_hi):
        return abs(self.omega0)


@dataclass(frozen=True)
class Free(FieldProfile):
    def omega(self, z):
        return np.zeros(np.shape(z)) if np.ndim(z) else 0.0

    def domega_dz(self, z):
        return np.zeros(np.shape(z)) if np.ndim(z) else 0.0

    def omega_antiderivative(self, z):
        return np.zeros(np.shape(z)) if np.ndim(z) else 0.0

    def omega_peak_abs(self, z_lo, z_hi):
        return 0.0


@dataclass(frozen=True)
class Glaser(FieldProfile):
    """Lorentzian lens field Omega0 / (1 + (z-c)^2/a^2)."""

    omega0: float
    a: float  # half-width, m
    c: float  # center, m

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError(f"Glaser half-width a must be positive, got {self.a!r}")

    def omega(self, z):
        x = (np.asarray(z, dtype=float) - self.c) / self.a
        out = self.omega0 / (1.0 + x * x)
        return out if np.ndim(z) else float(out)

    def domega_dz(self, z):
        x = (np.asarray(z, dtype=float) - self.c) / self.a
        out = -self.omega0 * 2.0 * x / (self.a * (1.0 + x * x) ** 2)
        return out if np.ndim(z) else float(out)

    def omega_antiderivative(self, z):
        x = (np.asarray(z, dtype=float) - self.c) / self.a
        out = self.omega0 * self.a * np.arctan(x)
        return out if np.ndim(z) else float(out)

    def omega_peak_abs(self, z_lo, z_hi):
        if z_lo <= self.c <= z_hi:
            return abs(self.omega0)
        return float(max(abs(self.omega(z_lo)), abs(self.omega(z_hi))))


def _ramp_fraction(z, z_i, z_f):
    """Clamp (z - z_i)/(z_f - z_i) to [0, 1]."""
    s = (np.asarray(z, dtype=float) - z_i) / (z_f - z_i)
    return np.clip(s, 0.0, 1.0)


@dataclass(frozen=True)
class LinearRamp(FieldProfile):
    """Omega_i for z <= z_i, linear transition, Omega_f for z >= z_f."""

    z_i: float
    z_f: float
    omega_i: float
    omega_f: float

    def __post_init__(self):
        if not self.z_i < self.z_f:
            raise ValueError(f"LinearRamp requires z_i < z_f, got {self.z_i!r} >= {self.z_f!r}")

    def omega(self, z):
        s = _ramp_fraction(z, self.z_i, self.z_f)
        out = self.omega_i + (self.omega_f - self.omega_i) * s
        return out if np.ndim(z) else float(out)

    def domega_dz(self, z):
        # at z_i and z_f the one-sided derivative from the right is returned
        zz = np.asarray(z, dtype=float)
        slope = (self.omega_f - self.omega_i) / (self.z_f - self.z_i)
        out = np.where((zz >= self.z_i) & (zz < self.z_f), slope, 0.0)
        return out if np.ndim(z) else float(out)

    def omega_antiderivative(self, z):
        zz = np.asarray(z, dtype=float)
        slope = (self.omega_f - self.omega_i) / (self.z_f - self.z_i)
        ramp = self.omega_i * (zz - self.z_i) + 0.5 * slope * np.minimum(zz - self.z_i, self.z_f - self.z_i) ** 2
        out = np.where(
            zz <= self.z_i,
            self.omega_i * (zz - self.z_i),
            np.where(zz >= self.z_f,
                     self.omega_i * (self.z_f - self.z_i)
                     + 0.5 * slope * (self.z_f - self.z_i) ** 2
                     + self.omega_f * (zz - self.z_f),
                     ramp),
        )
        return out if np.ndim(z) else float(out)

    def breakpoints(self):
        return (self.z_i, self.z_f)

    def omega_peak_abs(self, z_lo, z_hi):
        return float(max(abs(self.omega(z_lo)), abs(self.omega(z_hi))))


@dataclass(frozen=True)
class SmoothRamp(FieldProfile):
    """C^1 cubic smoothstep ramp 3 s^2 - 2 s^3 between omega_i and omega_f.

    The first derivative vanishes at both ends, so the lensing right-hand
    side stays continuous through the transition.
    """

    z_i: float
    z_f: float
    omega_i: float
    omega_f: float

    def __post_init__(self):
        if not self.z_i < self.z_f:
            raise ValueError(f"SmoothRamp requires z_i < z_f, got {self.z_i!r} >= {self.z_f!r}")

    def omega(self, z):
        s = _ramp_fraction(z, self.z_i, self.z_f)
        out = self.omega_i + (self.omega_f - self.omega_i) * s * s * (3.0 - 2.0 * s)
        return out if np.ndim(z) else float(out)

    def domega_dz(self, z):
        zz = np.asarray(z, dtype=float)
        length = self.z_f - self.z_i
        s = _ramp_fraction(z, self.z_i, self.z_f)
        inside = (zz > self.z_i) & (zz < self.z_f)
        out = np.where(inside, (self.omega_f - self.omega_i) * 6.0 * s * (1.0 - s) / length, 0.0)
        return out if np.ndim(z) else float(out)

    def omega_antiderivative(self, z):
        zz = np.asarray(z, dtype=float)
        length = self.z_f - self.z_i
        s = _ramp_fraction(z, self.z_i, self.z_f)
        # integral of 3s^2-2s^3 ds = s^3 - s^4/2
        ramp_part = (self.omega_f - self.omega_i) * length * (s**3 - 0.5 * s**4)
        base = self.omega_i * (zz - self.z_i)
        tail = np.where(zz > self.z_f, self.omega_f * (zz - self.z_f) - self.omega_i * (zz - self.z_f), 0.0)
        out = base + ramp_part + tail
        return out if np.ndim(z) else float(out)

    def breakpoints(self):
        return (self.z_i, self.z_f)

    def omega_peak_abs(self, z_lo, z_hi):
        return float(max(abs(self.omega(z_lo)), abs(self.omega(z_hi))))


@dataclass(frozen=True)
class Piecewise(FieldProfile):
    """Contiguous intervals, each with its own profile.

    The only kind allowed to be discontinuous, and only at the declared
    interval boundaries (models the abrupt-step limit of a ramp).  At a
    boundary, evaluation and derivative come from the right interval.
    """

    pieces: tuple  # ((z_start, z_stop, FieldProfile), ...)

    def __post_init__(self):
        pieces = tuple((float(a), float(b), p) for (a, b, p) in self.pieces)
        object.__setattr__(self, "pieces", pieces)
        if not pieces:
            raise ValueError("Piecewise requires at least one piece")
        for (a, b, _p) in pieces:
            if not a < b:
                raise ValueError(f"piece interval [{a!r}, {b!r}] is empty")
        for (_, b_prev, _), (a_next, _, _) in zip(pieces, pieces[1:]):
            if b_prev != a_next:
                raise ValueError("Piecewise intervals must be contiguous and ascending")

    @property
    def domain(self):
        return (self.pieces[0][0], self.pieces[-1][1])

    def _piece_at(self, z):
        for (a, b, p) in self.pieces[:-1]:
            if a <= z < b:
                return p
        a, b, p = self.pieces[-1]
        if a <= z <= b:
            return p
        raise OutOfDomainError(f"z = {z!r} outside Piecewise domain {self.domain!r}")

    def _map(self, z, method):
        if np.ndim(z) == 0:
            return float(getattr(self._piece_at(float(z)), method)(float(z)))
        zz = np.asarray(z, dtype=float)
        out = np.empty_like(zz)
        flat = zz.ravel()
        res = out.ravel()
        for i, zi in enumerate(flat):
            res[i] = getattr(self._piece_at(float(zi)), method)(float(zi))
        return out

    def omega(self, z):
        return self._map(z, "omega")

    def omega_left(self, z):
        zf = float(z)
        for (a, b, p) in self.pieces:
            if a < zf <= b:
                return p.omega(zf)
        return self.omega(zf)

    def domega_dz(self, z):
        return self._map(z, "domega_dz")

    def omega_integral(self, z0, z1):
        self._check_domain(z0)
        self._check_domain(z1)
        if z1 < z0:
            return -self.omega_integral(z1, z0)
        total = 0.0
        for (a, b, p) in self.pieces:
            lo = max(a, z0)
            hi = min(b, z1)
            if hi > lo:
                total += p.omega_integral(lo, hi)
        return total

    def omega_antiderivative(self, z):
        return self.omega_integral(self.pieces[0][0], z)

    def breakpoints(self):
        inner = tuple(a for (a, _b, _p) in self.pieces[1:])
        nested = tuple(bp for (_a, _b, p) in self.pieces for bp in p.breakpoints())
        return tuple(sorted(set(inner + nested)))

    def omega_peak_abs(self, z_lo, z_hi):
        peaks = []
        for (a, b, p) in self.pieces:
            lo, hi = max(a, z_lo), min(b, z_hi)
            if hi >= lo:
                peaks.append(p.omega_peak_abs(lo, hi))
        return max(peaks) if peaks else 0.0


@dataclass(frozen=True, eq=False)
class Tabulated(FieldProfile):
    """Natural cubic spline through sampled (z, Omega) data.

    C^2 interpolation keeps the lensing right-hand side smooth.  Requests
    outside the sample range raise OutOfDomainError rather than
    extrapolating.
    """

    z_samples: np.ndarray
    omega_samples: np.ndarray
    _spline: CubicSpline = dataclass_field(init=False, repr=False)
    _dspline: CubicSpline = dataclass_field(init=False, repr=False)
    _antiderivative: CubicSpline = dataclass_field(init=False, repr=False)

    def __post_init__(self):
        z = np.asarray(self.z_samples, dtype=float)
        om = np.asarray(self.omega_samples, dtype=float)
        if z.ndim != 1 or om.shape != z.shape:
            raise ValueError("z_samples and omega_samples must be equal-length 1D arrays")
        if z.size < 4:
            raise ValueError(f"Tabulated needs at least 4 samples, got {z.size}")
        if not np.all(np.diff(z) > 0):
            raise ValueError("z_samples must be strictly increasing")
        z.setflags(write=False)
        om.setflags(write=False)
        object.__setattr__(self, "z_samples", z)
        object.__setattr__(self, "omega_samples", om)
        spline = CubicSpline(z, om, bc_type="natural")
        object.__setattr__(self, "_spline", spline)
        object.__setattr__(self, "_dspline", spline.derivative())
        object.__setattr__(self, "_antiderivative", spline.antiderivative())

    @property
    def domain(self):
        return (float(self.z_samples[0]), float(self.z_samples[-1]))

    def omega(self, z):
        self._check_domain(z)
        out = self._spline(z)
        return out if np.ndim(z) else float(out)

    def domega_dz(self, z):
        self._check_domain(z)
        out = self._dspline(z)
        return out if np.ndim(z) else float(out)

    def omega_antiderivative(self, z):
        self._check_domain(z)
        out = self._antiderivative(z)
        return out if np.ndim(z) else float(out)

    def omega_peak_abs(self, z_lo, z_hi):
        zs = np.linspace(max(z_lo, self.domain[0]), min(z_hi, self.domain[1]), 4 * self.z_samples.size)
        return float(np.max(np.abs(self._spline(zs))))

    @classmethod
    def from_csv(cls, path) -> "Tabulated":
        """Load a two-column CSV with header ``z_m,omega_rad_per_s``."""
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["z_m", "omega_rad_per_s"]:
                raise ValueError(
                    f"expected CSV header 'z_m,omega_rad_per_s', got {header!r} in {path}"
                )
            rows = [(float(r[0]), float(r[1])) for r in reader if r]
        if not rows:
            raise ValueError(f"no data rows in {path}")
        z, om = zip(*rows)
        return cls(np.asarray(z), np.asarray(om))


def omega_at(profile: FieldProfile, z):
    """Omega(z) in rad/s; OutOfDomainError outside the profile domain."""
    profile._check_domain(z)
    return profile.omega(z)


def domega_dz(profile: FieldProfile, z):
    """dOmega/dz in rad/(s m); one-sided from the right at breakpoints."""
    profile._check_domain(z)
    return profile.domega_dz(z)


def omega_integral(profile: FieldProfile, z0: float, z1: float) -> float:
    """Integral of Omega over [z0, z1] (exact per profile kind)."""
    return profile.omega_integral(z0, z1)


def field_vector(profile: FieldProfile, rho, z, constants: PhysicalConstants = CODATA2018):
    """(B_rho, B_z) in tesla of the divergence-free reconstruction at (rho, z).

    B_z = 2 m_e Omega / e and B_rho = -(rho/2) dB_z/dz, which makes the
    divergence vanish identically for the closed-form kinds.
    """
    if np.any(np.asarray(rho) < 0):
        raise ValueError("rho must be nonnegative")
    scale = 2.0 * constants.electron_mass / constants.elementary_charge
    b_z = scale * omega_at(profile, z)
    b_rho = -0.5 * np.asarray(rho) * scale * domega_dz(profile, z)
    if np.ndim(rho) == 0 and np.ndim(z) == 0:
        return float(b_rho), float(b_z)
    return b_rho, b_z
