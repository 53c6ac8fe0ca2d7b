"""Exact mode wavefunctions chi_{n,l}(rho, phi, z) and their phases.

A mode is fixed by its quantum numbers (n, l), an envelope solution w(z),
and the beam kinematics:

    chi = (N/w) (rho/w)^|l| L_n^|l|(2 rho^2/w^2)
          exp(-rho^2/w^2 + i k rho^2 wdot/(2w)) exp(i l phi - i theta(z)),

with N = sqrt(2^(|l|+1)/pi * n!/(n+|l|)!).  The accumulated phase theta has
a Gouy-like part proportional to 2n+|l|+1 (even under l -> -l and
Omega -> -Omega) and a rotation part proportional to l (odd under either
flip); only phase *differences* against a reference beam are observable.

Note on N: the exponent must be |l|+1 for unit norm; writing it as |l+1|
breaks normalization for every l <= -1 (checked by the quadrature tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import BeamParams
from .errors import GridMismatchError
from .fields import FieldProfile, omega_integral
from .lensing import EnvelopeSolution


@dataclass(frozen=True)
class QuantumNumbers:
    """Radial index n >= 0 and vorticity l (any integer).

    The conserved-operator eigenvalues are hbar*l for the total angular
    momentum and hbar*(2n+|l|+1) for the radial invariant.
    """

    n: int
    l: int

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 0):
            raise ValueError(f"n must be a nonnegative integer, got {self.n!r}")
        if not isinstance(self.l, int):
            raise ValueError(f"l must be an integer, got {self.l!r}")

    @property
    def radial_eigenvalue(self) -> int:
        """Eigenvalue of the conserved radial invariant, in units of hbar."""
        return 2 * self.n + abs(self.l) + 1


def assoc_laguerre(n: int, alpha: int, x):
    """Associated Laguerre polynomial L_n^alpha(x) by the three-term
    recurrence in n (stable upward for the integer orders used here)."""
    if not (isinstance(n, (int, np.integer)) and n >= 0):
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    if not (isinstance(alpha, (int, np.integer)) and alpha >= 0):
        raise ValueError(f"alpha must be a nonnegative integer, got {alpha!r}")
    xx = np.asarray(x, dtype=float)
    prev = np.ones_like(xx)
    if n == 0:
        return prev if np.ndim(x) else float(prev)
    curr = 1.0 + alpha - xx
    for kk in range(1, n):
        prev, curr = curr, ((2 * kk + 1 + alpha - xx) * curr - (kk + alpha) * prev) / (kk + 1)
    return curr if np.ndim(x) else float(curr)


def normalization(qn: QuantumNumbers) -> float:
    """N = sqrt(2^(|l|+1)/pi * n!/(n+|l|)!), making the mode unit-norm."""
    n, la = qn.n, abs(qn.l)
    log_ratio = math.lgamma(n + 1) - math.lgamma(n + la + 1)
    return math.sqrt(2.0 ** (la + 1) / math.pi) * math.exp(0.5 * log_ratio)


@dataclass(frozen=True)
class PhaseParts:
    """The two accumulated phase terms (radians) and their sum."""

    gouy_part: float
    rotation_part: float

    @property
    def total(self) -> float:
        return self.gouy_part + self.rotation_part


@dataclass(frozen=True)
class ModeSpec:
    """A single (n, l) mode riding a given envelope.

    ``z_ref`` is the z where the accumulated phase is defined to vanish;
    it shifts chi by a global phase only, so every observable quantity
    (moduli, interference patterns, decomposition weights) is independent
    of it.
    """

    qn: QuantumNumbers
    envelope: EnvelopeSolution
    beam: BeamParams
    field: FieldProfile
    z_ref: float = None

    def __post_init__(self):
        if self.z_ref is None:
            object.__setattr__(self, "z_ref", self.envelope.init.z0)

    def phase(self, z: float) -> PhaseParts:
        qn = self.qn
        k = self.beam.wavenumber_k
        v = self.beam.axial_speed_v
        gouy = qn.radial_eigenvalue * (2.0 / k) * self.envelope.inverse_w2_integral(self.z_ref, z)
        rotation = qn.l * omega_integral(self.field, self.z_ref, z) / v
        return PhaseParts(gouy_part=gouy, rotation_part=rotation)

    def evaluate(self, rho, phi, z: float):
        """Complex amplitude chi(rho, phi, z); broadcasts over rho/phi."""
        w = self.envelope.width(z)
        wd = self.envelope.width_deriv(z)
        theta = self.phase(z).total
        return _mode_field(self.qn, self.beam, w, wd, theta, rho, phi)

    def radial_profile(self, rho, z: float):
        """chi at phi = 0 (complete radial information for a single l)."""
        return self.evaluate(rho, 0.0, z)


def _mode_field(qn, beam, w, wd, theta, rho, phi):
    rr = np.asarray(rho, dtype=float)
    pp = np.asarray(phi, dtype=float)
    la = abs(qn.l)
    norm = normalization(qn)
    xi = 2.0 * rr**2 / w**2
    radial = (norm / w) * (rr / w) ** la * assoc_laguerre(qn.n, la, xi) * np.exp(-(rr**2) / w**2)
    curvature = beam.wavenumber_k * wd / (2.0 * w)
    out = radial * np.exp(1j * (curvature * rr**2 + qn.l * pp - theta))
    return out if (np.ndim(rho) or np.ndim(phi)) else complex(out)


def _mode_field_dz(mode: ModeSpec, rho, phi, z: float):
    """Analytic d(chi)/dz, used to check the effective wave equation.

    Needs wddot, which comes algebraically from the lensing equation, and
    d(theta)/dz = (2n+|l|+1)(2/k)/w^2 + l Omega/v.
    """
    qn = mode.qn
    beam = mode.beam
    env = mode.envelope
    w = env.width(z)
    wd = env.width_deriv(z)
    wdd = env.width_second_deriv(z)
    k = beam.wavenumber_k
    v = beam.axial_speed_v
    la = abs(qn.l)
    rr = np.asarray(rho, dtype=float)
    pp = np.asarray(phi, dtype=float)
    theta = mode.phase(z).total
    theta_dot = qn.radial_eigenvalue * (2.0 / k) / w**2 + qn.l * mode.field.omega(z) / v

    xi = 2.0 * rr**2 / w**2
    xi_dot = -2.0 * xi * wd / w
    lag = assoc_laguerre(qn.n, la, xi)
    dlag = -assoc_laguerre(qn.n - 1, la + 1, xi) if qn.n >= 1 else np.zeros_like(xi)
    curvature_dot = (k / 2.0) * (wdd / w - (wd / w) ** 2)
    # chain rule on log chi, with the Laguerre factor kept explicit
    a_z = (-(1 + la) * wd / w
           + 2.0 * rr**2 * wd / w**3
           + 1j * (curvature_dot * rr**2 - theta_dot))
    norm = normalization(qn)
    envelope_part = (norm / w) * (rr / w) ** la * np.exp(-(rr**2) / w**2)
    phase_part = np.exp(1j * (k * wd / (2.0 * w) * rr**2 + qn.l * pp - theta))
    return envelope_part * phase_part * (a_z * lag + dlag * xi_dot)


@dataclass(frozen=True)
class Superposition:
    """Coherent superposition of modes sharing one envelope and field."""

    components: tuple  # ((complex coefficient, ModeSpec), ...)

    def __post_init__(self):
        comps = tuple((complex(c), m) for (c, m) in self.components)
        if not comps:
            raise ValueError("superposition needs at least one component")
        env = comps[0][1].envelope
        for _c, m in comps:
            if m.envelope is not env:
                raise ValueError("all components must share one envelope")
        object.__setattr__(self, "components", comps)

    @classmethod
    def normalized(cls, components) -> "Superposition":
        comps = [(complex(c), m) for (c, m) in components]
        total = math.fsum(abs(c) ** 2 for c, _m in comps)
        if total <= 0:
            raise ValueError("superposition coefficients are all zero")
        root = math.sqrt(total)
        return cls(tuple((c / root, m) for c, m in comps))

    @property
    def norm_sq(self) -> float:
        return math.fsum(abs(c) ** 2 for c, _m in self.components)

    def evaluate(self, rho, phi, z: float):
        total = None
        for c, m in self.components:
            term = c * m.evaluate(rho, phi, z)
            total = term if total is None else total + term
        return total

    def l_values(self) -> tuple:
        return tuple(sorted({m.qn.l for _c, m in self.components}))


def phase_theta(mode: ModeSpec, z: float) -> PhaseParts:
    """Accumulated phase theta(z) split into its two parts."""
    return mode.phase(z)


def evaluate_mode(mode: ModeSpec, rho, phi, z: float):
    """Complex mode amplitude (units 1/m) at (rho, phi, z)."""
    return mode.evaluate(rho, phi, z)


def norm_integral(state, z: float, n_radial: int = 240, n_phi: int = 64) -> float:
    """Total probability of a ModeSpec or Superposition at fixed z.

    Gauss-Legendre in rho (machine-accurate for these smooth Gaussian-decay
    integrands) and a periodic trapezoid in phi (exact for the finite
    azimuthal bandwidth of a superposition).
    """
    if isinstance(state, Superposition):
        envelope = state.components[0][1].envelope
        eig_max = max(m.qn.radial_eigenvalue for _c, m in state.components)
    else:
        envelope = state.envelope
        eig_max = state.qn.radial_eigenvalue
    w = envelope.width(z)
    cutoff = w * (6.0 + 2.0 * math.sqrt(eig_max))
    nodes, weights = np.polynomial.legendre.leggauss(n_radial)
    rho = 0.5 * cutoff * (nodes + 1.0)
    wts = 0.5 * cutoff * weights
    phi = np.arange(n_phi) * (2.0 * math.pi / n_phi)
    vals = state.evaluate(rho[:, None], phi[None, :], z)
    ring = 2.0 * math.pi * np.mean(np.abs(vals) ** 2, axis=1)
    return float(np.sum(ring * rho * wts))


def interference_term(state, reference, rho, phi, z: float):
    """Gauge-independent interference field chi * conj(chi_ref) on a grid.

    ``state`` may be a ModeSpec or Superposition.  Both factors are
    evaluated on the same (rho, phi) arrays, which must have equal shapes.
    """
    rr = np.asarray(rho, dtype=float)
    pp = np.asarray(phi, dtype=float)
    if rr.shape != pp.shape:
        raise GridMismatchError(f"rho grid {rr.shape} and phi grid {pp.shape} differ")
    return state.evaluate(rr, pp, z) * np.conj(reference.evaluate(rr, pp, z))
