"""Landau-basis decomposition after a field transition, and the ramp experiment.

A beam prepared as a stationary (Landau) mode of the upstream field is no
longer stationary downstream of a field change unless the change is
adiabatic (|v dOmega/dz| << Omega^2).  Post-transition, the state spreads
over the Landau modes of the final field with fixed vorticity l; the
weights |c_n|^2 are independent of where they are probed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .constants import CODATA2018, BeamParams, landau_width
from .errors import BasisTooSmallError, DomainError
from .fields import FieldProfile, Piecewise, SmoothRamp, Uniform
from .lensing import EnvelopeInit, EnvelopeSolution, solve_envelope
from .modes import ModeSpec, QuantumNumbers, Superposition, normalization


@dataclass(frozen=True)
class RampScenario:
    """A field constant at Omega_i before z_i, varying on [z_i, z_f], and
    constant at Omega_f after, entered by a pure Landau mode of Omega_i."""

    field: FieldProfile
    qn: QuantumNumbers
    beam: BeamParams
    z_i: float
    z_f: float
    omega_i: float
    omega_f: float

    def __post_init__(self):
        if self.omega_i == 0 or self.omega_f == 0:
            raise ValueError("ramp endpoints need nonzero Larmor frequency")
        if not self.z_i <= self.z_f:
            raise ValueError(f"need z_i <= z_f, got {self.z_i!r} > {self.z_f!r}")

    @property
    def initial_width(self) -> float:
        return landau_width(self.omega_i, self.beam.constants)

    @property
    def final_landau_width(self) -> float:
        return landau_width(self.omega_f, self.beam.constants)


@dataclass(frozen=True)
class ModeSpectrum:
    """Projection of an l-pure state onto the Landau basis of omega_f."""

    l: int
    coefficients: np.ndarray  # complex, index n' = 0..n_max
    residual: float           # 1 - sum |c|^2

    @property
    def abs_sq(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.abs_sq))


def _landau_radial_basis(l: int, w_f: float, rho: np.ndarray, n_max: int) -> np.ndarray:
    """Rows n' = 0..n_max of the real Landau radial functions at width w_f."""
    la = abs(l)
    x = 2.0 * rho**2 / w_f**2
    base = (rho / w_f) ** la * np.exp(-(rho**2) / w_f**2) / w_f
    rows = np.empty((n_max + 1, rho.size))
    prev = np.ones_like(x)
    rows[0] = prev
    if n_max >= 1:
        curr = 1.0 + la - x
        rows[1] = curr
        for kk in range(1, n_max):
            prev, curr = curr, ((2 * kk + 1 + la - x) * curr - (kk + la) * prev) / (kk + 1)
            rows[kk + 1] = curr
    norms = np.array([normalization(QuantumNumbers(nn, l)) for nn in range(n_max + 1)])
    return norms[:, None] * rows * base[None, :]


def decompose_into_landau(state, z_probe: float, omega_f: float, beam: BeamParams,
                          n_max: int = 32, max_residual: float = 1e-6) -> ModeSpectrum:
    """Coefficients c_n' = <Landau_{n',l}(omega_f) | state(z_probe)>.

    The azimuthal integral is done analytically (it forces l' = l), leaving
    radial Gauss-Legendre quadrature against the probed state, curvature
    phase included.  Raises BasisTooSmallError if more than
    ``max_residual`` of the norm is left outside the basis.
    """
    if omega_f == 0:
        raise DomainError("decomposition basis undefined for omega_f = 0")
    if isinstance(state, Superposition):
        ls = state.l_values()
        if len(ls) != 1:
            raise ValueError(f"state mixes l values {ls}; decompose each l separately")
        l = ls[0]
    else:
        l = state.qn.l
    w_f = landau_width(omega_f, beam.constants)
    w_probe = math.sqrt(2.0 * _state_rho2(state, z_probe, beam))
    cutoff = (math.sqrt(2.0 * n_max + abs(l) + 1.0) + 8.0) * max(w_f, w_probe)
    nodes, weights = np.polynomial.legendre.leggauss(1600)
    rho = 0.5 * cutoff * (nodes + 1.0)
    wts = 0.5 * cutoff * weights
    basis = _landau_radial_basis(l, w_f, rho, n_max)
    probed = state.evaluate(rho, 0.0, z_probe)
    coeffs = 2.0 * math.pi * basis @ (probed * rho * wts)
    residual = 1.0 - float(np.sum(np.abs(coeffs) ** 2))
    if residual > max_residual:
        raise BasisTooSmallError(
            f"residual {residual:.3e} above {max_residual:.1e} at n_max={n_max}; raise n_max",
            residual=residual, n_max=n_max)
    return ModeSpectrum(l=l, coefficients=coeffs, residual=residual)


def _state_rho2(state, z, beam) -> float:
    """<rho^2> of an l-pure state, from the closed single-mode forms."""
    if isinstance(state, Superposition):
        return sum(abs(c) ** 2 * 0.5 * m.qn.radial_eigenvalue * m.envelope.width_sq(z)
                   for c, m in state.components)
    return 0.5 * state.qn.radial_eigenvalue * state.envelope.width_sq(z)


def splitting_criterion(g_i0: float, g_f0: float, omega_i: float, omega_f: float,
                        rel_tol: float = 1e-9) -> bool:
    """True iff the matched representation forces mode splitting,
    i.e. g_i(0)/|omega_i| != g_f(0)/|omega_f| beyond ``rel_tol``."""
    if omega_i == 0 or omega_f == 0:
        raise DomainError("splitting criterion needs nonzero omegas")
    if g_i0 <= 0 or g_f0 <= 0:
        raise ValueError("g values must be positive")
    return not math.isclose(g_i0 / abs(omega_i), g_f0 / abs(omega_f), rel_tol=rel_tol)


def matched_step_constants(g_i0: float, dg_i0: float, g_f0: float, dg_f0: float,
                           omega_i: float, beam: BeamParams) -> tuple:
    """(w0^2, R0) that keep w and wdot continuous across an abrupt step at
    z = 0 in the two-patch representation  w^2 = w_i^2 g_i (z<0),
    w^2 = w_general^2 g_f (z>0)."""
    w_i_sq = landau_width(omega_i, beam.constants) ** 2
    w0_sq = w_i_sq * g_i0 / g_f0
    denom = dg_i0 / g_i0 - dg_f0 / g_f0
    r0 = math.inf if denom == 0 else 2.0 / denom
    return w0_sq, r0


def convenient_width_factory(g_i, g_f, omega_i: float, omega_f: float,
                             beam: BeamParams, dg_i0: float = 0.0, dg_f0: float = 0.0):
    """Reconstruct w(z) from user-supplied patch functions g_i, g_f.

    Returns (w, w0_sq, r0) where w is a callable.  This is a verification
    harness: tests feed it g functions and check the result against the
    lensing equation and the direct envelope solution.
    """
    from .lensing import analytic_constant_width

    w_i = landau_width(omega_i, beam.constants)
    w0_sq, r0 = matched_step_constants(g_i(0.0), dg_i0, g_f(0.0), dg_f0, omega_i, beam)
    init = EnvelopeInit(0.0, math.sqrt(w0_sq), r0)

    def width(z):
        zz = np.asarray(z, dtype=float)
        gi = np.asarray(g_i(zz), dtype=float)
        gf = np.asarray(g_f(zz), dtype=float)
        post = analytic_constant_width(omega_f, beam, init, zz)
        out = np.where(zz < 0, w_i * np.sqrt(gi), post * np.sqrt(gf))
        return out if np.ndim(z) else float(out)

    return width, w0_sq, r0


def width_oscillation_metric(envelope: EnvelopeSolution, z_window: tuple,
                             samples: int = 4096) -> float:
    """(max w^2 - min w^2)/mean w^2 over a window in the constant-field
    region downstream of the transition; 0 for a pure Landau mode."""
    z_lo, z_hi = float(z_window[0]), float(z_window[1])
    if not z_lo < z_hi:
        raise ValueError(f"window must be ascending, got {z_window!r}")
    omega_here = envelope.profile.omega(0.5 * (z_lo + z_hi))
    if omega_here == 0:
        raise DomainError("oscillation metric needs a nonzero final field")
    period = math.pi * abs(envelope.beam.axial_speed_v) / abs(omega_here)
    if z_hi - z_lo < period:
        raise DomainError(
            f"window {z_hi - z_lo!r} m shorter than one oscillation period {period!r} m")
    w2 = envelope.width_sq(np.linspace(z_lo, z_hi, samples))
    return float((np.max(w2) - np.min(w2)) / np.mean(w2))


def first_width_extremum_after(envelope: EnvelopeSolution, z_start: float,
                               omega_f: float) -> float:
    """First z > z_start where wdot crosses zero (a width extremum)."""
    period = math.pi * envelope.beam.axial_speed_v / abs(omega_f)
    z_hi = min(z_start + 1.5 * period, envelope.domain[1])
    zs = np.linspace(z_start, z_hi, 600)
    wd = envelope.width_deriv(zs)
    sign_change = np.nonzero(np.diff(np.signbit(wd)))[0]
    if wd[0] == 0.0:
        return float(zs[0])
    if sign_change.size == 0:
        raise DomainError(f"no width extremum found in [{z_start!r}, {z_hi!r}]")
    i = int(sign_change[0])
    return float(brentq(envelope.width_deriv, zs[i], zs[i + 1], xtol=1e-18, rtol=8.9e-16))


def adiabatic_ramp_length(omega_i: float, omega_f: float, speed: float,
                          epsilon: float = 0.01) -> float:
    """Smooth-ramp length making max_z |v dOmega/dz| / Omega(z)^2 = epsilon."""
    s = np.linspace(0.0, 1.0, 2049)
    omega_s = omega_i + (omega_f - omega_i) * s * s * (3.0 - 2.0 * s)
    shape = 6.0 * s * (1.0 - s) / omega_s**2
    return abs(speed) * abs(omega_f - omega_i) * float(np.max(np.abs(shape))) / epsilon


def make_ramp_scenario(omega_i: float, omega_f: float, beam: BeamParams,
                       qn: QuantumNumbers = QuantumNumbers(0, 0), *,
                       z_i: float = 1e-4, ramp_length: float = 0.0,
                       z_start: float = 0.0, post_periods: float = 6.0) -> RampScenario:
    """Build the ramp field; ramp_length = 0 gives the abrupt step."""
    period_f = math.pi * beam.axial_speed_v / abs(omega_f)
    if ramp_length > 0:
        z_f = z_i + ramp_length
        z_end = z_f + post_periods * period_f
        field = Piecewise((
            (z_start, z_i, Uniform(omega_i)),
            (z_i, z_f, SmoothRamp(z_i, z_f, omega_i, omega_f)),
            (z_f, z_end, Uniform(omega_f)),
        ))
    else:
        z_f = z_i
        z_end = z_f + post_periods * period_f
        field = Piecewise((
            (z_start, z_i, Uniform(omega_i)),
            (z_i, z_end, Uniform(omega_f)),
        ))
    return RampScenario(field=field, qn=qn, beam=beam, z_i=z_i, z_f=z_f,
                        omega_i=omega_i, omega_f=omega_f)


@dataclass(frozen=True)
class Fig1Result:
    """One ramp variant: envelope trajectory, spectrum, oscillation metric."""

    name: str
    scenario: RampScenario
    envelope: EnvelopeSolution
    z: np.ndarray
    width: np.ndarray
    width_landau_final: float
    z_probe: float
    spectrum: ModeSpectrum
    metric: float
    probe_drift: float  # max | |c| difference | between the two probe positions


def run_ramp_scenario(scenario: RampScenario, n_max: int = 32,
                      grid_points: int = 2001, name: str = "ramp") -> Fig1Result:
    beam = scenario.beam
    z_lo, z_hi = scenario.field.domain
    init = EnvelopeInit(z_lo, scenario.initial_width, math.inf)
    envelope = solve_envelope(scenario.field, beam, init, (z_lo, z_hi))
    z = np.linspace(z_lo, z_hi, grid_points)
    width = envelope.width(z)

    mode = ModeSpec(qn=scenario.qn, envelope=envelope, beam=beam, field=scenario.field)
    z_probe = first_width_extremum_after(envelope, scenario.z_f, scenario.omega_f)
    spectrum = decompose_into_landau(mode, z_probe, scenario.omega_f, beam, n_max)
    quarter = 0.25 * math.pi * beam.axial_speed_v / abs(scenario.omega_f)
    recheck = decompose_into_landau(mode, z_probe + quarter, scenario.omega_f, beam, n_max)
    probe_drift = float(np.max(np.abs(np.abs(spectrum.coefficients)
                                      - np.abs(recheck.coefficients))))
    metric = width_oscillation_metric(envelope, (scenario.z_f, z_hi))
    return Fig1Result(name=name, scenario=scenario, envelope=envelope, z=z, width=width,
                      width_landau_final=scenario.final_landau_width, z_probe=z_probe,
                      spectrum=spectrum, metric=metric, probe_drift=probe_drift)


def run_fig1(slope_multipliers=(1.0, math.inf), *, b_initial_tesla: float = 0.1,
             b_final_tesla: float = 0.2, speed_fraction: float = 0.02,
             z_i: float = 1e-4, qn: QuantumNumbers = QuantumNumbers(0, 0),
             n_max: int = 32, constants=CODATA2018) -> dict:
    """The ramp experiment: B 0.1 T -> 0.2 T at speed 0.02 c.

    ``slope_multipliers`` scale the slope of a baseline smooth ramp whose
    steepness sits at the adiabatic borderline |v dOmega/dz| = 0.01
    Omega^2; multiplier inf is the abrupt step.  Returns {name: Fig1Result}.
    """
    from .constants import larmor_from_B

    beam = BeamParams.from_speed_fraction(speed_fraction, constants)
    omega_i = larmor_from_B(b_initial_tesla, constants)
    omega_f = larmor_from_B(b_final_tesla, constants)
    base_length = adiabatic_ramp_length(omega_i, omega_f, beam.axial_speed_v)
    results = {}
    for mult in slope_multipliers:
        if math.isinf(mult):
            name, length = "abrupt", 0.0
        else:
            name = "gradual" if mult == 1.0 else f"slope-x{mult:g}"
            length = base_length / mult
        scenario = make_ramp_scenario(omega_i, omega_f, beam, qn,
                                      z_i=z_i, ramp_length=length)
        results[name] = run_ramp_scenario(scenario, n_max=n_max, name=name)
    return results
