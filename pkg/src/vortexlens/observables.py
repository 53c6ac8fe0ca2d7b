"""Gauge-invariant expectation values and their closed propagation.

Four quantities -- transverse kinetic energy <T_perp>, squared radius
<rho^2>, mechanical angular momentum <L_mech> = <L_z + m_e Omega rho^2>,
and the radial-flow generator <G_perp> -- obey a closed linear ODE system
in z:

    d<T>/dz    = Omegadot <L>
    d<rho2>/dz = (2/(m_e v)) <G>
    d<L>/dz    = Omegadot m_e <rho2> + (2 Omega/v) <G>
    d<G>/dz    = (2/v) (<T> - Omega <L>)

Two combinations are conserved: the canonical angular momentum
<L> - m_e Omega <rho2>, and the quadratic invariant built from any
envelope solution (evaluated here in units of hbar).  Propagation runs in
scaled variables so nothing ever multiplies two raw hbar-sized numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .constants import BeamParams
from .errors import SolverError
from .fields import FieldProfile
from .lensing import RK_ATOL, RK_METHOD, RK_RTOL, EnvelopeSolution
from .modes import ModeSpec, QuantumNumbers


@dataclass(frozen=True)
class ObservableState:
    """The four gauge-invariant expectation values at one z (SI units)."""

    z: float
    t_perp: float   # J
    rho2: float     # m^2
    l_mech: float   # J s
    g_perp: float   # J s

    def __post_init__(self):
        if not self.rho2 > 0:
            raise ValueError(f"rho2 must be positive, got {self.rho2!r}")


@dataclass(frozen=True)
class EMAngularMomentum:
    """Field part of the angular momentum, -m_e Omega(z) <rho^2>."""

    value: float  # J s


def em_angular_momentum(field: FieldProfile, z: float, rho2: float,
                        beam: BeamParams) -> EMAngularMomentum:
    m_e = beam.constants.electron_mass
    return EMAngularMomentum(-m_e * field.omega(z) * rho2)


def canonical_angular_momentum(state: ObservableState, field: FieldProfile,
                               beam: BeamParams) -> float:
    """<L_z> = <L_mech> - m_e Omega(z) <rho^2>; conserved along propagation."""
    m_e = beam.constants.electron_mass
    return state.l_mech - m_e * field.omega(state.z) * state.rho2


class ObservableTrajectory:
    """Dense solution of the closed observable system on a z-interval."""

    def __init__(self, profile, beam, initial, domain, segments, scale):
        self.profile = profile
        self.beam = beam
        self.initial = initial
        self.domain = domain
        self._segments = segments
        self._edges = np.array([seg[0] for seg in segments] + [segments[-1][1]])
        self._scale = scale

    def _scaled_states(self, zeta):
        out = np.empty((4, zeta.size))
        idx = np.clip(np.searchsorted(self._edges, zeta, side="right") - 1,
                      0, len(self._segments) - 1)
        for seg_i in np.unique(idx):
            mask = idx == seg_i
            out[:, mask] = self._segments[seg_i][2](zeta[mask])
        return out

    def sample(self, z):
        """Arrays (t_perp, rho2, l_mech, g_perp) in SI units at the given z."""
        zz = np.atleast_1d(np.asarray(z, dtype=float))
        t_s, r_s, l_s, g_s = self._scaled_states(zz / self._scale)
        hbar = self.beam.constants.hbar
        v = self.beam.axial_speed_v
        scale = self._scale
        return (t_s * hbar * v / scale, r_s * scale**2, l_s * hbar, g_s * hbar)

    def state_at(self, z: float) -> ObservableState:
        t, r, l, g = (float(a[0]) for a in self.sample(z))
        return ObservableState(z=float(z), t_perp=t, rho2=r, l_mech=l, g_perp=g)


def propagate_observables(profile: FieldProfile, beam: BeamParams,
                          initial: ObservableState, domain: tuple) -> ObservableTrajectory:
    """Integrate the closed system from ``initial`` (at domain start).

    Same adaptive integration contract as the envelope solver; the
    integration restarts at profile breakpoints.
    """
    z_lo, z_hi = float(domain[0]), float(domain[1])
    if not z_lo < z_hi:
        raise ValueError(f"domain must be ascending, got {domain!r}")
    if initial.z != z_lo:
        raise ValueError(f"initial.z = {initial.z!r} must equal domain start {z_lo!r}")

    hbar = beam.constants.hbar
    v = beam.axial_speed_v
    scale = math.sqrt(2.0 * initial.rho2)  # effective initial beam width
    kappa = beam.wavenumber_k * scale

    def rhs(zeta, y):
        z = zeta * scale
        om = profile.omega(z) * scale / v
        om_d = profile.domega_dz(z) * scale**2 / v
        t, r, l, g = y
        return (om_d * l,
                (2.0 / kappa) * g,
                kappa * om_d * r + 2.0 * om * g,
                2.0 * (t - om * l))

    y0 = (initial.t_perp * scale / (hbar * v),
          initial.rho2 / scale**2,
          initial.l_mech / hbar,
          initial.g_perp / hbar)

    bps = sorted(b for b in profile.breakpoints() if z_lo < b < z_hi)
    boundaries = [b / scale for b in bps] + [z_hi / scale]
    segments = []
    y = np.asarray(y0, dtype=float)
    start = z_lo / scale
    for stop in boundaries:
        if stop == start:
            continue
        sol = solve_ivp(rhs, (start, stop), y, method=RK_METHOD,
                        rtol=RK_RTOL, atol=RK_ATOL, dense_output=True)
        if not sol.success:
            raise SolverError(f"observable propagation failed on [{start}, {stop}]: {sol.message}")
        segments.append((start, stop, sol.sol))
        y = sol.y[:, -1]
        # Across a field discontinuity the wavefunction (hence <rho2>, <G>,
        # and the canonical <L_z>) is continuous, while <L_mech> and <T>
        # jump with the Omega appearing in their definitions -- the delta
        # in Omegadot integrated exactly:
        z_stop = stop * scale
        d_om = (profile.omega(z_stop) - profile.omega_left(z_stop)) * scale / v
        if d_om != 0.0:
            t, r, l, g = y
            y = np.array([t + d_om * l + 0.5 * kappa * d_om**2 * r,
                          r,
                          l + kappa * d_om * r,
                          g])
        start = stop
    return ObservableTrajectory(profile, beam, initial, (z_lo, z_hi), segments, scale)


def single_mode_observables(qn: QuantumNumbers, envelope: EnvelopeSolution,
                            field: FieldProfile, beam: BeamParams, z: float) -> ObservableState:
    """Closed forms for a pure (n, l) mode riding ``envelope``.

    The radial factor is (2n+|l|+1)/2, fixed by the quadrature oracle (the
    naive (n + |l|/2) would give a vanishing <rho^2> for the Gaussian
    ground mode); wddot comes algebraically from the lensing equation.
    """
    f_radial = 0.5 * qn.radial_eigenvalue
    m_e = beam.constants.electron_mass
    hbar = beam.constants.hbar
    v = beam.axial_speed_v
    w = envelope.width(z)
    wd = envelope.width_deriv(z)
    wdd = envelope.width_second_deriv(z)
    om = field.omega(z)
    return ObservableState(
        z=float(z),
        t_perp=hbar * qn.l * om + f_radial * m_e * (0.5 * v**2 * (wd**2 + w * wdd) + om**2 * w**2),
        rho2=f_radial * w**2,
        l_mech=hbar * qn.l + f_radial * m_e * om * w**2,
        g_perp=f_radial * m_e * v * w * wd,
    )


def ermakov_lewis(state, envelope: EnvelopeSolution, field: FieldProfile,
                  beam: BeamParams) -> float:
    """The conserved quadratic invariant, in units of hbar.

    ``state`` is an ObservableState (for superpositions the same bilinear
    combination of expectation values is still conserved) or a ModeSpec,
    for which the value is exactly 2n+|l|+1 at every z.  The wddot entering
    the coefficient matrix is eliminated through the lensing equation, not
    finite-differenced.
    """
    if isinstance(state, ModeSpec):
        state = single_mode_observables(state.qn, state.envelope, state.field,
                                        state.beam, state.envelope.init.z0)
    z = state.z
    hbar = beam.constants.hbar
    v, k = beam.axial_speed_v, beam.wavenumber_k
    w = envelope.width(z)
    wd = envelope.width_deriv(z)
    wdd = envelope.width_second_deriv(z)
    om = field.omega(z)
    m_over_hbar = k / v  # m_e/hbar without touching 1e-34 magnitudes twice
    term_energy = 0.5 * (m_over_hbar * w**2) * (state.t_perp - om * state.l_mech) / hbar
    term_flow = -0.5 * k * w * wd * (state.g_perp / hbar)
    term_radius = 0.5 * m_over_hbar**2 * (om**2 * w**2 + 0.5 * v**2 * (wd**2 + w * wdd)) * state.rho2
    return term_energy + term_flow + term_radius


def quadrature_moments(chi, w_hint: float, z: float, field: FieldProfile,
                       beam: BeamParams, n_rho: int = 1024, n_phi: int = 512,
                       extent: float = 12.0) -> ObservableState:
    """Independent oracle: all four observables by 2D quadrature.

    ``chi(rho, phi)`` samples the (normalized) wavefunction at fixed z on
    broadcastable arrays.  Derivatives use 4th-order central differences on
    a uniform polar grid; the axis is crossed with chi(-rho, phi) =
    chi(rho, phi+pi); radial integration is composite Simpson.  <T_perp>
    is Richardson-extrapolated from the full and half radial resolutions,
    which double as a convergence check (SolverError on disagreement).
    """
    if n_phi % 2:
        raise ValueError("n_phi must be even (axis reflection shifts by half a turn)")
    if n_rho % 4:
        raise ValueError("n_rho must be a multiple of 4 (Simpson panels at two resolutions)")
    m_e = beam.constants.electron_mass
    hbar = beam.constants.hbar
    om = field.omega(z)
    d_phi = 2.0 * math.pi / n_phi

    rho_max = extent * w_hint
    d_rho = rho_max / n_rho
    phi = np.arange(n_phi) * d_phi
    rho_nodes = d_rho * np.arange(0, n_rho + 3)  # j = 0 .. N+2
    vals = chi(rho_nodes[:, None], phi[None, :])

    def build_ext(samples, ghost_src):
        # rows j = -2, -1, 0, 1, ..., top; ghosts are axis reflections
        ghosts = np.roll(ghost_src, n_phi // 2, axis=1)[::-1]
        return np.concatenate([ghosts, samples], axis=0)

    def compute(ext_arr, n_r, dr):
        # ext_arr rows are j = -2 .. n_r+2; interior j = 1 .. n_r
        rho = dr * np.arange(1, n_r + 1)[:, None]
        center = ext_arr[3:3 + n_r]
        p2, p1 = ext_arr[5:5 + n_r], ext_arr[4:4 + n_r]
        m1, m2 = ext_arr[2:2 + n_r], ext_arr[1:1 + n_r]
        d_r = (-p2 + 8 * p1 - 8 * m1 + m2) / (12 * dr)
        d_rr = (-p2 + 16 * p1 - 30 * center + 16 * m1 - m2) / (12 * dr**2)
        d_p = (-np.roll(center, -2, axis=1) + 8 * np.roll(center, -1, axis=1)
               - 8 * np.roll(center, 1, axis=1) + np.roll(center, 2, axis=1)) / (12 * d_phi)
        d_pp = (-np.roll(center, -2, axis=1) + 16 * np.roll(center, -1, axis=1)
                - 30 * center + 16 * np.roll(center, 1, axis=1)
                - np.roll(center, 2, axis=1)) / (12 * d_phi**2)
        lap = d_rr + d_r / rho + d_pp / rho**2
        t_chi = (-hbar**2 / (2 * m_e)) * lap + (0.5 * m_e * om**2 * rho**2) * center \
            + om * (-1j * hbar) * d_p
        conj = np.conj(center)

        def radial_integral(density_rows):
            ring = 2.0 * math.pi * np.real(np.mean(density_rows, axis=1))
            integrand = np.concatenate([[0.0], ring * (dr * np.arange(1, n_r + 1))])
            return _simpson_uniform(integrand, dr)

        norm = radial_integral(conj * center)
        rho2_v = radial_integral(conj * center * rho**2) / norm
        lz_can = radial_integral(conj * (-1j * hbar) * d_p) / norm
        g_v = radial_integral(conj * (-1j * hbar) * (rho * d_r + center)) / norm
        t_v = radial_integral(conj * t_chi) / norm
        return norm, rho2_v, lz_can, g_v, t_v

    ext_fine = build_ext(vals, vals[1:3])
    norm, rho2_v, lz_fine, g_fine, t_fine = compute(ext_fine, n_rho, d_rho)
    if abs(norm - 1.0) > 1e-6:
        raise SolverError(f"sampler is not normalized: integral = {norm!r}")
    # half resolution reuses the even-j samples (rows j = 0, 2, ..., N+2);
    # Richardson-extrapolate every stencil-derived moment
    ext_coarse = build_ext(vals[::2], vals[2:6:2])
    _, _, lz_coarse, g_coarse, t_coarse = compute(ext_coarse, n_rho // 2 - 1, 2 * d_rho)
    lz_can = (16.0 * lz_fine - lz_coarse) / 15.0
    g_v = (16.0 * g_fine - g_coarse) / 15.0
    t_rich = (16.0 * t_fine - t_coarse) / 15.0
    if abs(t_fine - t_coarse) > 1e-3 * max(abs(t_fine), hbar * abs(om)):
        raise SolverError(
            f"<T_perp> failed the Richardson consistency check: {t_fine!r} vs {t_coarse!r}"
        )
    return ObservableState(z=float(z), t_perp=t_rich, rho2=rho2_v,
                           l_mech=lz_can + m_e * om * rho2_v, g_perp=g_v)


def _simpson_uniform(f, h):
    """Composite Simpson on a uniform grid; even point counts get a final
    trapezoidal panel (only reached by the half-resolution check grid)."""
    n = f.size
    if n % 2 == 0:
        return _simpson_uniform(f[:-1], h) + 0.5 * h * (f[-2] + f[-1])
    return (h / 3.0) * (f[0] + f[-1] + 4.0 * np.sum(f[1:-1:2]) + 2.0 * np.sum(f[2:-2:2]))
