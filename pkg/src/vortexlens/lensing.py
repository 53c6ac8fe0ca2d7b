"""Beam-envelope solutions of the nonlinear lensing equation.

The width w(z) of any mode obeys

    4*hbar^2/(m_e^2 w^4) - v^2 wddot/w = Omega^2(z),

equivalently  wddot = 4/(k^2 w^3) - (Omega/v)^2 w.  Solutions are composed
from two solutions u, vv of the linear equation v^2 uddot + Omega^2 u = 0
as  w^2 = u^2 + (4/(k^2 W^2)) vv^2  with W the (constant) Wronskian of u
and vv.  Constant, free, and Glaser profiles get closed-form backends; any
other profile is integrated numerically through the same linear
composition, which avoids the 1/w^3 stiffness of the nonlinear form near
foci.  wdot is always carried analytically or as integrator state, never
produced by differencing w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

from .constants import BeamParams
from .errors import DomainError, OutOfDomainError, SolverError
from .fields import FieldProfile, Free, Glaser, Uniform

# Integration contract shared with the observables module, in scaled units.
# DOP853's seventh-order dense output keeps the between-node interpolation
# error far below the 1e-9 residual budget; an embedded 5(4) pair needs
# ~10x more steps for the same quality because its dense output is only
# quartic.
RK_METHOD = "DOP853"
RK_RTOL = 1e-12
RK_ATOL = 1e-14

_QUAD_RTOL = 1e-11


@dataclass(frozen=True)
class EnvelopeInit:
    """Initial data (w0, R0) for the lensing equation at z0.

    R0 is the wavefront curvature radius w/wdot; +-math.inf is the exact
    flat-front case and makes the initial slope exactly zero (1/inf == 0.0
    in IEEE arithmetic, so no large-float stand-in is ever involved).
    """

    z0: float
    w0: float
    r0: float

    def __post_init__(self):
        if not (self.w0 > 0 and math.isfinite(self.w0)):
            raise ValueError(f"w0 must be positive and finite, got {self.w0!r}")
        if self.r0 == 0 or math.isnan(self.r0):
            raise ValueError(f"R0 must be nonzero (use math.inf for a flat front), got {self.r0!r}")
        if not math.isfinite(self.z0):
            raise ValueError(f"z0 must be finite, got {self.z0!r}")

    @property
    def initial_slope(self) -> float:
        """wdot at z0; exactly 0.0 when R0 is infinite."""
        return self.w0 / self.r0


class _ConstantBackend:
    """Closed form for uniform Omega != 0.

    w^2(z) = w0^2 [cos^2 t + (c1/2) sin 2t + c2 sin^2 t],  t = Omega (z-z0)/v.
    """

    name = "AnalyticConstant"

    def __init__(self, omega: float, beam: BeamParams, init: EnvelopeInit):
        if omega == 0:
            raise DomainError("constant-field closed form undefined for Omega = 0; use the free-space form")
        self.omega = omega
        self.beam = beam
        self.init = init
        v, k = beam.axial_speed_v, beam.wavenumber_k
        w0, s0 = init.w0, init.initial_slope
        self.c1 = 2.0 * v * s0 / (omega * w0)
        self.c2 = (v * s0 / (omega * w0)) ** 2 + 4.0 * v**2 / (omega**2 * k**2 * w0**4)
        self._sq_d = math.sqrt(4.0 * self.c2 - self.c1**2)  # = 4 v /(|Omega| k w0^2) > 0

    def _tau(self, z):
        return self.omega * (np.asarray(z, dtype=float) - self.init.z0) / self.beam.axial_speed_v

    def w2(self, z):
        t = self._tau(z)
        return self.init.w0**2 * (
            np.cos(t) ** 2 + 0.5 * self.c1 * np.sin(2.0 * t) + self.c2 * np.sin(t) ** 2
        )

    def dw2(self, z):
        t = self._tau(z)
        pref = self.init.w0**2 * self.omega / self.beam.axial_speed_v
        return pref * ((self.c2 - 1.0) * np.sin(2.0 * t) + self.c1 * np.cos(2.0 * t))

    def _inv_w2_antiderivative(self, z):
        # per half-period winding of the tan substitution
        t = float(self._tau(z))
        m = math.floor((t + math.pi / 2) / math.pi)
        tr = t - m * math.pi
        if abs(abs(tr) - math.pi / 2) < 1e-13:
            f_hi = math.copysign(math.pi / 2, tr)
        else:
            f_hi = math.atan((2.0 * self.c2 * math.tan(tr) + self.c1) / self._sq_d)
        v = self.beam.axial_speed_v
        return (v / (self.omega * self.init.w0**2)) * (2.0 / self._sq_d) * (f_hi + m * math.pi)

    def inv_w2_integral(self, za, zb):
        return self._inv_w2_antiderivative(zb) - self._inv_w2_antiderivative(za)


class _FreeBackend:
    """Closed form for Omega = 0:  w^2 = w0^2 (A dz^2 + 2 B dz + 1)."""

    name = "AnalyticFree"

    def __init__(self, beam: BeamParams, init: EnvelopeInit):
        self.beam = beam
        self.init = init
        k = beam.wavenumber_k
        w0, s0 = init.w0, init.initial_slope
        self.a_coeff = (s0 / w0) ** 2 + 4.0 / (k**2 * w0**4)
        self.b_coeff = s0 / w0
        self.z_r = 0.5 * k * w0**2  # 1/sqrt(A - B^2)

    def w2(self, z):
        dz = np.asarray(z, dtype=float) - self.init.z0
        return self.init.w0**2 * (self.a_coeff * dz**2 + 2.0 * self.b_coeff * dz + 1.0)

    def dw2(self, z):
        dz = np.asarray(z, dtype=float) - self.init.z0
        return self.init.w0**2 * (2.0 * self.a_coeff * dz + 2.0 * self.b_coeff)

    def _inv_w2_antiderivative(self, z):
        dz = float(z) - self.init.z0
        return (self.z_r / self.init.w0**2) * math.atan(self.z_r * (self.a_coeff * dz + self.b_coeff))

    def inv_w2_integral(self, za, zb):
        return self._inv_w2_antiderivative(zb) - self._inv_w2_antiderivative(za)


def _glaser_basis(x, a, beta):
    """Two independent solutions of the linear equation for the Glaser
    profile (argument x = z - c) and their derivatives."""
    x = np.asarray(x, dtype=float)
    s = np.sqrt(a * a + x * x)
    alpha = beta * np.arctan(x / a)
    sin_a, cos_a = np.sin(alpha), np.cos(alpha)
    y1 = s * sin_a
    y2 = s * cos_a
    y1p = (x / s) * sin_a + (a * beta / s) * cos_a
    y2p = (x / s) * cos_a - (a * beta / s) * sin_a
    return y1, y2, y1p, y2p


class _GlaserBackend:
    """Closed-form linear composition for the Lorentzian lens profile,
    anchored at an arbitrary z0 (converted into the y1/y2 basis)."""

    name = "AnalyticGlaser"

    def __init__(self, profile: Glaser, beam: BeamParams, init: EnvelopeInit):
        self.profile = profile
        self.beam = beam
        self.init = init
        v = beam.axial_speed_v
        a = profile.a
        self.beta = math.sqrt(1.0 + (a * profile.omega0 / v) ** 2)
        x0 = init.z0 - profile.c
        y1, y2, y1p, y2p = _glaser_basis(x0, a, self.beta)
        w12 = -a * self.beta  # Wronskian of (y1, y2)
        w0, s0 = init.w0, init.initial_slope
        self.coef_u = ((w0 * y2p - s0 * y2) / w12, (s0 * y1 - w0 * y1p) / w12)
        self.coef_v = (-y2 / w12, y1 / w12)
        self.gamma = 4.0 / (beam.wavenumber_k**2 * w0**2)  # Wronskian of (u, vv) is w0

    def _uv(self, z):
        x = np.asarray(z, dtype=float) - self.profile.c
        y1, y2, y1p, y2p = _glaser_basis(x, self.profile.a, self.beta)
        au, bu = self.coef_u
        av, bv = self.coef_v
        u = au * y1 + bu * y2
        up = au * y1p + bu * y2p
        vv = av * y1 + bv * y2
        vp = av * y1p + bv * y2p
        return u, up, vv, vp

    def w2(self, z):
        u, _, vv, _ = self._uv(z)
        return u * u + self.gamma * vv * vv

    def dw2(self, z):
        u, up, vv, vp = self._uv(z)
        return 2.0 * (u * up + self.gamma * vv * vp)

    def inv_w2_integral(self, za, zb):
        return _quad_inv_w2(self.w2, za, zb, ())


class _PinneyBackend:
    """Numerical linear composition for arbitrary profiles.

    Integrates the scaled linear equation u'' = -(Omega L/v)^2 u for the
    pair (u, vv) with dense output, splitting at profile breakpoints, and
    forms w^2 = u^2 + (4/kappa^2) vv^2 with kappa = k L, L = w0.
    """

    name = "NumericPinney"

    def __init__(self, profile: FieldProfile, beam: BeamParams, init: EnvelopeInit,
                 domain: tuple):
        self.profile = profile
        self.beam = beam
        self.init = init
        scale = init.w0
        self.scale = scale
        self.kappa = beam.wavenumber_k * scale
        self.gamma = 4.0 / self.kappa**2
        v = beam.axial_speed_v

        def rhs(zeta, y):
            om = profile.omega(zeta * scale) * scale / v
            coeff = -om * om
            return (y[1], coeff * y[0], y[3], coeff * y[2])

        z_lo, z_hi = domain
        zeta0 = init.z0 / scale
        y0 = (1.0, init.initial_slope, 0.0, 1.0)
        bps = sorted(b for b in profile.breakpoints() if z_lo < b < z_hi)
        segments = []
        for target, inner in ((z_hi / scale, [b / scale for b in bps if b > init.z0]),
                              (z_lo / scale, [b / scale for b in reversed(bps) if b < init.z0])):
            if target == zeta0:
                continue
            y = np.asarray(y0, dtype=float)
            start = zeta0
            for stop in inner + [target]:
                if stop == start:
                    continue
                sol = solve_ivp(rhs, (start, stop), y, method=RK_METHOD,
                                rtol=RK_RTOL, atol=RK_ATOL, dense_output=True)
                if not sol.success:
                    raise SolverError(f"envelope integration failed on [{start}, {stop}]: {sol.message}")
                segments.append((min(start, stop), max(start, stop), sol.sol))
                y = sol.y[:, -1]
                start = stop
        segments.sort(key=lambda seg: seg[0])
        self._segments = segments
        self._edges = np.array([seg[0] for seg in segments] + [segments[-1][1]])

    def _states(self, z):
        zeta = np.atleast_1d(np.asarray(z, dtype=float)) / self.scale
        out = np.empty((4, zeta.size))
        idx = np.clip(np.searchsorted(self._edges, zeta, side="right") - 1, 0, len(self._segments) - 1)
        for seg_i in np.unique(idx):
            mask = idx == seg_i
            out[:, mask] = self._segments[seg_i][2](zeta[mask])
        return out.reshape((4,) + np.shape(z))

    def w2(self, z):
        u, _, vv, _ = self._states(z)
        return (u * u + self.gamma * vv * vv) * self.scale**2

    def dw2(self, z):
        u, up, vv, vp = self._states(z)
        return 2.0 * (u * up + self.gamma * vv * vp) * self.scale

    def inv_w2_integral(self, za, zb):
        return _quad_inv_w2(self.w2, za, zb, self.profile.breakpoints())


def _quad_inv_w2(w2_fn, za, zb, breakpoints):
    if za == zb:
        return 0.0
    sign = 1.0
    if zb < za:
        za, zb = zb, za
        sign = -1.0
    pts = sorted(p for p in breakpoints if za < p < zb)
    val, err = quad(lambda s: 1.0 / float(w2_fn(s)), za, zb,
                    points=pts or None, epsrel=_QUAD_RTOL, epsabs=0.0, limit=800)
    if not math.isfinite(val):
        raise SolverError(f"1/w^2 quadrature returned {val!r} on [{za}, {zb}]")
    return sign * val


class EnvelopeSolution:
    """Width function w(z), its derivative, and curvature radius R(z).

    Immutable after construction; evaluation at arbitrary z (scalar or
    ndarray) is thread-safe.
    """

    def __init__(self, profile, beam, init, domain, backend):
        self.profile = profile
        self.beam = beam
        self.init = init
        self.domain = (float(domain[0]), float(domain[1]))
        self._backend = backend
        self.backend = backend.name
        span = self.domain[1] - self.domain[0]
        self._slack = 1e-9 * max(span, abs(self.domain[0]), abs(self.domain[1]), 1e-300)
        self._scale = getattr(backend, "scale", init.w0)

    def _check(self, z):
        lo, hi = self.domain
        if np.min(z) < lo - self._slack or np.max(z) > hi + self._slack:
            raise OutOfDomainError(
                f"z range [{np.min(z)!r}, {np.max(z)!r}] outside solution domain [{lo!r}, {hi!r}]"
            )

    def width_sq(self, z):
        self._check(z)
        out = self._backend.w2(z)
        return out if np.ndim(z) else float(out)

    def width(self, z):
        return np.sqrt(self.width_sq(z)) if np.ndim(z) else math.sqrt(self.width_sq(z))

    def width_deriv(self, z):
        """wdot = (d w^2/dz) / (2 w); analytic or integrator state, never a
        finite difference of w."""
        self._check(z)
        out = self._backend.dw2(z) / (2.0 * np.sqrt(self._backend.w2(z)))
        return out if np.ndim(z) else float(out)

    def width_second_deriv(self, z):
        """wddot obtained algebraically from the lensing equation itself."""
        w = self.width(z)
        om = self.profile.omega(z)
        k = self.beam.wavenumber_k
        v = self.beam.axial_speed_v
        return 4.0 / (k**2 * w**3) - (om / v) ** 2 * w

    def curvature_radius(self, z):
        """R = w/wdot; +inf where |wdot| is below threshold (waists/extrema)."""
        w = self.width(z)
        wd = self.width_deriv(z)
        thresh = 1e-14 * w / self._scale
        if np.ndim(z) == 0:
            return math.inf if abs(wd) < thresh else w / wd
        out = np.where(np.abs(wd) < thresh, math.inf, np.divide(w, np.where(wd == 0, 1.0, wd)))
        return out

    def inverse_w2_integral(self, za, zb):
        """Integral of dz/w^2 over [za, zb] (signed); closed form for the
        analytic constant/free backends, adaptive quadrature otherwise."""
        self._check(za)
        self._check(zb)
        return self._backend.inv_w2_integral(float(za), float(zb))


def solve_envelope(profile: FieldProfile, beam: BeamParams, init: EnvelopeInit,
                   domain: tuple, method: str = "auto") -> EnvelopeSolution:
    """Solve the lensing equation on ``domain`` = (z_lo, z_hi).

    Dispatches to a closed-form backend for Uniform/Free/Glaser profiles
    and to the numerical linear composition otherwise.  ``method="numeric"``
    forces the numerical backend (used to cross-validate the analytic ones).
    """
    z_lo, z_hi = float(domain[0]), float(domain[1])
    if not z_lo < z_hi:
        raise ValueError(f"domain must be an ascending interval, got {domain!r}")
    if not (z_lo <= init.z0 <= z_hi):
        raise ValueError(f"init.z0 = {init.z0!r} not inside domain {domain!r}")
    p_lo, p_hi = profile.domain
    if z_lo < p_lo or z_hi > p_hi:
        raise OutOfDomainError(f"domain {domain!r} exceeds profile domain {profile.domain!r}")

    if method not in ("auto", "numeric"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        if isinstance(profile, Uniform):
            backend = (_FreeBackend(beam, init) if profile.omega0 == 0
                       else _ConstantBackend(profile.omega0, beam, init))
        elif isinstance(profile, Free):
            backend = _FreeBackend(beam, init)
        elif isinstance(profile, Glaser):
            backend = _GlaserBackend(profile, beam, init)
        else:
            backend = _PinneyBackend(profile, beam, init, (z_lo, z_hi))
    else:
        backend = _PinneyBackend(profile, beam, init, (z_lo, z_hi))
    return EnvelopeSolution(profile, beam, init, (z_lo, z_hi), backend)


def analytic_constant_width(omega: float, beam: BeamParams, init: EnvelopeInit, z):
    """w(z) for a uniform field, from the closed trigonometric form.

    DomainError for omega = 0, where the expression is undefined and the
    free-space form must be used instead.
    """
    backend = _ConstantBackend(omega, beam, init)
    return np.sqrt(backend.w2(z)) if np.ndim(z) else math.sqrt(float(backend.w2(z)))


def analytic_free_width(beam: BeamParams, init: EnvelopeInit, z):
    """w(z) in free space: w^2 = w0^2 [1 + (1/R0^2 + 4/(w0^4 k^2)) dz^2 + 2 dz/R0]."""
    backend = _FreeBackend(beam, init)
    return np.sqrt(backend.w2(z)) if np.ndim(z) else math.sqrt(float(backend.w2(z)))


def analytic_glaser_width(omega0: float, a: float, c: float, beam: BeamParams,
                          init_at_c: tuple, z):
    """w(z) for the Glaser profile with (w_c, R_c) given at the lens center.

    Evaluates the literal closed form

        w^2 = w_c^2 (a^2+(z-c)^2)/a^2 [cos^2 A + (a/(beta R_c)) sin 2A
              + (a^2/beta^2)(1/R_c^2 + 4/(k^2 w_c^4)) sin^2 A],

    A = beta arctan((z-c)/a), beta = sqrt(1 + a^2 Omega0^2/v^2).  This path
    is kept independent of the basis construction used by solve_envelope so
    the two can cross-validate.
    """
    if not a > 0:
        raise ValueError(f"Glaser half-width a must be positive, got {a!r}")
    w_c, r_c = init_at_c
    if w_c <= 0 or r_c == 0:
        raise ValueError(f"need w_c > 0 and R_c != 0, got {init_at_c!r}")
    v, k = beam.axial_speed_v, beam.wavenumber_k
    beta = math.sqrt(1.0 + (a * omega0 / v) ** 2)
    x = np.asarray(z, dtype=float) - c
    alpha = beta * np.arctan(x / a)
    inv_rc = 0.0 if math.isinf(r_c) else 1.0 / r_c
    w2 = w_c**2 * ((a * a + x * x) / (a * a)) * (
        np.cos(alpha) ** 2
        + (a / beta) * inv_rc * np.sin(2.0 * alpha)
        + (a**2 / beta**2) * (inv_rc**2 + 4.0 / (k**2 * w_c**4)) * np.sin(alpha) ** 2
    )
    return np.sqrt(w2) if np.ndim(z) else math.sqrt(float(w2))


def curvature_radius(solution: EnvelopeSolution, z):
    """Wavefront curvature radius R(z) = w/wdot (+inf at width extrema)."""
    return solution.curvature_radius(z)


def ermakov_pinney_residual(solution: EnvelopeSolution, z, h: float = None):
    """Residual 4 hbar^2/(m_e^2 w^4) - v^2 wddot/w - Omega^2 with wddot from
    central differences of wdot (an independent check on every backend).

    z +- 2h must stay inside the solution domain.  The 5-point stencil and
    the default h keep both truncation and rounding below the 1e-9 budget
    even in free space, where the tolerance floor (v/span)^2 is tight.
    """
    beam = solution.beam
    v, k = beam.axial_speed_v, beam.wavenumber_k
    if h is None:
        z_lo, z_hi = solution.domain
        om_peak = solution.profile.omega_peak_abs(z_lo, z_hi)
        w_min = float(np.min(solution.width(np.linspace(z_lo, z_hi, 257))))
        char = min(v / om_peak if om_peak > 0 else math.inf,
                   0.5 * k * w_min**2,
                   z_hi - z_lo)
        h = 5e-4 * char
    zz = np.asarray(z, dtype=float)
    w = solution.width(zz)
    wd = solution.width_deriv
    wdd = (-wd(zz + 2 * h) + 8.0 * wd(zz + h) - 8.0 * wd(zz - h) + wd(zz - 2 * h)) / (12.0 * h)
    om = np.asarray(solution.profile.omega(zz), dtype=float)
    hbar = beam.constants.hbar
    m_e = beam.constants.electron_mass
    return 4.0 * hbar**2 / (m_e**2 * w**4) - v**2 * wdd / w - om**2
