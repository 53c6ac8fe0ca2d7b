"""Independent oracle routes used by the tests.

Everything here deliberately avoids the code paths it checks: the Laguerre
series instead of the recurrence, direct integration of the nonlinear
width equation instead of the linear composition, raw quadrature instead
of closed-form moments.
"""

import math

import numpy as np
from scipy.integrate import quad, solve_ivp


def laguerre_series(n, alpha, x):
    """L_n^alpha(x) from the explicit series sum_k (-1)^k C(n+a, n-k) x^k/k!."""
    return math.fsum((-1) ** k * math.comb(n + alpha, n - k) * x**k / math.factorial(k)
                     for k in range(n + 1))


def radial_norm_quad(radial_fn, rho_max):
    """2 pi * integral |f(rho)|^2 rho d rho by adaptive quadrature."""
    val, _err = quad(lambda r: abs(radial_fn(r)) ** 2 * r, 0.0, rho_max,
                     epsabs=1e-14, epsrel=1e-12, limit=400)
    return 2.0 * math.pi * val


def radial_moment_quad(radial_fn, rho_max, power=2):
    """2 pi * integral |f|^2 rho^power rho d rho (the <rho^power> numerator)."""
    val, _err = quad(lambda r: abs(radial_fn(r)) ** 2 * r ** (power + 1), 0.0, rho_max,
                     epsabs=1e-16, epsrel=1e-12, limit=400)
    return 2.0 * math.pi * val


def complex_radial_overlap(f, g, rho_max):
    """2 pi * integral conj(f) g rho d rho, real and imaginary parts separately."""
    re, _ = quad(lambda r: (np.conj(f(r)) * g(r)).real * r, 0.0, rho_max,
                 epsabs=1e-15, epsrel=1e-12, limit=400)
    im, _ = quad(lambda r: (np.conj(f(r)) * g(r)).imag * r, 0.0, rho_max,
                 epsabs=1e-15, epsrel=1e-12, limit=400)
    return 2.0 * math.pi * (re + 1j * im)


def solve_width_nonlinear(profile, beam, init, z_targets):
    """Integrate the nonlinear width equation wddot = 4/(k^2 w^3) - (Omega/v)^2 w
    directly (the independent check on the linear-composition route).

    Returns w at each requested z.  Integration restarts at profile
    breakpoints so discontinuous Omega^2 is handled exactly.
    """
    scale = init.w0
    kappa = beam.wavenumber_k * scale
    v = beam.axial_speed_v

    def rhs(zeta, y):
        om_t = profile.omega(zeta * scale) * scale / v
        return (y[1], 4.0 / (kappa**2 * y[0] ** 3) - om_t**2 * y[0])

    targets = np.asarray(z_targets, dtype=float)
    out = np.empty_like(targets)
    out[targets == init.z0] = init.w0
    zeta0 = init.z0 / scale
    for direction in (+1, -1):
        sel = (targets - init.z0) * direction > 0
        if not np.any(sel):
            continue
        zetas = np.sort(targets[sel] / scale)
        if direction < 0:
            zetas = zetas[::-1]
        bps = sorted((b / scale for b in profile.breakpoints()
                      if (b - init.z0) * direction > 0 and
                      (zetas[-1] - b / scale) * direction > 0),
                     key=lambda b: abs(b - zeta0))
        stops = sorted(set(list(zetas) + bps), key=lambda t: abs(t - zeta0))
        y = np.array([1.0, init.initial_slope])
        start = zeta0
        collected = {}
        for stop in stops:
            sol = solve_ivp(rhs, (start, stop), y, method="DOP853",
                            rtol=1e-12, atol=1e-14, dense_output=False)
            assert sol.success, sol.message
            y = sol.y[:, -1]
            collected[stop] = y[0] * scale
            start = stop
        for i in np.nonzero(sel)[0]:
            out[i] = collected[targets[i] / scale]
    return out


def gouy_phase_quad(envelope, beam, z0, z1, eigenvalue):
    """(2n+|l|+1) * (2/k) * integral dz/w^2 by raw adaptive quadrature."""
    pts = sorted(p for p in envelope.profile.breakpoints() if z0 < p < z1)
    val, _ = quad(lambda s: 1.0 / envelope.width_sq(s), z0, z1,
                  points=pts or None, epsrel=1e-12, epsabs=0.0, limit=500)
    return eigenvalue * (2.0 / beam.wavenumber_k) * val
