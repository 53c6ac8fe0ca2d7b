import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vortexlens import (DomainError, EnvelopeInit, Free, Glaser, LinearRamp,
                        OutOfDomainError, Piecewise, SmoothRamp, Tabulated, Uniform,
                        analytic_constant_width, analytic_free_width,
                        analytic_glaser_width, curvature_radius,
                        ermakov_pinney_residual, landau_width, solve_envelope)

from oracles import solve_width_nonlinear


def glaser_beta(beam, beta, a=1e-3, c=0.0):
    omega0 = math.sqrt(beta**2 - 1.0) * beam.axial_speed_v / a
    return Glaser(omega0, a, c)


class TestEnvelopeInit:
    def test_flat_front_slope_exactly_zero(self):
        init = EnvelopeInit(z0=0.0, w0=1e-7, r0=math.inf)
        assert init.initial_slope == 0.0
        init_neg = EnvelopeInit(z0=0.0, w0=1e-7, r0=-math.inf)
        assert init_neg.initial_slope == 0.0 and math.copysign(1, init_neg.initial_slope) == -1

    def test_validation(self):
        with pytest.raises(ValueError):
            EnvelopeInit(0.0, -1e-7, math.inf)
        with pytest.raises(ValueError):
            EnvelopeInit(0.0, 1e-7, 0.0)
        with pytest.raises(ValueError):
            EnvelopeInit(math.inf, 1e-7, 1.0)


class TestAnalyticConstant:
    def test_initial_condition(self, beam, omega_01):
        init = EnvelopeInit(0.0, 1.4e-7, 3e-3)
        assert analytic_constant_width(omega_01, beam, init, 0.0) == pytest.approx(1.4e-7, rel=1e-15)

    def test_periodicity(self, beam, omega_01):
        init = EnvelopeInit(0.0, 1.4e-7, 3e-3)
        period = math.pi * beam.axial_speed_v / omega_01
        for z in (1.3e-4, 7.7e-4):
            w1 = analytic_constant_width(omega_01, beam, init, z)
            w2 = analytic_constant_width(omega_01, beam, init, z + period)
            assert w1 == pytest.approx(w2, rel=1e-12)

    def test_zero_field_rejected(self, beam):
        init = EnvelopeInit(0.0, 1.4e-7, 3e-3)
        with pytest.raises(DomainError):
            analytic_constant_width(0.0, beam, init, 1e-4)

    def test_limit_to_free_space(self, beam):
        # pointwise convergence as Omega -> 0
        init = EnvelopeInit(0.0, 1.4e-7, 3e-3)
        z = 4.2e-4
        target = analytic_free_width(beam, init, z)
        previous_gap = math.inf
        for omega in (1e8, 1e7, 1e6, 1e5):
            gap = abs(analytic_constant_width(omega, beam, init, z) - target)
            assert gap < previous_gap or gap < 1e-18
            previous_gap = gap
        assert previous_gap < 1e-12 * target


class TestAnalyticFree:
    def test_initial_condition(self, beam):
        init = EnvelopeInit(0.0, 1.6e-7, -2e-3)
        assert analytic_free_width(beam, init, 0.0) == pytest.approx(1.6e-7, rel=1e-15)

    def test_flat_front_doubling_at_rayleigh_length(self, beam):
        w0 = 1.6e-7
        init = EnvelopeInit(0.0, w0, math.inf)
        z_r = beam.rayleigh_length(w0)
        assert analytic_free_width(beam, init, z_r) ** 2 == pytest.approx(2 * w0**2, rel=1e-13)

    @given(st.floats(min_value=5e-8, max_value=5e-7),
           st.floats(min_value=-1e-2, max_value=1e-2).filter(lambda r: abs(r) > 1e-5))
    def test_always_strictly_positive(self, w0, r0, beam=None):
        # w^2 is a convex parabola whose discriminant is negative:
        # (2/R0)^2 < 4 (1/R0^2 + 4/(w0^4 k^2)) always
        from vortexlens import BeamParams
        beam = BeamParams.from_speed_fraction(0.02)
        init = EnvelopeInit(0.0, w0, r0)
        zs = np.linspace(-0.05, 0.05, 501)
        w = analytic_free_width(beam, init, zs)
        assert np.all(w > 0)
        # direct discriminant statement
        a_coeff = 1 / r0**2 + 4 / (w0**4 * beam.wavenumber_k**2)
        assert (2 / r0) ** 2 < 4 * a_coeff


class TestAnalyticGlaser:
    def test_center_value(self, beam):
        p = glaser_beta(beam, 2.0)
        w = analytic_glaser_width(p.omega0, p.a, p.c, beam, (1.4e-7, 3.7e-3), p.c)
        assert w == pytest.approx(1.4e-7, rel=1e-15)

    def test_zero_field_reduces_to_free_space(self, beam):
        a, c = 1e-3, 2e-4
        wc, rc = 1.5e-7, -4e-3
        init = EnvelopeInit(c, wc, rc)
        zs = np.linspace(c - 5 * a, c + 5 * a, 101)
        w_glaser = analytic_glaser_width(0.0, a, c, beam, (wc, rc), zs)
        w_free = analytic_free_width(beam, init, zs)
        assert np.allclose(w_glaser, w_free, rtol=1e-12)

    def test_special_choice_is_oscillation_free(self, beam):
        p = glaser_beta(beam, 2.0)
        beta = 2.0
        k = beam.wavenumber_k
        w_c = math.sqrt(2 * p.a / (beta * k))
        zs = np.linspace(p.c - 8 * p.a, p.c + 8 * p.a, 401)
        w2 = analytic_glaser_width(p.omega0, p.a, p.c, beam, (w_c, math.inf), zs) ** 2
        expected = (2.0 / (k * p.a)) / beta * ((zs - p.c) ** 2 + p.a**2)
        assert np.allclose(w2, expected, rtol=1e-12)


class TestSolveEnvelope:
    def test_landau_mode_is_stationary(self, landau_envelope, landau_w01):
        zs = np.linspace(*landau_envelope.domain, 501)
        assert np.max(np.abs(landau_envelope.width(zs) / landau_w01 - 1)) < 1e-12
        assert landau_envelope.backend == "AnalyticConstant"

    def test_free_space_flat_front(self, beam):
        w0 = 1.6e-7
        z_r = beam.rayleigh_length(w0)
        sol = solve_envelope(Free(), beam, EnvelopeInit(0.0, w0, math.inf), (-3 * z_r, 3 * z_r))
        zs = np.linspace(-3 * z_r, 3 * z_r, 101)
        assert np.allclose(sol.width_sq(zs), w0**2 * (1 + (zs / z_r) ** 2), rtol=1e-13)
        assert sol.backend == "AnalyticFree"

    def test_uniform_zero_field_dispatches_to_free(self, beam):
        sol = solve_envelope(Uniform(0.0), beam, EnvelopeInit(0.0, 1.6e-7, math.inf), (-1e-3, 1e-3))
        assert sol.backend == "AnalyticFree"

    @pytest.mark.parametrize("beta", [1.1, 2.0, 5.0])
    def test_glaser_numeric_vs_closed_form(self, beam, beta):
        p = glaser_beta(beam, beta)
        init = EnvelopeInit(p.c, 1.4e-7, 3.7e-3)
        dom = (p.c - 10 * p.a, p.c + 10 * p.a)
        numeric = solve_envelope(p, beam, init, dom, method="numeric")
        assert numeric.backend == "NumericPinney"
        zs = np.linspace(*dom, 501)
        w_closed = analytic_glaser_width(p.omega0, p.a, p.c, beam, (1.4e-7, 3.7e-3), zs)
        assert np.max(np.abs(numeric.width(zs) / w_closed - 1)) < 1e-8

    def test_glaser_anchor_away_from_center(self, beam):
        # the analytic backend accepts initial conditions at any z0 and must
        # agree with direct nonlinear integration from that anchor
        p = glaser_beta(beam, 2.0)
        init = EnvelopeInit(p.c - 4 * p.a, 3.1e-7, -5e-3)
        dom = (p.c - 8 * p.a, p.c + 8 * p.a)
        sol = solve_envelope(p, beam, init, dom)
        assert sol.backend == "AnalyticGlaser"
        zs = np.linspace(*dom, 17)
        w_oracle = solve_width_nonlinear(p, beam, init, zs)
        assert np.max(np.abs(sol.width(zs) / w_oracle - 1)) < 1e-9

    def test_pinney_vs_nonlinear_oracle_on_ramp(self, beam, omega_01):
        ramp = SmoothRamp(1e-4, 8e-4, omega_01, 2 * omega_01)
        w_i = landau_width(omega_01)
        init = EnvelopeInit(0.0, w_i, math.inf)
        dom = (0.0, 4e-3)
        sol = solve_envelope(ramp, beam, init, dom)
        zs = np.linspace(0.0, 4e-3, 11)
        w_oracle = solve_width_nonlinear(ramp, beam, init, zs)
        assert np.max(np.abs(sol.width(zs) / w_oracle - 1)) < 1e-8

    def test_domain_validation(self, beam):
        init = EnvelopeInit(0.0, 1.6e-7, math.inf)
        with pytest.raises(ValueError):
            solve_envelope(Free(), beam, init, (1e-3, 2e-3))  # z0 outside
        z = np.linspace(-1e-3, 1e-3, 9)
        tab = Tabulated(z, 8.79e9 * np.ones(9) / (1 + (z / 1e-3) ** 2))
        with pytest.raises(OutOfDomainError):
            solve_envelope(tab, beam, init, (-2e-3, 2e-3))

    def test_evaluation_outside_domain_rejected(self, beam):
        sol = solve_envelope(Free(), beam, EnvelopeInit(0.0, 1.6e-7, math.inf), (-1e-3, 1e-3))
        with pytest.raises(OutOfDomainError):
            sol.width(2e-3)

    def test_continuity_across_piecewise_step(self, beam, omega_01, landau_w01):
        step = Piecewise(((0.0, 1e-4, Uniform(omega_01)),
                          (1e-4, 5e-3, Uniform(2 * omega_01))))
        sol = solve_envelope(step, beam, EnvelopeInit(0.0, landau_w01, math.inf), (0.0, 5e-3))
        eps = 1e-12
        w_left, w_right = sol.width(1e-4 - eps), sol.width(1e-4 + eps)
        wd_left, wd_right = sol.width_deriv(1e-4 - eps), sol.width_deriv(1e-4 + eps)
        assert w_left == pytest.approx(w_right, rel=1e-10)
        assert wd_left == pytest.approx(wd_right, abs=1e-10 * abs(w_left) / 1e-4)
        # wddot, by contrast, jumps with Omega^2
        assert sol.width_second_deriv(1e-4) != pytest.approx(
            4 / (beam.wavenumber_k**2 * w_left**3) - (omega_01 / beam.axial_speed_v) ** 2 * w_left,
            rel=1e-3)


class TestSymmetries:
    def test_flip_field_sign(self, beam, omega_01, landau_w01):
        init = EnvelopeInit(0.0, 1.2 * landau_w01, 4e-3)
        dom = (0.0, 3e-3)
        zs = np.linspace(0.0, 3e-3, 101)
        w_plus = solve_envelope(Uniform(omega_01), beam, init, dom).width(zs)
        w_minus = solve_envelope(Uniform(-omega_01), beam, init, dom).width(zs)
        assert np.allclose(w_plus, w_minus, rtol=1e-14)

    def test_mirror_profile_with_reversed_slope(self, beam, omega_01):
        # v -> -v with z -> -z maps a solution onto the solution of the
        # mirrored profile with the initial slope negated
        ramp = SmoothRamp(2e-4, 9e-4, omega_01, 2.4 * omega_01)
        mirrored = SmoothRamp(-9e-4, -2e-4, 2.4 * omega_01, omega_01)
        w0 = 1.4e-7
        fwd = solve_envelope(ramp, beam, EnvelopeInit(0.0, w0, 2e-3), (-2e-3, 2e-3))
        bwd = solve_envelope(mirrored, beam, EnvelopeInit(0.0, w0, -2e-3), (-2e-3, 2e-3))
        zs = np.linspace(-1.8e-3, 1.8e-3, 41)
        assert np.max(np.abs(fwd.width(zs) - bwd.width(-zs))) < 1e-9 * w0


class TestCurvatureRadius:
    def test_landau_mode_flat_everywhere(self, landau_envelope):
        zs = np.linspace(*landau_envelope.domain, 41)
        r = landau_envelope.curvature_radius(zs)
        assert np.all(np.isinf(r))

    def test_free_space_matches_gaussian_beam_form(self, beam):
        w0 = 1.6e-7
        z_r = beam.rayleigh_length(w0)
        sol = solve_envelope(Free(), beam, EnvelopeInit(0.0, w0, math.inf), (-3 * z_r, 3 * z_r))
        for z in (0.3 * z_r, z_r, 2.5 * z_r, -1.2 * z_r):
            expected = z * (1 + (z_r / z) ** 2)
            assert curvature_radius(sol, z) == pytest.approx(expected, rel=1e-12)
        assert math.isinf(curvature_radius(sol, 0.0))

    def test_glaser_special_choice_flat_at_center(self, beam):
        p = glaser_beta(beam, 2.0)
        w_c = math.sqrt(2 * p.a / (2.0 * beam.wavenumber_k))
        sol = solve_envelope(p, beam, EnvelopeInit(p.c, w_c, math.inf),
                             (p.c - 5 * p.a, p.c + 5 * p.a))
        assert math.isinf(curvature_radius(sol, p.c))


class TestResidual:
    @pytest.mark.parametrize("case", ["constant", "free", "glaser", "ramp"])
    def test_scaled_residual_small(self, case, beam, omega_01, landau_w01):
        if case == "constant":
            sol = solve_envelope(Uniform(omega_01), beam,
                                 EnvelopeInit(0.0, 1.3 * landau_w01, 2.5e-3), (0.0, 5e-3))
            om_peak = omega_01
        elif case == "free":
            w0 = 1.6e-7
            z_r = beam.rayleigh_length(w0)
            sol = solve_envelope(Free(), beam, EnvelopeInit(0.0, w0, math.inf),
                                 (-3 * z_r, 3 * z_r))
            om_peak = 0.0
        elif case == "glaser":
            p = glaser_beta(beam, 2.0)
            sol = solve_envelope(p, beam, EnvelopeInit(p.c, 1.4e-7, 3.7e-3),
                                 (p.c - 10 * p.a, p.c + 10 * p.a))
            om_peak = p.omega0
        else:
            ramp = SmoothRamp(1e-4, 8e-4, omega_01, 2 * omega_01)
            sol = solve_envelope(ramp, beam, EnvelopeInit(0.0, landau_w01, math.inf),
                                 (0.0, 5e-3))
            om_peak = 2 * omega_01
        z_lo, z_hi = sol.domain
        margin = 0.02 * (z_hi - z_lo)
        zs = np.linspace(z_lo + margin, z_hi - margin, 1000)
        res = ermakov_pinney_residual(sol, zs)
        span = z_hi - z_lo
        bound = 1e-9 * max(om_peak**2, (beam.axial_speed_v / span) ** 2)
        assert np.max(np.abs(res)) < bound
