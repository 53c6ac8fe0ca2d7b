import math

import numpy as np
import pytest
from scipy.integrate import quad

from vortexlens import (CODATA2018, Free, Glaser, LinearRamp, OutOfDomainError,
                        Piecewise, SmoothRamp, Tabulated, Uniform, domega_dz,
                        field_vector, omega_at, omega_integral)

OM0 = 8.794100053860817e9


def glaser():
    return Glaser(omega0=OM0, a=1e-3, c=2e-4)


def linear_ramp():
    return LinearRamp(z_i=1e-4, z_f=6e-4, omega_i=OM0, omega_f=2 * OM0)


def smooth_ramp():
    return SmoothRamp(z_i=1e-4, z_f=6e-4, omega_i=OM0, omega_f=2 * OM0)


def tabulated():
    z = np.linspace(-2e-3, 2e-3, 41)
    return Tabulated(z, OM0 / (1.0 + (z / 1e-3) ** 2))


def piecewise_step():
    return Piecewise((
        (0.0, 1e-4, Uniform(OM0)),
        (1e-4, 5e-3, Uniform(2 * OM0)),
    ))


def _fd_divergence(profile, rho, z, h):
    """(1/rho) d(rho B_rho)/drho + dB_z/dz with 4th-order central stencils."""
    def rho_brho(r):
        return r * field_vector(profile, r, z)[0]

    def bz(zz):
        return field_vector(profile, rho, zz)[1]

    def d4(f, x, step):
        return (-f(x + 2 * step) + 8 * f(x + step) - 8 * f(x - step) + f(x - 2 * step)) / (12 * step)

    return d4(rho_brho, rho, min(h, 0.4 * rho)) / rho + d4(bz, z, h)


class TestOmegaAt:
    def test_glaser_peak_and_half_width(self):
        p = glaser()
        assert omega_at(p, p.c) == pytest.approx(OM0, rel=1e-15)
        assert omega_at(p, p.c + p.a) == pytest.approx(OM0 / 2, rel=1e-15)
        assert omega_at(p, p.c - p.a) == pytest.approx(OM0 / 2, rel=1e-15)

    def test_free_is_zero(self):
        assert omega_at(Free(), 0.123) == 0.0
        assert np.all(omega_at(Free(), np.linspace(-1, 1, 5)) == 0.0)

    def test_uniform(self):
        assert omega_at(Uniform(OM0), -3.7) == OM0

    def test_ramp_endpoints(self):
        for p in (linear_ramp(), smooth_ramp()):
            assert omega_at(p, 0.0) == OM0
            assert omega_at(p, 1e-2) == 2 * OM0

    def test_tabulated_interpolates(self):
        p = tabulated()
        z = 3.3e-4
        assert omega_at(p, z) == pytest.approx(OM0 / (1 + (z / 1e-3) ** 2), rel=1e-6)

    def test_tabulated_rejects_extrapolation(self):
        p = tabulated()
        with pytest.raises(OutOfDomainError):
            omega_at(p, 2.1e-3)
        with pytest.raises(OutOfDomainError):
            omega_at(p, np.array([0.0, -5e-3]))


class TestDomegaDz:
    def test_uniform_zero(self):
        assert domega_dz(Uniform(OM0), 1.0) == 0.0

    def test_glaser_flat_at_peak(self):
        p = glaser()
        assert domega_dz(p, p.c) == 0.0

    def test_linear_ramp_interior_slope(self):
        p = linear_ramp()
        expected = (p.omega_f - p.omega_i) / (p.z_f - p.z_i)
        assert domega_dz(p, 3e-4) == pytest.approx(expected, rel=1e-15)

    def test_linear_ramp_one_sided_from_right(self):
        p = linear_ramp()
        slope = (p.omega_f - p.omega_i) / (p.z_f - p.z_i)
        assert domega_dz(p, p.z_i) == pytest.approx(slope, rel=1e-15)
        assert domega_dz(p, p.z_f) == 0.0

    def test_piecewise_breakpoint_right_sided(self):
        p = piecewise_step()
        assert omega_at(p, 1e-4) == 2 * OM0
        assert domega_dz(p, 1e-4) == 0.0

    @pytest.mark.parametrize("profile,scale", [
        (glaser(), 1e-3),
        (linear_ramp(), 5e-4),
        (smooth_ramp(), 5e-4),
        (Uniform(OM0), 1e-3),
        (Free(), 1e-3),
    ])
    def test_matches_central_differences(self, profile, scale):
        h = 1e-5 * scale
        rng = np.random.default_rng(7)
        for z in rng.uniform(-8e-4, 9e-4, size=12):
            fd = (omega_at(profile, z + h) - omega_at(profile, z - h)) / (2 * h)
            analytic = domega_dz(profile, z)
            assert analytic == pytest.approx(fd, rel=1e-6, abs=1e-6 * abs(OM0) / scale)


class TestSmoothRamp:
    def test_c1_at_junctions(self):
        p = smooth_ramp()
        eps = 1e-12
        for z in (p.z_i, p.z_f):
            left = domega_dz(p, z - eps)
            right = domega_dz(p, z + eps)
            assert left == pytest.approx(right, abs=1e-4 * OM0 / (p.z_f - p.z_i))
        assert domega_dz(p, p.z_i) == pytest.approx(0.0, abs=1e-30)
        assert domega_dz(p, p.z_f) == pytest.approx(0.0, abs=1e-30)

    def test_midpoint_value(self):
        p = smooth_ramp()
        mid = 0.5 * (p.z_i + p.z_f)
        assert omega_at(p, mid) == pytest.approx(1.5 * OM0, rel=1e-14)


class TestFieldVector:
    def test_uniform_has_no_radial_part(self):
        b_rho, b_z = field_vector(Uniform(OM0), 1e-6, 0.3)
        expected_bz = 2 * CODATA2018.electron_mass * OM0 / CODATA2018.elementary_charge
        assert b_rho == 0.0
        assert b_z == pytest.approx(expected_bz, rel=1e-15)
        assert b_z == pytest.approx(0.1, rel=1e-9)  # built from B = 0.1 T

    def test_glaser_on_axis(self):
        p = glaser()
        b_rho, b_z = field_vector(p, 0.0, p.c + 0.5 * p.a)
        assert b_rho == 0.0
        assert b_z > 0

    def test_divergence_free_by_central_differences(self):
        p = glaser()
        scale = 2 * CODATA2018.electron_mass / CODATA2018.elementary_charge
        b_mag = scale * OM0
        for (rho, z) in [(2e-7, p.c + 0.3 * p.a), (5e-7, p.c - 1.7 * p.a), (1e-6, p.c)]:
            div = _fd_divergence(p, rho, z, h=1e-3 * p.a)
            assert abs(div) < 1e-10 * b_mag / p.a

    def test_rejects_negative_rho(self):
        with pytest.raises(ValueError):
            field_vector(Uniform(OM0), -1e-7, 0.0)


class TestOmegaIntegral:
    @pytest.mark.parametrize("profile", [
        Uniform(OM0), Free(), glaser(), linear_ramp(), smooth_ramp(),
        piecewise_step(), tabulated(),
    ])
    def test_matches_adaptive_quadrature(self, profile):
        lo, hi = profile.domain
        z0 = max(lo, -1.5e-3)
        z1 = min(hi, 1.5e-3)
        pts = sorted(b for b in profile.breakpoints() if z0 < b < z1)
        expected, _ = quad(lambda s: omega_at(profile, s), z0, z1,
                           points=pts or None, epsrel=1e-12, limit=300)
        assert omega_integral(profile, z0, z1) == pytest.approx(expected, rel=1e-10)

    def test_orientation(self):
        p = glaser()
        assert omega_integral(p, 1e-3, -1e-3) == -omega_integral(p, -1e-3, 1e-3)


class TestConstruction:
    def test_glaser_requires_positive_width(self):
        with pytest.raises(ValueError):
            Glaser(OM0, a=0.0, c=0.0)
        with pytest.raises(ValueError):
            Glaser(OM0, a=-1e-3, c=0.0)

    @pytest.mark.parametrize("cls", [LinearRamp, SmoothRamp])
    def test_ramps_require_ordered_interval(self, cls):
        with pytest.raises(ValueError):
            cls(z_i=1.0, z_f=1.0, omega_i=1.0, omega_f=2.0)

    def test_piecewise_requires_contiguity(self):
        with pytest.raises(ValueError):
            Piecewise(((0.0, 1.0, Free()), (1.5, 2.0, Free())))
        with pytest.raises(ValueError):
            Piecewise(())

    def test_piecewise_domain_and_breakpoints(self):
        p = piecewise_step()
        assert p.domain == (0.0, 5e-3)
        assert p.breakpoints() == (1e-4,)
        with pytest.raises(OutOfDomainError):
            omega_at(p, -1e-5)

    def test_tabulated_needs_four_increasing_samples(self):
        with pytest.raises(ValueError):
            Tabulated(np.array([0.0, 1.0, 2.0]), np.array([1.0, 2.0, 3.0]))
        with pytest.raises(ValueError):
            Tabulated(np.array([0.0, 1.0, 1.0, 2.0]), np.ones(4))


class TestTabulatedCsv:
    def test_round_trip(self, tmp_path):
        z = np.linspace(0, 1e-3, 9)
        om = OM0 * (1 + z / 1e-3)
        path = tmp_path / "field.csv"
        lines = ["z_m,omega_rad_per_s"] + [f"{float(zi)!r},{float(oi)!r}" for zi, oi in zip(z, om)]
        path.write_text("\n".join(lines) + "\n")
        p = Tabulated.from_csv(path)
        assert omega_at(p, 5e-4) == pytest.approx(1.5 * OM0, rel=1e-9)

    def test_rejects_wrong_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("z,omega\n0,1\n1,2\n2,3\n3,4\n")
        with pytest.raises(ValueError, match="z_m,omega_rad_per_s"):
            Tabulated.from_csv(path)


def test_tabulated_divergence_nearly_free():
    # stencil chosen inside one spline piece, where the fit is a cubic and
    # the 4th-order differences reproduce its derivative exactly
    p = tabulated()
    scale = 2 * CODATA2018.electron_mass / CODATA2018.elementary_charge
    div = _fd_divergence(p, rho=4e-7, z=2.5e-4, h=1e-6)
    assert abs(div) < 1e-8 * scale * OM0 / 1e-3
