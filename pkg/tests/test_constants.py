import math

import pytest
from hypothesis import given, strategies as st

from vortexlens import (CODATA2018, BeamParams, DomainError, PhysicalConstants,
                        ScaledUnits, landau_width, larmor_from_B)


def test_larmor_fig1_field_values():
    # 0.1 T and 0.2 T are the published reference points (~8.8 and ~17.6 GHz)
    assert larmor_from_B(0.1) == pytest.approx(8.8e9, rel=0.01)
    assert larmor_from_B(0.2) == pytest.approx(1.76e10, rel=0.01)
    assert larmor_from_B(0.0) == 0.0


def test_larmor_sign_follows_field():
    assert larmor_from_B(-0.1) == -larmor_from_B(0.1)


@given(st.floats(min_value=-10, max_value=10), st.floats(min_value=-5, max_value=5))
def test_larmor_linear_in_b(b, a):
    assert larmor_from_B(a * b) == pytest.approx(a * larmor_from_B(b), rel=1e-12, abs=1e-30)


def test_landau_width_at_01_tesla():
    omega = larmor_from_B(0.1)
    # computed independently: sqrt(2 hbar/(m_e omega)) with CODATA-2018 values
    assert landau_width(omega) == pytest.approx(1.6226052588939890e-07, rel=1e-12)
    assert landau_width(omega) == pytest.approx(1.62e-7, rel=5e-3)


@given(st.floats(min_value=-30, max_value=30).map(lambda x: math.copysign(10.0**abs(x), x)).filter(lambda x: x != 0))
def test_landau_width_identity(omega):
    w = landau_width(omega)
    assert w**2 * CODATA2018.electron_mass * abs(omega) == pytest.approx(
        2.0 * CODATA2018.hbar, rel=1e-12)


def test_landau_width_scaling_and_symmetry():
    omega = 7.3e9
    assert landau_width(4 * omega) == pytest.approx(landau_width(omega) / 2, rel=1e-14)
    assert landau_width(-omega) == landau_width(omega)


def test_landau_width_rejects_zero_field():
    with pytest.raises(DomainError):
        landau_width(0.0)


class TestPhysicalConstants:
    def test_codata_defaults(self):
        c = PhysicalConstants()
        assert c.hbar == 1.054571817e-34
        assert c.electron_mass == 9.1093837015e-31
        assert c.elementary_charge == 1.602176634e-19
        assert c.speed_of_light == 299792458.0

    @pytest.mark.parametrize("field", ["hbar", "electron_mass", "elementary_charge",
                                       "speed_of_light"])
    def test_rejects_nonpositive(self, field):
        with pytest.raises(ValueError):
            PhysicalConstants(**{field: -1.0})
        with pytest.raises(ValueError):
            PhysicalConstants(**{field: 0.0})

    def test_override_is_explicit_not_ambient(self):
        custom = PhysicalConstants(hbar=1e-34)
        assert custom.hbar == 1e-34
        assert CODATA2018.hbar == 1.054571817e-34


class TestBeamParams:
    def test_speed_tied_to_wavenumber(self, beam):
        c = beam.constants
        assert beam.axial_speed_v == pytest.approx(
            c.hbar * beam.wavenumber_k / c.electron_mass, rel=1e-14)

    def test_from_speed_fraction(self):
        b = BeamParams.from_speed_fraction(0.02)
        assert b.axial_speed_v == pytest.approx(0.02 * 299792458.0, rel=1e-14)

    def test_from_kinetic_energy(self):
        b = BeamParams.from_kinetic_energy_ev(100.0)
        c = b.constants
        expected_v = math.sqrt(2 * 100.0 * c.elementary_charge / c.electron_mass)
        assert b.axial_speed_v == pytest.approx(expected_v, rel=1e-12)

    def test_inconsistent_pair_rejected(self):
        with pytest.raises(ValueError):
            BeamParams(wavenumber_k=1e10, axial_speed_v=1e6)

    def test_nonpositive_wavenumber_rejected(self):
        with pytest.raises(ValueError):
            BeamParams.from_speed(-1e6)

    def test_rayleigh_length(self, beam):
        w0 = 1.6e-7
        assert beam.rayleigh_length(w0) == 0.5 * beam.wavenumber_k * w0**2
        assert beam.rayleigh_length(w0) > 0
        with pytest.raises(ValueError):
            beam.rayleigh_length(0.0)


class TestScaledUnits:
    @given(st.floats(min_value=1e-12, max_value=1e3),
           st.floats(min_value=1e-30, max_value=1e3))
    def test_length_round_trip_within_ulps(self, scale, x):
        units = ScaledUnits(length_scale=scale, speed=5.99e6)
        back = units.length_from_scaled(units.length_to_scaled(x))
        assert abs(back - x) <= 4 * math.ulp(x)

    @given(st.floats(min_value=-1e12, max_value=1e12))
    def test_omega_round_trip(self, omega):
        units = ScaledUnits(length_scale=1.6e-7, speed=5.99e6)
        back = units.omega_from_scaled(units.omega_to_scaled(omega))
        assert back == pytest.approx(omega, rel=1e-15, abs=1e-300)

    def test_frequency_scale(self):
        units = ScaledUnits(length_scale=2e-7, speed=6e6)
        assert units.frequency_scale == 3e13
        assert units.inverse_length_scale == 1.0 / 2e-7

    def test_rejects_bad_scales(self):
        with pytest.raises(ValueError):
            ScaledUnits(length_scale=0.0, speed=1e6)
        with pytest.raises(ValueError):
            ScaledUnits(length_scale=1e-7, speed=0.0)
